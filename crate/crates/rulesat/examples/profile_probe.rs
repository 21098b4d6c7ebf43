// quick timing probe
fn main() {
    use rulesat::synth;
    use rulesat_core::dataset::{binarize, make_partitions};
    use rulesat_core::imlib::{encode_partition, ImlibParams};
    use rulesat_core::maxsat::{solve, BackendConfig};
    use std::time::Instant;

    let table = synth::numeric_table(1500, 22, 4);
    let ds = binarize(&table, 4).unwrap();
    eprintln!("m = {}", ds.num_features());
    let params = ImlibParams { rule_count: 3, rule_len: 3, lambda: 10, partition_size: 16, quantiles: 4, seed: 5 };
    let plan = make_partitions(&ds, 16, 5).unwrap();
    let mut prior = None;
    let mut encode_total = 0.0;
    let mut solve_total = 0.0;
    let backend = BackendConfig::embedded(5);
    for (t, part) in plan.parts.iter().enumerate().take(20) {
        let rows: Vec<&[bool]> = part.iter().map(|&i| ds.rows[i].as_slice()).collect();
        let labels: Vec<bool> = part.iter().map(|&i| ds.labels[i]).collect();
        let t0 = Instant::now();
        let (inst, vars) = encode_partition(&rows, &labels, &params, prior.as_ref(), false);
        let te = t0.elapsed().as_secs_f64();
        encode_total += te;
        let t0 = Instant::now();
        let sol = solve(&inst, &backend).unwrap().optimal().unwrap();
        let ts = t0.elapsed().as_secs_f64();
        solve_total += ts;
        if t < 6 { eprintln!("partition {t}: encode {:.1}ms ({} hard, {} soft, {} vars), solve {:.1}ms cost {}", te*1e3, inst.hard.len(), inst.soft.len(), inst.num_vars, ts*1e3, sol.cost); }
        prior = Some(rulesat_core::imlib::ImlibState{
            choice: vars.choice.iter().map(|r| r.iter().map(|s| s.iter().map(|&v| sol.model.get(v)).collect()).collect()).collect(),
            sign: vars.sign.iter().map(|r| r.iter().map(|&v| sol.model.get(v)).collect()).collect(),
        });
    }
    eprintln!("20 partitions: encode {:.2}s solve {:.2}s", encode_total, solve_total);
}
