//! Encoding-objective equivalence, checked by brute force: on tiny random
//! datasets the optimal cost of each learner's partition instance must equal
//! the exhaustive minimum of its objective over all rule assignments, and
//! the returned models must satisfy the structural invariants (exactly-one
//! slots, faithful coverage variables, miss-variable consistency).

mod common;

use common::random_bit_dataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rulesat_core::dataset::BinaryDataset;
use rulesat_core::imli::{self, ImliParams, ImliState};
use rulesat_core::imlib::{self, ImlibParams, ImlibState};
use rulesat_core::maxsat::{solve, BackendConfig};
use rulesat_core::rules::{RuleForm, RuleSet};

fn imli_oracle_min(ds: &BinaryDataset, k: usize, lambda: u64, prior: Option<&ImliState>) -> u64 {
    let m = ds.num_features();
    let bits = 2 * m * k;
    assert!(bits <= 16);
    let mut best = u64::MAX;
    for mask in 0u32..1 << bits {
        let selected: Vec<Vec<bool>> = (0..k)
            .map(|o| (0..2 * m).map(|v| mask >> (o * 2 * m + v) & 1 == 1).collect())
            .collect();
        let selector_cost: u64 = selected
            .iter()
            .enumerate()
            .flat_map(|(o, row)| {
                row.iter().enumerate().map(move |(v, &bit)| (o, v, bit))
            })
            .filter(|&(o, v, bit)| bit != prior.is_some_and(|p| p.selected[o][v]))
            .count() as u64;
        let state = ImliState { selected };
        let cnf = RuleSet::new(
            RuleForm::Cnf,
            imli::decode_cnf_rules(&state, &ds.columns),
        );
        let mismatches = ds
            .rows
            .iter()
            .zip(&ds.labels)
            .filter(|(row, &y)| cnf.apply(row) != y)
            .count() as u64;
        best = best.min(selector_cost + lambda * mismatches);
    }
    best
}

#[test]
fn imli_cost_matches_exhaustive_minimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..100u64 {
        let n = rng.gen_range(1..=6);
        let m = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=2);
        let lambda = if rng.gen_bool(0.5) { 5 } else { 10 };
        let ds = random_bit_dataset(&mut rng, n, m);
        let prior = rng.gen_bool(0.5).then(|| ImliState {
            selected: (0..k)
                .map(|_| (0..2 * m).map(|_| rng.gen_bool(0.3)).collect())
                .collect(),
        });

        let params = ImliParams {
            rule_count: k,
            lambda,
            partition_size: n,
            seed: case,
            ..ImliParams::default()
        };
        let rows: Vec<&[bool]> = ds.rows.iter().map(|r| r.as_slice()).collect();
        let (inst, vars) =
            imli::encode_partition(&rows, &ds.labels, &params, prior.as_ref(), false);
        let sol = solve(&inst, &BackendConfig::embedded(case))
            .unwrap()
            .optimal()
            .expect("encoding is always satisfiable");
        let oracle = imli_oracle_min(&ds, k, lambda, prior.as_ref());
        assert_eq!(sol.cost, oracle, "case {case}: n={n} m={m} k={k} λ={lambda}");

        // Miss-variable consistency: an unpenalized sample is classified
        // correctly by the decoded set.
        let state = ImliState {
            selected: vars
                .selectors
                .iter()
                .map(|row| row.iter().map(|&v| sol.model.get(v)).collect())
                .collect(),
        };
        let cnf = RuleSet::new(
            RuleForm::Cnf,
            imli::decode_cnf_rules(&state, &ds.columns),
        );
        for (i, (row, &y)) in ds.rows.iter().zip(&ds.labels).enumerate() {
            if !sol.model.get(vars.miss[i]) {
                assert_eq!(cnf.apply(row), y, "case {case} sample {i}");
            }
        }
    }
}

#[test]
fn imli_negation_route_flips_predictions() {
    // The DNF produced by negating a CNF model predicts the complement on
    // every sample, whatever the selector assignment.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let m = rng.gen_range(1..=4);
        let k = rng.gen_range(1..=2);
        let ds = random_bit_dataset(&mut rng, 6, m);
        let state = ImliState {
            selected: (0..k)
                .map(|_| (0..2 * m).map(|_| rng.gen_bool(0.4)).collect())
                .collect(),
        };
        let cnf = RuleSet::new(
            RuleForm::Cnf,
            imli::decode_cnf_rules(&state, &ds.columns),
        );
        let dnf = cnf.negated();
        assert_eq!(dnf.form, RuleForm::Dnf);
        for row in &ds.rows {
            assert_eq!(dnf.apply(row), !cnf.apply(row));
        }
    }
}

/// Exhaustive minimum of `2·(used slots) + λ·(falsified coverage clauses +
/// falsified per-rule exclusion units)` over all valid slot assignments.
fn imlib_oracle_min(ds: &BinaryDataset, k: usize, l: usize, lambda: u64) -> u64 {
    let m = ds.num_features();
    let slots = k * l;
    let options = 2 * (m + 1); // feature-or-skip × sign
    let mut best = u64::MAX;
    let mut counters = vec![0usize; slots];
    'outer: loop {
        // Decode the counter vector into per-slot (choice, sign).
        let slot = |o: usize, d: usize| {
            let c = counters[o * l + d];
            (c / 2, c % 2 == 1) // (feature index, sign), feature m = skip
        };
        let valid = (0..k).all(|o| (0..l).any(|d| slot(o, d).0 != m));
        if valid {
            let used: u64 = (0..k)
                .flat_map(|o| (0..l).map(move |d| (o, d)))
                .filter(|&(o, d)| slot(o, d).0 != m)
                .count() as u64;
            let covers = |o: usize, row: &[bool]| {
                (0..l).all(|d| {
                    let (j, sign) = slot(o, d);
                    j == m || row[j] == sign
                })
            };
            let mut penalty = 0u64;
            for (row, &y) in ds.rows.iter().zip(&ds.labels) {
                if y {
                    if !(0..k).any(|o| covers(o, row)) {
                        penalty += 1;
                    }
                } else {
                    penalty += (0..k).filter(|&o| covers(o, row)).count() as u64;
                }
            }
            best = best.min(2 * used + lambda * penalty);
        }
        // Next counter vector.
        for i in 0..slots {
            counters[i] += 1;
            if counters[i] < options {
                continue 'outer;
            }
            counters[i] = 0;
        }
        break;
    }
    best
}

#[test]
fn imlib_cost_matches_exhaustive_minimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(4711);
    for case in 0..100u64 {
        let n = rng.gen_range(1..=6);
        let m = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=2);
        let l = rng.gen_range(1..=2.min(m));
        let lambda = if rng.gen_bool(0.5) { 5 } else { 10 };
        let ds = random_bit_dataset(&mut rng, n, m);

        let params = ImlibParams {
            rule_count: k,
            rule_len: l,
            lambda,
            partition_size: n,
            seed: case,
            ..ImlibParams::default()
        };
        let rows: Vec<&[bool]> = ds.rows.iter().map(|r| r.as_slice()).collect();
        let (inst, vars) = imlib::encode_partition(&rows, &ds.labels, &params, None, false);
        let sol = solve(&inst, &BackendConfig::embedded(case))
            .unwrap()
            .optimal()
            .expect("encoding is always satisfiable");
        let oracle = imlib_oracle_min(&ds, k, l, lambda);
        assert_eq!(
            sol.cost, oracle,
            "case {case}: n={n} m={m} k={k} l={l} λ={lambda}"
        );

        // Structural invariants of the returned model.
        let state = ImlibState {
            choice: vars
                .choice
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|s| s.iter().map(|&v| sol.model.get(v)).collect())
                        .collect()
                })
                .collect(),
            sign: vars
                .sign
                .iter()
                .map(|r| r.iter().map(|&v| sol.model.get(v)).collect())
                .collect(),
        };
        for rule in &state.choice {
            for slot in rule {
                assert_eq!(slot.iter().filter(|&&b| b).count(), 1, "exactly-one");
            }
        }
        let rules = imlib::decode_dnf_rules(&state, &ds.columns);
        for rule in &rules {
            assert!((1..=l).contains(&rule.len()), "size bound violated");
        }
        // Coverage variables mirror the decoded semantics.
        let rs = RuleSet::new(RuleForm::Dnf, rules);
        for (o, rule) in rs.rules.iter().enumerate() {
            for (i, row) in ds.rows.iter().enumerate() {
                let decoded = rule.literals.iter().all(|lit| lit.holds_on_bits(row));
                assert_eq!(
                    sol.model.get(vars.covers[o][i]),
                    decoded,
                    "covers[{o}][{i}] out of sync"
                );
            }
        }
    }
}
