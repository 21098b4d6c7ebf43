//! The experiment pipeline: for each parameter configuration and each
//! realization, split 80/20 with a derived seed, fit the binarizer on the
//! training rows, train IMLI, sweep IMLIB's per-rule cap from 1 to one less
//! than IMLI's largest rule on the same split, and record interpretability
//! and accuracy metrics. Summaries pick, per model, the configuration with
//! the best mean test accuracy (ties toward the smaller mean rule-set size).
//!
//! Pairing guarantee: within one realization both learners see identical
//! train/test index sets, and within one configuration identical partition
//! seeds, so their instances are built from the same sample batches.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use rulesat_core::dataset::{split_indices, Binarizer, BinaryDataset, FeatureKind, RawTable};
use rulesat_core::imli::{self, ImliParams, TrainOutcome};
use rulesat_core::imlib::{self, ImlibParams};
use rulesat_core::maxsat::{Backend, BackendConfig};
use rulesat_core::rules::{metrics, RuleForm, RuleSet};

/// Fraction of rows a rule set classifies correctly.
pub fn evaluate(rs: &RuleSet, test: &BinaryDataset) -> Result<f64> {
    if test.is_empty() {
        bail!("cannot evaluate on an empty test set");
    }
    let correct = test
        .rows
        .iter()
        .zip(&test.labels)
        .filter(|(row, &y)| rs.apply(row) == y)
        .count();
    Ok(correct as f64 / test.len() as f64)
}

/// splitmix64-based seed derivation: stable across platforms and runs.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    let mut h = base ^ 0x9E37_79B9_7F4A_7C15;
    for &p in parts {
        h ^= p.wrapping_add(0x9E37_79B9_7F4A_7C15);
        h = (h ^ (h >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        h = (h ^ (h >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        h ^= h >> 31;
    }
    h
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Imli,
    Imlib,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelKind::Imli => write!(f, "imli"),
            ModelKind::Imlib => write!(f, "imlib"),
        }
    }
}

/// Grid and protocol parameters.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub dataset_name: String,
    pub models: Vec<ModelKind>,
    pub ks: Vec<usize>,
    pub lambdas: Vec<u64>,
    pub lps: Vec<usize>,
    pub realizations: usize,
    pub ratio: f64,
    pub quantiles: usize,
    pub base_seed: u64,
    pub backend: BackendConfig,
    pub overrides: BTreeMap<usize, FeatureKind>,
}

impl ExperimentConfig {
    /// The grid the evaluation protocol uses by default:
    /// k ∈ {1,2,3}, λ ∈ {5,10}, lp ∈ {8,16}, ten realizations, 80/20.
    pub fn paper_defaults(dataset_name: &str) -> ExperimentConfig {
        ExperimentConfig {
            dataset_name: dataset_name.to_string(),
            models: vec![ModelKind::Imli, ModelKind::Imlib],
            ks: vec![1, 2, 3],
            lambdas: vec![5, 10],
            lps: vec![8, 16],
            realizations: 10,
            ratio: 0.8,
            quantiles: 4,
            base_seed: 0,
            backend: BackendConfig::default(),
            overrides: BTreeMap::new(),
        }
    }
}

/// One training run's row in the records CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub dataset: String,
    pub model: String,
    pub k: usize,
    pub lambda: u64,
    pub lp: usize,
    pub q: usize,
    /// Chosen per-rule cap; empty for IMLI.
    pub l: Option<usize>,
    pub realization: usize,
    pub seed: u64,
    pub status: String,
    pub rule_count: usize,
    pub set_size: usize,
    pub largest_rule: usize,
    /// Per-rule sizes, pipe-separated, e.g. "6|11|0".
    pub rule_sizes: String,
    pub accuracy: f64,
    pub train_seconds: f64,
    /// Total over the l-sweep's trainings; empty for IMLI.
    pub sweep_seconds: Option<f64>,
}

fn rule_sizes(rs: &RuleSet) -> String {
    rs.rules
        .iter()
        .map(|r| r.len().to_string())
        .collect::<Vec<_>>()
        .join("|")
}

fn record_for(
    cfg: &ExperimentConfig,
    model: ModelKind,
    k: usize,
    lambda: u64,
    lp: usize,
    l: Option<usize>,
    realization: usize,
    seed: u64,
    out: &TrainOutcome,
    accuracy: f64,
    sweep_seconds: Option<f64>,
) -> ExperimentRecord {
    let m = metrics(&out.rule_set);
    let status = if out.rule_set.rules.is_empty() {
        // Reduction deleted every rule: constant-negative classifier.
        "empty_model".to_string()
    } else {
        "ok".to_string()
    };
    ExperimentRecord {
        dataset: cfg.dataset_name.clone(),
        model: model.to_string(),
        k,
        lambda,
        lp,
        q: cfg.quantiles,
        l,
        realization,
        seed,
        status,
        rule_count: m.rule_count,
        set_size: m.total_size,
        largest_rule: m.largest_rule,
        rule_sizes: rule_sizes(&out.rule_set),
        accuracy,
        train_seconds: out.train_seconds,
        sweep_seconds,
    }
}

/// Result of the per-realization l-sweep.
#[derive(Debug)]
pub struct SweepOutcome {
    pub best_l: usize,
    pub outcome: TrainOutcome,
    pub accuracy: f64,
    pub total_seconds: f64,
    /// Set when IMLI's largest rule left no room to sweep (size ≤ 1) and
    /// the fallback l = 1 was used.
    pub empty_range_fallback: bool,
}

/// Trains IMLIB for every `l` from 1 to `imli_largest − 1` on the given
/// split and returns the accuracy-maximizing run; ties break toward the
/// smaller `l`. An empty sweep range falls back to l = 1, flagged.
pub fn sweep_l(
    train: &BinaryDataset,
    test: &BinaryDataset,
    imli_largest: usize,
    template: &ImlibParams,
    backend: &BackendConfig,
) -> Result<SweepOutcome> {
    let (range, fallback) = if imli_largest >= 2 {
        ((1..imli_largest).collect::<Vec<_>>(), false)
    } else {
        (vec![1], true)
    };
    let mut best: Option<SweepOutcome> = None;
    let mut total_seconds = 0.0;
    for l in range {
        if l > train.num_features() {
            break; // cannot cap above the feature count
        }
        let params = ImlibParams {
            rule_len: l,
            ..template.clone()
        };
        let out = imlib::train(train, &params, backend)
            .with_context(|| format!("imlib training at l={l}"))?;
        let accuracy = evaluate(&out.rule_set, test)?;
        total_seconds += out.train_seconds;
        if best.as_ref().is_none_or(|b| accuracy > b.accuracy) {
            best = Some(SweepOutcome {
                best_l: l,
                outcome: out,
                accuracy,
                total_seconds: 0.0,
                empty_range_fallback: fallback,
            });
        }
    }
    let mut best = best.expect("sweep range is never empty");
    best.total_seconds = total_seconds;
    Ok(best)
}

/// Mean and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

fn stat(values: &[f64]) -> Stat {
    let n = values.len();
    if n == 0 {
        return Stat {
            mean: f64::NAN,
            std: f64::NAN,
            n,
        };
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let std = if n < 2 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    };
    Stat { mean, std, n }
}

/// Aggregated metrics of one model at one configuration.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigStats {
    pub k: usize,
    pub lambda: u64,
    pub lp: usize,
    pub rule_count: Stat,
    pub set_size: Stat,
    pub largest_rule: Stat,
    pub accuracy: Stat,
    pub train_seconds: Stat,
    pub failed_runs: usize,
}

#[derive(Debug)]
pub struct GridOutput {
    pub records: Vec<ExperimentRecord>,
    /// Per model: stats at its best configuration (mean accuracy, ties
    /// toward smaller mean set size), plus the competing model's stats at
    /// that same configuration for the paired table.
    pub best: BTreeMap<String, (ConfigStats, Option<ConfigStats>)>,
    pub summary: String,
    pub warnings: Vec<String>,
}

/// Runs the full protocol over the grid. IMLI is always trained (the sweep
/// range for IMLIB is defined by IMLI's largest rule on the same run), but
/// records are emitted only for the requested models.
pub fn run_grid(table: &RawTable, cfg: &ExperimentConfig) -> Result<GridOutput> {
    if !(cfg.ratio > 0.0 && cfg.ratio < 1.0) {
        bail!("grid evaluation needs a train ratio strictly between 0 and 1");
    }
    if cfg.realizations == 0 {
        bail!("need at least one realization");
    }
    let mut records = Vec::new();
    let mut warnings = Vec::new();
    let configs: Vec<(usize, u64, usize)> = cfg
        .ks
        .iter()
        .flat_map(|&k| {
            cfg.lambdas.iter().flat_map(move |&lambda| {
                cfg.lps.iter().map(move |&lp| (k, lambda, lp))
            })
        })
        .collect();

    for realization in 0..cfg.realizations {
        let split_seed = derive_seed(cfg.base_seed, &[1, realization as u64]);
        let (train_idx, test_idx) = split_indices(table.len(), cfg.ratio, split_seed)?;
        let binarizer = Binarizer::fit(table, cfg.quantiles, Some(&train_idx), &cfg.overrides)
            .map_err(|e| anyhow::anyhow!("binarize: {e}"))?;
        let train = binarizer
            .transform(table, Some(&train_idx))
            .map_err(|e| anyhow::anyhow!("transform train: {e}"))?;
        let test = binarizer
            .transform(table, Some(&test_idx))
            .map_err(|e| anyhow::anyhow!("transform test: {e}"))?;

        for (ci, &(k, lambda, lp)) in configs.iter().enumerate() {
            let seed = derive_seed(cfg.base_seed, &[2, realization as u64, ci as u64]);
            let backend = reseeded(&cfg.backend, seed);
            let imli_params = ImliParams {
                rule_count: k,
                lambda,
                partition_size: lp,
                quantiles: cfg.quantiles,
                seed,
                target_form: RuleForm::Dnf,
            };
            let imli_out = match imli::train(&train, &imli_params, &backend) {
                Ok(out) => out,
                Err(e) => {
                    warnings.push(format!(
                        "imli k={k} λ={lambda} lp={lp} realization {realization}: {e}"
                    ));
                    continue;
                }
            };
            if cfg.models.contains(&ModelKind::Imli) {
                let accuracy = evaluate(&imli_out.rule_set, &test)?;
                records.push(record_for(
                    cfg,
                    ModelKind::Imli,
                    k,
                    lambda,
                    lp,
                    None,
                    realization,
                    seed,
                    &imli_out,
                    accuracy,
                    None,
                ));
            }
            if cfg.models.contains(&ModelKind::Imlib) {
                let imli_largest = metrics(&imli_out.pre_reduction).largest_rule;
                let template = ImlibParams {
                    rule_count: k,
                    rule_len: 1,
                    lambda,
                    partition_size: lp,
                    quantiles: cfg.quantiles,
                    seed,
                };
                match sweep_l(&train, &test, imli_largest, &template, &backend) {
                    Ok(sweep) => {
                        let mut rec = record_for(
                            cfg,
                            ModelKind::Imlib,
                            k,
                            lambda,
                            lp,
                            Some(sweep.best_l),
                            realization,
                            seed,
                            &sweep.outcome,
                            sweep.accuracy,
                            Some(sweep.total_seconds),
                        );
                        if sweep.empty_range_fallback {
                            rec.status = format!("{}+sweep_fallback", rec.status);
                        }
                        records.push(rec);
                    }
                    Err(e) => {
                        warnings.push(format!(
                            "imlib k={k} λ={lambda} lp={lp} realization {realization}: {e}"
                        ));
                    }
                }
            }
        }
    }

    let (best, summary) = summarize(cfg, &records, &warnings);
    Ok(GridOutput {
        records,
        best,
        summary,
        warnings,
    })
}

fn reseeded(backend: &BackendConfig, seed: u64) -> BackendConfig {
    let mut b = backend.clone();
    if let Backend::Embedded { seed: s } = &mut b.backend {
        *s = seed;
    }
    b
}

fn config_stats(
    records: &[ExperimentRecord],
    model: &str,
    key: (usize, u64, usize),
    expected_runs: usize,
) -> Option<ConfigStats> {
    let rows: Vec<&ExperimentRecord> = records
        .iter()
        .filter(|r| r.model == model && (r.k, r.lambda, r.lp) == key)
        .collect();
    if rows.is_empty() {
        return None;
    }
    let grab = |f: fn(&ExperimentRecord) -> f64| -> Vec<f64> { rows.iter().map(|r| f(r)).collect() };
    Some(ConfigStats {
        k: key.0,
        lambda: key.1,
        lp: key.2,
        rule_count: stat(&grab(|r| r.rule_count as f64)),
        set_size: stat(&grab(|r| r.set_size as f64)),
        largest_rule: stat(&grab(|r| r.largest_rule as f64)),
        accuracy: stat(&grab(|r| r.accuracy)),
        train_seconds: stat(&grab(|r| r.train_seconds)),
        failed_runs: expected_runs.saturating_sub(rows.len()),
    })
}

fn summarize(
    cfg: &ExperimentConfig,
    records: &[ExperimentRecord],
    warnings: &[String],
) -> (BTreeMap<String, (ConfigStats, Option<ConfigStats>)>, String) {
    let mut best: BTreeMap<String, (ConfigStats, Option<ConfigStats>)> = BTreeMap::new();
    let keys: Vec<(usize, u64, usize)> = cfg
        .ks
        .iter()
        .flat_map(|&k| {
            cfg.lambdas
                .iter()
                .flat_map(move |&l| cfg.lps.iter().map(move |&p| (k, l, p)))
        })
        .collect();

    for model in &cfg.models {
        let name = model.to_string();
        let other = match model {
            ModelKind::Imli => ModelKind::Imlib,
            ModelKind::Imlib => ModelKind::Imli,
        }
        .to_string();
        let mut chosen: Option<ConfigStats> = None;
        for &key in &keys {
            let Some(stats) = config_stats(records, &name, key, cfg.realizations) else {
                continue;
            };
            let better = match &chosen {
                None => true,
                Some(cur) => {
                    stats.accuracy.mean > cur.accuracy.mean
                        || (stats.accuracy.mean == cur.accuracy.mean
                            && stats.set_size.mean < cur.set_size.mean)
                }
            };
            if better {
                chosen = Some(stats);
            }
        }
        if let Some(stats) = chosen {
            let paired = config_stats(
                records,
                &other,
                (stats.k, stats.lambda, stats.lp),
                cfg.realizations,
            );
            best.insert(name, (stats, paired));
        }
    }

    let mut text = String::new();
    let _ = writeln!(
        text,
        "dataset: {} — {} realizations, split {:.0}/{:.0}, q={}",
        cfg.dataset_name,
        cfg.realizations,
        cfg.ratio * 100.0,
        (1.0 - cfg.ratio) * 100.0,
        cfg.quantiles
    );
    for (model, (stats, paired)) in &best {
        let _ = writeln!(
            text,
            "\nbest configuration for {}: k={} λ={} lp={}",
            model, stats.k, stats.lambda, stats.lp
        );
        let _ = writeln!(
            text,
            "{:<8}{:>18}{:>15}{:>19}{:>15}{:>20}",
            "Model", "Number of rules", "|R|", "Largest rule size", "Accuracy", "Training time"
        );
        let mut print_row = |name: &str, s: &ConfigStats| {
            let _ = writeln!(
                text,
                "{:<8}{:>18}{:>15}{:>19}{:>15}{:>20}",
                name,
                format!("{:.2} ± {:.2}", s.rule_count.mean, s.rule_count.std),
                format!("{:.2} ± {:.2}", s.set_size.mean, s.set_size.std),
                format!("{:.2} ± {:.2}", s.largest_rule.mean, s.largest_rule.std),
                format!("{:.2} ± {:.2}", s.accuracy.mean, s.accuracy.std),
                format!(
                    "{:.4} ± {:.4}",
                    s.train_seconds.mean, s.train_seconds.std
                ),
            );
        };
        print_row(model, stats);
        if let Some(p) = paired {
            print_row(if model == "imli" { "imlib" } else { "imli" }, p);
        }
        if stats.failed_runs > 0 {
            let _ = writeln!(
                text,
                "warning: {} failed runs excluded from the aggregate",
                stats.failed_runs
            );
        }
    }
    if !warnings.is_empty() {
        let _ = writeln!(text, "\n{} warnings:", warnings.len());
        for w in warnings {
            let _ = writeln!(text, "  {w}");
        }
    }
    (best, text)
}

/// Writes records as CSV. Column order is struct order; floats print with
/// fixed precision so identical runs produce identical bytes apart from the
/// two timing columns.
pub fn write_records_csv(records: &[ExperimentRecord], path: &std::path::Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("writing {}", path.display()))?;
    for r in records {
        let mut r = r.clone();
        r.accuracy = (r.accuracy * 1e6).round() / 1e6;
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rulesat_core::dataset::{BinaryColumn, ColumnTest};

    fn tiny(labels: &[bool]) -> BinaryDataset {
        BinaryDataset {
            columns: vec![BinaryColumn::new(
                0,
                "f".to_string(),
                ColumnTest::Is("1".to_string()),
            )],
            rows: labels.iter().map(|&y| vec![y]).collect(),
            labels: labels.to_vec(),
            class_name: "c".to_string(),
            positive_label: "1".to_string(),
        }
    }

    #[test]
    fn evaluate_counts_matches() {
        let ds = tiny(&[true, false, true, false]);
        let rs = RuleSet::new(
            RuleForm::Dnf,
            vec![rulesat_core::rules::Rule::new(vec![
                rulesat_core::rules::FeatureLiteral::from_column(0, &ds.columns[0], true),
            ])],
        );
        assert_eq!(evaluate(&rs, &ds).unwrap(), 1.0);
        let all_false = RuleSet::new(RuleForm::Dnf, vec![]);
        assert_eq!(evaluate(&all_false, &ds).unwrap(), 0.5);
        let all_pos = tiny(&[true, true]);
        assert_eq!(evaluate(&all_false, &all_pos).unwrap(), 0.0);
    }

    #[test]
    fn seed_derivation_is_stable_and_spread() {
        let a = derive_seed(0, &[1, 2]);
        let b = derive_seed(0, &[1, 2]);
        let c = derive_seed(0, &[2, 1]);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(derive_seed(1, &[1, 2]), a);
    }

    #[test]
    fn stat_mean_and_sample_std() {
        let s = stat(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]);
        assert!((s.mean - 5.0).abs() < 1e-12);
        assert!((s.std - 2.138089935299395).abs() < 1e-12);
        assert_eq!(stat(&[3.0]).std, 0.0);
    }
}
