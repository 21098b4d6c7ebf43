//! Command-line surface: argument definitions and the command
//! implementations. `main` is a thin wrapper so integration tests can drive
//! the same entry points in-process.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use rulesat_core::dataset::{split_indices, Binarizer, BinaryDataset, FeatureKind, RawTable};
use rulesat_core::imli::{self, ImliParams};
use rulesat_core::imlib::{self, ImlibParams};
use rulesat_core::maxsat::{
    emit_wcnf, parse_wcnf, solve, Backend, BackendConfig, SolveResult, WcnfDialect,
};
use rulesat_core::rules::{format_ruleset, metrics, RuleForm};

use crate::harness::{self, evaluate, ExperimentConfig, ModelKind};
use crate::io;
use crate::synth;

/// Learns small DNF classification rule sets by compiling training to
/// weighted MaxSAT.
#[derive(Debug, Parser)]
#[command(name = "rulesat", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Binarize a CSV and dump the 0/1 matrix plus a JSON label sidecar.
    Binarize(BinarizeArgs),
    /// Train one model and print the learned rules.
    Train(TrainArgs),
    /// Apply a saved model to a CSV and write per-row predictions.
    Predict(PredictArgs),
    /// Accuracy of a saved model against a labeled CSV.
    Eval(EvalArgs),
    /// The full evaluation protocol: parameter grid × realizations,
    /// records CSV and a summary table.
    Grid(GridArgs),
    /// Dump one training partition's MaxSAT instance as WCNF text.
    EmitWcnf(EmitWcnfArgs),
    /// Solve a WCNF file with the embedded engine (MaxSAT-Evaluation
    /// style output, usable as an external solver for testing).
    SolveWcnf(SolveWcnfArgs),
    /// Generate a seeded synthetic benchmark table.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Input CSV with a header row.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Class column (name or 0-based index); defaults to the last column.
    #[arg(long)]
    pub class_col: Option<String>,
    /// Value of the class column mapped to the positive class. Required
    /// when the class column has more than two distinct values.
    #[arg(long)]
    pub positive: Option<String>,
    /// Per-column kind override, `column=constant|binary|categorical|ordinal`.
    #[arg(long = "kind")]
    pub kinds: Vec<String>,
    /// Quantile count for ordinal features.
    #[arg(short, long, default_value_t = 4)]
    pub q: usize,
}

impl DataArgs {
    fn load(&self) -> Result<(RawTable, BTreeMap<usize, FeatureKind>)> {
        let csv = io::read_csv(&self.input)?;
        let overrides = io::parse_overrides(&csv.columns, &self.kinds)?;
        let table = io::designate_class(
            csv,
            self.class_col.as_deref(),
            self.positive.as_deref(),
        )?;
        Ok((table, overrides))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendChoice {
    Embedded,
    External,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DialectChoice {
    Classic,
    Mse22,
}

impl From<DialectChoice> for WcnfDialect {
    fn from(d: DialectChoice) -> WcnfDialect {
        match d {
            DialectChoice::Classic => WcnfDialect::Classic,
            DialectChoice::Mse22 => WcnfDialect::Mse22,
        }
    }
}

#[derive(Debug, Args)]
pub struct BackendArgs {
    #[arg(long, value_enum, default_value_t = BackendChoice::Embedded)]
    pub backend: BackendChoice,
    /// Command template for the external backend; `{instance}` is replaced
    /// by the WCNF path (appended when absent).
    #[arg(long)]
    pub solver_cmd: Option<String>,
    #[arg(long, value_enum, default_value_t = DialectChoice::Classic)]
    pub wcnf_dialect: DialectChoice,
    /// Time limit in seconds for the external backend.
    #[arg(long)]
    pub time_limit: Option<u64>,
}

impl BackendArgs {
    fn to_config(&self, seed: u64) -> Result<BackendConfig> {
        let backend = match self.backend {
            BackendChoice::Embedded => Backend::Embedded { seed },
            BackendChoice::External => {
                let command = self
                    .solver_cmd
                    .clone()
                    .context("--backend external requires --solver-cmd")?;
                Backend::External { command }
            }
        };
        Ok(BackendConfig {
            backend,
            dialect: self.wcnf_dialect.into(),
            time_limit_secs: self.time_limit,
        })
    }
}

/// `RULESAT_SEED` overrides any `--seed` flag.
pub fn resolve_seed(flag: u64) -> u64 {
    std::env::var("RULESAT_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(flag)
}

#[derive(Debug, Args)]
pub struct BinarizeArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Where to write the 0/1 matrix CSV.
    #[arg(long)]
    pub out_matrix: Option<PathBuf>,
    /// Where to write the JSON column-label sidecar.
    #[arg(long)]
    pub out_labels: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelChoice {
    Imli,
    Imlib,
    Sqfsat,
}

impl std::fmt::Display for ModelChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelChoice::Imli => write!(f, "imli"),
            ModelChoice::Imlib => write!(f, "imlib"),
            ModelChoice::Sqfsat => write!(f, "sqfsat"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormChoice {
    Dnf,
    Cnf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum)]
    pub model: ModelChoice,
    /// Number of rules.
    #[arg(short, default_value_t = 2)]
    pub k: usize,
    /// Maximum features per rule (imlib and sqfsat).
    #[arg(short)]
    pub l: Option<usize>,
    /// Misclassification weight λ.
    #[arg(long, default_value_t = 10)]
    pub lambda: u64,
    /// Samples per partition.
    #[arg(long, default_value_t = 16)]
    pub lp: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Train fraction; below 1.0 the remainder becomes a test set.
    #[arg(long, default_value_t = 1.0)]
    pub ratio: f64,
    /// Target normal form (imli only; imlib is always DNF).
    #[arg(long, value_enum, default_value_t = FormChoice::Dnf)]
    pub form: FormChoice,
    #[command(flatten)]
    pub backend: BackendArgs,
    /// Write the model as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, short)]
    pub input: PathBuf,
    /// Predictions CSV (row, prediction, label text); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, short)]
    pub input: PathBuf,
    /// Class column override; defaults to the model's recorded class.
    #[arg(long)]
    pub class_col: Option<String>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Models to record.
    #[arg(long, value_delimiter = ',', default_values_t = vec![ModelChoice::Imli, ModelChoice::Imlib])]
    pub models: Vec<ModelChoice>,
    #[arg(long = "k", value_delimiter = ',', default_values_t = vec![1, 2, 3])]
    pub ks: Vec<usize>,
    #[arg(long = "lambda", value_delimiter = ',', default_values_t = vec![5, 10])]
    pub lambdas: Vec<u64>,
    #[arg(long = "lp", value_delimiter = ',', default_values_t = vec![8, 16])]
    pub lps: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    pub realizations: usize,
    #[arg(long, default_value_t = 0.8)]
    pub ratio: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub backend: BackendArgs,
    /// Records CSV path.
    #[arg(long)]
    pub out_records: Option<PathBuf>,
    /// Summary text path.
    #[arg(long)]
    pub out_summary: Option<PathBuf>,
    /// Dataset name in records; defaults to the input file stem.
    #[arg(long)]
    pub dataset_name: Option<String>,
}

#[derive(Debug, Args)]
pub struct EmitWcnfArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum)]
    pub model: ModelChoice,
    #[arg(short, default_value_t = 2)]
    pub k: usize,
    #[arg(short)]
    pub l: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub lambda: u64,
    #[arg(long, default_value_t = 16)]
    pub lp: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Which partition's instance to dump (earlier ones are solved first
    /// to build the carried-over state).
    #[arg(long, default_value_t = 0)]
    pub partition: usize,
    #[arg(long, value_enum, default_value_t = DialectChoice::Classic)]
    pub dialect: DialectChoice,
    #[arg(long)]
    pub out: PathBuf,
    /// Optional JSON dump of the named-variable map.
    #[arg(long)]
    pub out_vars: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveWcnfArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Numeric,
    Categorical,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value_t = GenKind::Numeric)]
    pub kind: GenKind,
    #[arg(short, long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 8)]
    pub features: usize,
    /// Categories per column (categorical kind).
    #[arg(long, default_value_t = 5)]
    pub alphabet: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Binarize(args) => cmd_binarize(args),
        Command::Train(args) => cmd_train(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Grid(args) => cmd_grid(args),
        Command::EmitWcnf(args) => cmd_emit_wcnf(args),
        Command::SolveWcnf(args) => cmd_solve_wcnf(args),
        Command::Gen(args) => cmd_gen(args),
    }
}

fn cmd_binarize(args: BinarizeArgs) -> Result<()> {
    let (table, overrides) = args.data.load()?;
    let binarizer = Binarizer::fit(&table, args.data.q, None, &overrides)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let ds = binarizer
        .transform(&table, None)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    println!(
        "{} rows × {} source features → {} binary features",
        ds.len(),
        table.columns.len() - 1,
        ds.num_features()
    );
    if let Some(path) = &args.out_matrix {
        io::write_matrix_csv(&ds, path)?;
        println!("matrix written to {}", path.display());
    }
    if let Some(path) = &args.out_labels {
        io::write_labels_json(&ds, path)?;
        println!("labels written to {}", path.display());
    }
    Ok(())
}

/// Splits (when ratio < 1), fits the binarizer on the training rows only,
/// and transforms both sides.
fn prepare_split(
    table: &RawTable,
    overrides: &BTreeMap<usize, FeatureKind>,
    q: usize,
    ratio: f64,
    seed: u64,
) -> Result<(BinaryDataset, Option<BinaryDataset>)> {
    if ratio >= 1.0 {
        let ds = Binarizer::fit(table, q, None, overrides)
            .and_then(|b| b.transform(table, None))
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        return Ok((ds, None));
    }
    let (train_idx, test_idx) =
        split_indices(table.len(), ratio, seed).map_err(|e| anyhow::anyhow!("{e}"))?;
    let binarizer = Binarizer::fit(table, q, Some(&train_idx), overrides)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let train = binarizer
        .transform(table, Some(&train_idx))
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let test = binarizer
        .transform(table, Some(&test_idx))
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    Ok((train, Some(test)))
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let (table, overrides) = args.data.load()?;
    let seed = resolve_seed(args.seed);
    let backend = args.backend.to_config(seed)?;
    let (train_ds, test_ds) =
        prepare_split(&table, &overrides, args.data.q, args.ratio, seed)?;

    let (rule_set, report) = match args.model {
        ModelChoice::Imli => {
            let params = ImliParams {
                rule_count: args.k,
                lambda: args.lambda,
                partition_size: args.lp,
                quantiles: args.data.q,
                seed,
                target_form: match args.form {
                    FormChoice::Dnf => RuleForm::Dnf,
                    FormChoice::Cnf => RuleForm::Cnf,
                },
            };
            let out = imli::train(&train_ds, &params, &backend)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            let report = format!(
                "{} partitions, final cost {}, {:.4}s",
                out.partition_count, out.final_cost, out.train_seconds
            );
            (out.rule_set, report)
        }
        ModelChoice::Imlib => {
            let params = ImlibParams {
                rule_count: args.k,
                rule_len: args.l.unwrap_or(2),
                lambda: args.lambda,
                partition_size: args.lp,
                quantiles: args.data.q,
                seed,
            };
            let out = imlib::train(&train_ds, &params, &backend)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            let report = format!(
                "{} partitions, final cost {}, {:.4}s",
                out.partition_count, out.final_cost, out.train_seconds
            );
            (out.rule_set, report)
        }
        ModelChoice::Sqfsat => {
            let k = args.k;
            let l = args
                .l
                .context("sqfsat needs -l (max features per rule)")?;
            match imlib::solve_sqfsat_exact(&train_ds, k, l, seed)
                .map_err(|e| anyhow::anyhow!("{e}"))?
            {
                Some(rs) => (rs, "exact mode".to_string()),
                None => {
                    bail!("infeasible: no set of {k} rules with ≤ {l} features each classifies every training sample correctly")
                }
            }
        }
    };

    println!("{}", format_ruleset(&rule_set));
    let m = metrics(&rule_set);
    println!(
        "rules: {}  |R|: {}  largest: {}  ({report})",
        m.rule_count, m.total_size, m.largest_rule
    );
    println!(
        "train accuracy: {:.4} (n={})",
        evaluate(&rule_set, &train_ds)?,
        train_ds.len()
    );
    if let Some(test) = &test_ds {
        println!(
            "test accuracy: {:.4} (n={})",
            evaluate(&rule_set, test)?,
            test.len()
        );
    }
    if let Some(path) = &args.out {
        io::save_model(&rule_set, path)?;
        println!("model written to {}", path.display());
    }
    Ok(())
}

fn cmd_predict(args: PredictArgs) -> Result<()> {
    let model = io::load_model(&args.model)?;
    let csv = io::read_csv(&args.input)?;
    let predictor = model
        .raw_predictor(&csv.columns)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut lines = Vec::with_capacity(csv.rows.len());
    for (i, row) in csv.rows.iter().enumerate() {
        let p = predictor.predict(row).map_err(|e| anyhow::anyhow!("{e}"))?;
        let label = if p {
            model.meta.positive_label.clone()
        } else {
            format!("not {}", model.meta.positive_label)
        };
        lines.push((i, u8::from(p), label));
    }
    match &args.out {
        Some(path) => {
            let mut w = csv::Writer::from_path(path)
                .with_context(|| format!("writing {}", path.display()))?;
            w.write_record(["row", "prediction", "label"])?;
            for (i, p, label) in &lines {
                w.write_record([i.to_string(), p.to_string(), label.clone()])?;
            }
            w.flush()?;
            println!("{} predictions written to {}", lines.len(), path.display());
        }
        None => {
            for (i, p, label) in &lines {
                println!("{i},{p},{label}");
            }
        }
    }
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let model = io::load_model(&args.model)?;
    let csv = io::read_csv(&args.input)?;
    let class_spec = args
        .class_col
        .clone()
        .unwrap_or_else(|| model.meta.class_name.clone());
    let class_column = io::resolve_column(&csv.columns, &class_spec)?;
    let predictor = model
        .raw_predictor(&csv.columns)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let positive = rulesat_core::dataset::Cell::parse(&model.meta.positive_label);
    let mut correct = 0usize;
    for row in &csv.rows {
        let predicted = predictor.predict(row).map_err(|e| anyhow::anyhow!("{e}"))?;
        let actual = row[class_column] == positive;
        correct += usize::from(predicted == actual);
    }
    if csv.rows.is_empty() {
        bail!("no rows to evaluate");
    }
    println!(
        "accuracy: {:.4} ({correct}/{} correct)",
        correct as f64 / csv.rows.len() as f64,
        csv.rows.len()
    );
    Ok(())
}

fn cmd_grid(args: GridArgs) -> Result<()> {
    let (table, overrides) = args.data.load()?;
    let dataset_name = args.dataset_name.clone().unwrap_or_else(|| {
        args.data
            .input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".to_string())
    });
    let seed = resolve_seed(args.seed);
    let cfg = ExperimentConfig {
        dataset_name,
        models: args
            .models
            .iter()
            .filter_map(|m| match m {
                ModelChoice::Imli => Some(ModelKind::Imli),
                ModelChoice::Imlib => Some(ModelKind::Imlib),
                ModelChoice::Sqfsat => None,
            })
            .collect(),
        ks: args.ks.clone(),
        lambdas: args.lambdas.clone(),
        lps: args.lps.clone(),
        realizations: args.realizations,
        ratio: args.ratio,
        quantiles: args.data.q,
        base_seed: seed,
        backend: args.backend.to_config(seed)?,
        overrides,
    };
    let out = harness::run_grid(&table, &cfg)?;
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    print!("{}", out.summary);
    if let Some(path) = &args.out_records {
        harness::write_records_csv(&out.records, path)?;
        println!("\n{} records written to {}", out.records.len(), path.display());
    }
    if let Some(path) = &args.out_summary {
        std::fs::write(path, &out.summary)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn cmd_emit_wcnf(args: EmitWcnfArgs) -> Result<()> {
    let (table, overrides) = args.data.load()?;
    let seed = resolve_seed(args.seed);
    let backend = BackendConfig::embedded(seed);
    let binarizer = Binarizer::fit(&table, args.data.q, None, &overrides)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let ds = binarizer
        .transform(&table, None)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let inst = match args.model {
        ModelChoice::Imli => {
            let params = ImliParams {
                rule_count: args.k,
                lambda: args.lambda,
                partition_size: args.lp,
                quantiles: args.data.q,
                seed,
                target_form: RuleForm::Dnf,
            };
            imli::partition_instance(&ds, &params, &backend, args.partition)
                .map_err(|e| anyhow::anyhow!("{e}"))?
        }
        ModelChoice::Imlib => {
            let params = ImlibParams {
                rule_count: args.k,
                rule_len: args.l.unwrap_or(2),
                lambda: args.lambda,
                partition_size: args.lp,
                quantiles: args.data.q,
                seed,
            };
            imlib::partition_instance(&ds, &params, &backend, args.partition)
                .map_err(|e| anyhow::anyhow!("{e}"))?
        }
        ModelChoice::Sqfsat => bail!("emit-wcnf supports imli and imlib"),
    };
    std::fs::write(&args.out, emit_wcnf(&inst, args.dialect.into()))
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!(
        "partition {} instance: {} vars, {} hard, {} soft → {}",
        args.partition,
        inst.num_vars,
        inst.hard.len(),
        inst.soft.len(),
        args.out.display()
    );
    if let Some(path) = &args.out_vars {
        let names: BTreeMap<&String, u32> = inst
            .names
            .iter()
            .map(|(tag, var)| (tag, var.number()))
            .collect();
        std::fs::write(path, serde_json::to_string_pretty(&names)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn cmd_solve_wcnf(args: SolveWcnfArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let inst = parse_wcnf(&text).map_err(|e| anyhow::anyhow!("{e}"))?;
    let result = solve(&inst, &BackendConfig::embedded(args.seed))
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    match result {
        SolveResult::HardUnsat => println!("s UNSATISFIABLE"),
        SolveResult::Optimal(sol) => {
            println!("o {}", sol.cost);
            println!("s OPTIMUM FOUND");
            let bits: String = sol
                .model
                .values()
                .iter()
                .map(|&b| if b { '1' } else { '0' })
                .collect();
            println!("v {bits}");
        }
    }
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let table = match args.kind {
        GenKind::Numeric => synth::numeric_table(args.n, args.features, args.seed),
        GenKind::Categorical => {
            synth::categorical_table(args.n, args.features, args.alphabet, args.seed)
        }
    };
    io::write_table_csv(&table, &args.out)?;
    println!(
        "{} rows × {} columns written to {}",
        table.len(),
        table.columns.len(),
        args.out.display()
    );
    Ok(())
}

