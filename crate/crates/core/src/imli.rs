//! The IMLI learner: encodes each training partition as a weighted MaxSAT
//! instance over rule-membership selector variables, carries the learned
//! polarities forward partition by partition as weight-1 soft units, and
//! decodes the final assignment into a CNF rule set. DNF models come from
//! training against the complemented labels and negating the decoded set.
//!
//! For a partition of samples the instance has, per sample, a soft unit
//! "classified correctly" of weight λ and hard clauses tying that unit to
//! the decoded semantics; plus one weight-1 soft unit per selector variable
//! pulling toward sparse rule sets (first partition) or toward the previous
//! partition's rule set (later partitions).

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::dataset::{make_partitions, BinaryDataset, DatasetError};
use crate::maxsat::{self, BackendConfig, Model, SolveError};
use crate::proplogic::{Formula, Literal, VarId, WcnfBuilder, WcnfInstance};
use crate::rules::{FeatureLiteral, ModelMeta, Rule, RuleForm, RuleSet};

/// Training parameters. `quantiles` is carried for provenance only; the
/// learner itself consumes an already-binarized dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImliParams {
    /// Number of rules k.
    pub rule_count: usize,
    /// Misclassification weight λ.
    pub lambda: u64,
    /// Samples per partition.
    pub partition_size: usize,
    /// Quantile count used during binarization.
    pub quantiles: usize,
    pub seed: u64,
    pub target_form: RuleForm,
}

impl Default for ImliParams {
    fn default() -> ImliParams {
        ImliParams {
            rule_count: 2,
            lambda: 10,
            partition_size: 16,
            quantiles: 4,
            seed: 0,
            target_form: RuleForm::Dnf,
        }
    }
}

/// Variable layout of one partition instance: `selectors[o][v]` decides
/// whether feature `v` (its complement for `v ≥ m`) joins rule `o`;
/// `miss[i]` marks sample `i` as misclassified. Selector variables persist
/// across partitions, the per-sample variables are partition-local.
#[derive(Debug, Clone)]
pub struct ImliVarMap {
    pub selectors: Vec<Vec<VarId>>,
    pub miss: Vec<VarId>,
}

/// Selector polarities carried between partitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImliState {
    /// `selected[o][v]` over k × 2m.
    pub selected: Vec<Vec<bool>>,
}

impl ImliState {
    fn from_model(model: &Model, vars: &ImliVarMap) -> ImliState {
        ImliState {
            selected: vars
                .selectors
                .iter()
                .map(|row| row.iter().map(|&v| model.get(v)).collect())
                .collect(),
        }
    }
}

/// A sample row concatenated with its complement: the first m bits are the
/// sample, the last m their negation. The result always has exactly m ones.
pub fn concat_with_negation(row: &[bool]) -> Vec<bool> {
    row.iter().copied().chain(row.iter().map(|&b| !b)).collect()
}

/// The disjunction selecting, from one rule's selector variables, exactly
/// those at positions where the concatenated sample has a 1 — the clause
/// shape stating "rule o accepts sample i". All-zero input gives the empty
/// disjunction, i.e. false.
pub fn amp_disjunction(concat: &[bool], selectors: &[VarId]) -> Formula {
    assert_eq!(
        concat.len(),
        selectors.len(),
        "sample/selector width mismatch"
    );
    let lits: Vec<Formula> = concat
        .iter()
        .zip(selectors)
        .filter_map(|(&bit, &v)| bit.then(|| Formula::var(v)))
        .collect();
    if lits.is_empty() {
        Formula::ConstFalse
    } else {
        Formula::Or(lits)
    }
}

/// Encodes one partition. With no prior state the selector softs pull every
/// selector low; with prior state they pull toward the previous polarities.
/// Misclassification softs weigh λ per sample.
pub fn encode_partition(
    rows: &[&[bool]],
    labels: &[bool],
    params: &ImliParams,
    prior: Option<&ImliState>,
    keep_names: bool,
) -> (WcnfInstance, ImliVarMap) {
    assert!(!rows.is_empty(), "partition must be non-empty");
    assert_eq!(rows.len(), labels.len());
    let m = rows[0].len();
    let k = params.rule_count;
    let mut b = WcnfBuilder::new().keep_names(keep_names);

    let selectors: Vec<Vec<VarId>> = (0..k)
        .map(|o| {
            (0..2 * m)
                .map(|v| {
                    let var = b.fresh_var();
                    b.name(alloc::format!("select_r{o}_v{v}"), var);
                    var
                })
                .collect()
        })
        .collect();
    let miss: Vec<VarId> = (0..rows.len())
        .map(|i| {
            let var = b.fresh_var();
            b.name(alloc::format!("miss_{i}"), var);
            var
        })
        .collect();

    // Selector softs, weight 1: polarity all-negative on the first
    // partition, matching the prior afterwards.
    for (o, row) in selectors.iter().enumerate() {
        for (v, &var) in row.iter().enumerate() {
            let keep_true = prior.is_some_and(|p| p.selected[o][v]);
            b.add_soft(
                alloc::vec![Literal::new(var, keep_true)],
                1,
            );
        }
    }
    // Misclassification softs, weight λ.
    for &var in &miss {
        b.add_soft(alloc::vec![Literal::negative(var)], params.lambda);
    }

    // Hard semantics: unless a sample is marked missed, its label must
    // equal the conjunction over rules of the selector disjunctions.
    for (i, (&row, &label)) in rows.iter().zip(labels).enumerate() {
        let concat = concat_with_negation(row);
        let ones: Vec<usize> = (0..2 * m).filter(|&v| concat[v]).collect();
        let miss_lit = Literal::positive(miss[i]);
        if label {
            // miss ∨ (selector disjunction), one clause per rule.
            for sel_row in &selectors {
                let mut lits = Vec::with_capacity(ones.len() + 1);
                lits.push(miss_lit);
                lits.extend(ones.iter().map(|&v| Literal::positive(sel_row[v])));
                b.add_hard(lits);
            }
        } else {
            // miss ∨ ¬accept₁ ∨ … ∨ ¬accept_k with accept_o reified one-way:
            // any selected matching feature forces accept_o.
            let mut clause = Vec::with_capacity(k + 1);
            clause.push(miss_lit);
            for (o, sel_row) in selectors.iter().enumerate() {
                let accept = b.fresh_var();
                b.name(alloc::format!("accept_{i}_r{o}"), accept);
                for &v in &ones {
                    b.add_hard(alloc::vec![
                        Literal::negative(sel_row[v]),
                        Literal::positive(accept),
                    ]);
                }
                clause.push(Literal::negative(accept));
            }
            b.add_hard(clause);
        }
    }

    (b.finish(), ImliVarMap { selectors, miss })
}

/// Reads the CNF rule set out of a selector assignment: rule `o` contains
/// feature `v` positively for a true selector with `v < m` and feature
/// `v − m` negatively for `v ≥ m`. Empty clauses are retained.
pub fn decode_cnf_rules(
    state: &ImliState,
    columns: &[crate::dataset::BinaryColumn],
) -> Vec<Rule> {
    let m = columns.len();
    state
        .selected
        .iter()
        .map(|row| {
            let mut lits = Vec::new();
            for (v, &on) in row.iter().enumerate() {
                if !on {
                    continue;
                }
                let (col, positive) = if v < m { (v, true) } else { (v - m, false) };
                lits.push(FeatureLiteral::from_column(col, &columns[col], positive));
            }
            Rule::new(lits)
        })
        .collect()
}

/// Errors surfaced by the training loops.
#[derive(Debug, Clone, PartialEq)]
pub enum TrainError {
    Dataset(DatasetError),
    Solver(SolveError),
    BadParams(String),
    /// The solver reported the hard clauses unsatisfiable, which a
    /// well-formed encoding cannot produce.
    InternalUnsat,
}

impl fmt::Display for TrainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrainError::Dataset(e) => write!(f, "dataset error: {e}"),
            TrainError::Solver(e) => write!(f, "solver error: {e}"),
            TrainError::BadParams(msg) => write!(f, "bad parameters: {msg}"),
            TrainError::InternalUnsat => {
                write!(f, "internal error: partition encoding was unsatisfiable")
            }
        }
    }
}

impl core::error::Error for TrainError {}

impl From<DatasetError> for TrainError {
    fn from(e: DatasetError) -> TrainError {
        TrainError::Dataset(e)
    }
}

impl From<SolveError> for TrainError {
    fn from(e: SolveError) -> TrainError {
        TrainError::Solver(e)
    }
}

/// A trained model together with its pre-reduction form and timing.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub rule_set: RuleSet,
    /// The decoded set before redundancy reduction.
    pub pre_reduction: RuleSet,
    /// Encode + solve + decode time; 0 when built without `std`.
    pub train_seconds: f64,
    pub partition_count: usize,
    /// Optimal cost of the final partition's instance.
    pub final_cost: u64,
}

/// Runs the incremental loop: partition the data, solve one instance per
/// partition carrying selector polarities forward, decode, and (for DNF)
/// negate and reduce. Redundancy reduction runs once, after the final
/// partition.
pub fn train(
    ds: &BinaryDataset,
    params: &ImliParams,
    backend: &BackendConfig,
) -> Result<TrainOutcome, TrainError> {
    let run = run_partitions(ds, params, backend)?;
    let timer = Timer::start();

    let mut cnf = RuleSet::new(
        RuleForm::Cnf,
        decode_cnf_rules(&run.state, &ds.columns),
    );
    cnf.meta = meta_for(ds, params);
    let (pre_reduction, rule_set) = match params.target_form {
        RuleForm::Dnf => {
            let dnf = cnf.negated();
            (dnf.clone(), crate::rules::reduce_redundancy(&dnf))
        }
        RuleForm::Cnf => (cnf.clone(), cnf),
    };
    let train_seconds = run.solve_seconds + timer.elapsed();
    let mut rule_set = rule_set;
    let mut pre_reduction = pre_reduction;
    rule_set.meta.train_seconds = train_seconds;
    pre_reduction.meta.train_seconds = train_seconds;

    Ok(TrainOutcome {
        rule_set,
        pre_reduction,
        train_seconds,
        partition_count: run.partition_count,
        final_cost: run.final_cost,
    })
}

/// Encodes partition `index` exactly as the training loop would see it,
/// solving the earlier partitions to obtain the prior. Used for dumping
/// instances to WCNF.
pub fn partition_instance(
    ds: &BinaryDataset,
    params: &ImliParams,
    backend: &BackendConfig,
    index: usize,
) -> Result<WcnfInstance, TrainError> {
    let plan = make_partitions(ds, params.partition_size, params.seed)?;
    assert!(index < plan.parts.len(), "partition index out of range");
    let flip = params.target_form == RuleForm::Dnf;
    let mut state: Option<ImliState> = None;
    for (t, part) in plan.parts.iter().enumerate().take(index + 1) {
        let rows: Vec<&[bool]> = part.iter().map(|&i| ds.rows[i].as_slice()).collect();
        let labels: Vec<bool> = part.iter().map(|&i| ds.labels[i] != flip).collect();
        let (inst, vars) = encode_partition(&rows, &labels, params, state.as_ref(), t == index);
        if t == index {
            return Ok(inst);
        }
        let sol = maxsat::solve(&inst, backend)?
            .optimal()
            .ok_or(TrainError::InternalUnsat)?;
        state = Some(ImliState::from_model(&sol.model, &vars));
    }
    unreachable!("loop returns at the requested partition")
}

struct PartitionRun {
    state: ImliState,
    partition_count: usize,
    final_cost: u64,
    solve_seconds: f64,
}

fn run_partitions(
    ds: &BinaryDataset,
    params: &ImliParams,
    backend: &BackendConfig,
) -> Result<PartitionRun, TrainError> {
    let plan = make_partitions(ds, params.partition_size, params.seed)?;
    let flip = params.target_form == RuleForm::Dnf;
    let timer = Timer::start();
    let mut state: Option<ImliState> = None;
    let mut final_cost = 0;
    let mut solved = 0;
    for part in &plan.parts {
        let rows: Vec<&[bool]> = part.iter().map(|&i| ds.rows[i].as_slice()).collect();
        let labels: Vec<bool> = part.iter().map(|&i| ds.labels[i] != flip).collect();
        let (inst, vars) = encode_partition(&rows, &labels, params, state.as_ref(), false);
        let sol = maxsat::solve(&inst, backend)?
            .optimal()
            .ok_or(TrainError::InternalUnsat)?;
        state = Some(ImliState::from_model(&sol.model, &vars));
        final_cost = sol.cost;
        solved += 1;
    }
    Ok(PartitionRun {
        state: state.expect("at least one partition"),
        partition_count: solved,
        final_cost,
        solve_seconds: timer.elapsed(),
    })
}

fn meta_for(ds: &BinaryDataset, params: &ImliParams) -> ModelMeta {
    ModelMeta {
        learner: String::from("imli"),
        k: params.rule_count,
        l: None,
        lambda: Some(params.lambda),
        lp: Some(params.partition_size),
        q: Some(params.quantiles),
        seed: params.seed,
        train_seconds: 0.0,
        class_name: ds.class_name.clone(),
        positive_label: ds.positive_label.to_string(),
    }
}

/// Wall clock under `std`, a zero-duration stub otherwise.
pub(crate) struct Timer {
    #[cfg(feature = "std")]
    start: std::time::Instant,
}

impl Timer {
    pub(crate) fn start() -> Timer {
        Timer {
            #[cfg(feature = "std")]
            start: std::time::Instant::now(),
        }
    }

    pub(crate) fn elapsed(&self) -> f64 {
        #[cfg(feature = "std")]
        {
            self.start.elapsed().as_secs_f64()
        }
        #[cfg(not(feature = "std"))]
        {
            0.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{BinaryColumn, ColumnTest};
    use alloc::vec;

    fn bits(pattern: &[u8]) -> Vec<bool> {
        pattern.iter().map(|&b| b == 1).collect()
    }

    pub(crate) fn toy_dataset(rows: &[&[u8]], labels: &[u8]) -> BinaryDataset {
        let m = rows[0].len();
        BinaryDataset {
            columns: (0..m)
                .map(|j| {
                    BinaryColumn::new(
                        j,
                        alloc::format!("f{j}"),
                        ColumnTest::Is("1".to_string()),
                    )
                })
                .collect(),
            rows: rows.iter().map(|r| bits(r)).collect(),
            labels: labels.iter().map(|&y| y == 1).collect(),
            class_name: "class".to_string(),
            positive_label: "1".to_string(),
        }
    }

    #[test]
    fn concat_appends_complement() {
        assert_eq!(
            concat_with_negation(&bits(&[1, 0, 0])),
            bits(&[1, 0, 0, 0, 1, 1])
        );
        assert_eq!(concat_with_negation(&bits(&[0, 0])), bits(&[0, 0, 1, 1]));
        for pattern in [&[1, 1, 0][..], &[0, 1, 0], &[1, 1, 1]] {
            let c = concat_with_negation(&bits(pattern));
            assert_eq!(c.iter().filter(|&&b| b).count(), pattern.len());
        }
    }

    #[test]
    fn amp_selects_one_positions() {
        let vars: Vec<VarId> = (1..=6).map(VarId::new).collect();
        let f = amp_disjunction(&bits(&[1, 0, 0, 0, 1, 1]), &vars);
        assert_eq!(
            f,
            Formula::Or(vec![
                Formula::var(VarId::new(1)),
                Formula::var(VarId::new(5)),
                Formula::var(VarId::new(6)),
            ])
        );
        assert_eq!(amp_disjunction(&[], &[]), Formula::ConstFalse);
        let all = amp_disjunction(&bits(&[1, 1]), &vars[..2]);
        assert_eq!(
            all,
            Formula::Or(vec![
                Formula::var(VarId::new(1)),
                Formula::var(VarId::new(2))
            ])
        );
    }

    #[test]
    fn first_partition_soft_count_is_n_plus_2mk() {
        let ds = toy_dataset(&[&[1, 0, 1], &[0, 1, 0], &[1, 1, 1]], &[1, 0, 1]);
        let params = ImliParams {
            rule_count: 2,
            ..ImliParams::default()
        };
        let rows: Vec<&[bool]> = ds.rows.iter().map(|r| r.as_slice()).collect();
        let (inst, _) = encode_partition(&rows, &ds.labels, &params, None, false);
        assert_eq!(inst.soft.len(), 3 + 2 * 3 * 2);
    }

    #[test]
    fn prior_polarity_flips_selector_softs() {
        let ds = toy_dataset(&[&[1, 0]], &[1]);
        let params = ImliParams {
            rule_count: 1,
            ..ImliParams::default()
        };
        let rows: Vec<&[bool]> = ds.rows.iter().map(|r| r.as_slice()).collect();
        let prior = ImliState {
            selected: vec![bits(&[1, 0, 0, 0])],
        };
        let (inst, vars) = encode_partition(&rows, &ds.labels, &params, Some(&prior), false);
        let first_selector = Literal::positive(vars.selectors[0][0]);
        assert!(inst
            .soft
            .iter()
            .any(|s| s.clause.lits() == [first_selector] && s.weight == 1));
    }

    #[test]
    fn empty_rule_forces_miss_on_positive_sample() {
        // With every selector forced low, a positive-label sample can only
        // satisfy the hard clauses by taking the miss penalty.
        let ds = toy_dataset(&[&[1, 0]], &[1]);
        let params = ImliParams {
            rule_count: 1,
            target_form: RuleForm::Cnf,
            ..ImliParams::default()
        };
        let rows: Vec<&[bool]> = ds.rows.iter().map(|r| r.as_slice()).collect();
        let (inst, vars) = encode_partition(&rows, &ds.labels, &params, None, false);
        let n = inst.num_vars as usize;
        for assignment in 0u32..1 << n {
            let values: Vec<bool> = (0..n).map(|i| assignment >> i & 1 == 1).collect();
            if !inst.hard_satisfied_by(&values) {
                continue;
            }
            let all_low = vars.selectors[0]
                .iter()
                .all(|&v| !values[v.index()]);
            if all_low {
                assert!(values[vars.miss[0].index()]);
            }
        }
    }

    #[test]
    fn decode_reads_positive_and_negated_features() {
        let ds = toy_dataset(&[&[1, 0, 0]], &[1]);
        let state = ImliState {
            selected: vec![bits(&[1, 0, 0, 0, 1, 0])], // x¹ and ¬x²
        };
        let rules = decode_cnf_rules(&state, &ds.columns);
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].len(), 2);
        assert_eq!(rules[0].literals[0].column, 0);
        assert!(rules[0].literals[0].positive);
        assert_eq!(rules[0].literals[1].column, 1);
        assert!(!rules[0].literals[1].positive);

        let empty = ImliState {
            selected: vec![bits(&[0, 0, 0, 0, 0, 0]), bits(&[0, 0, 0, 0, 0, 0])],
        };
        let rules = decode_cnf_rules(&empty, &ds.columns);
        assert_eq!(rules.len(), 2);
        assert!(rules.iter().all(Rule::is_empty));
    }

    #[test]
    fn separable_toy_set_trains_to_perfection() {
        // Positive iff f0 is set; λ high enough that no error is tolerated.
        let ds = toy_dataset(
            &[
                &[1, 0, 1],
                &[1, 1, 0],
                &[1, 1, 1],
                &[1, 0, 0],
                &[0, 0, 1],
                &[0, 1, 0],
                &[0, 1, 1],
                &[0, 0, 0],
            ],
            &[1, 1, 1, 1, 0, 0, 0, 0],
        );
        let params = ImliParams {
            rule_count: 1,
            lambda: 1_000_000,
            partition_size: 8,
            seed: 3,
            ..ImliParams::default()
        };
        let out = train(&ds, &params, &BackendConfig::default()).unwrap();
        assert_eq!(out.partition_count, 1);
        for (row, &label) in ds.rows.iter().zip(&ds.labels) {
            assert_eq!(out.rule_set.apply(row), label);
        }
    }

    #[test]
    fn same_seed_same_rules() {
        let ds = toy_dataset(
            &[&[1, 0], &[0, 1], &[1, 1], &[0, 0], &[1, 0], &[0, 1]],
            &[1, 0, 1, 0, 1, 0],
        );
        let params = ImliParams {
            rule_count: 2,
            lambda: 5,
            partition_size: 3,
            seed: 11,
            ..ImliParams::default()
        };
        let a = train(&ds, &params, &BackendConfig::default()).unwrap();
        let b = train(&ds, &params, &BackendConfig::default()).unwrap();
        assert_eq!(
            crate::rules::format_ruleset(&a.rule_set),
            crate::rules::format_ruleset(&b.rule_set)
        );
    }
}
