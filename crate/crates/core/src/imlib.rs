//! The IMLIB learner: DNF rule sets with a hard per-rule size cap, trained
//! incrementally over class-balanced partitions. Each rule has `l` slots;
//! every slot picks exactly one feature or the skip marker, a sign variable
//! gives the picked feature's polarity, and per-sample agreement/coverage
//! variables tie slot choices to classification. Soft units keep the rule
//! set small (weight 1) and penalize misclassification (weight λ).
//!
//! The same constraint set with every clause hard and no sparsity softs is
//! the exact mode: a single SAT call that either classifies every sample
//! correctly or reports infeasibility.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::dataset::{make_partitions, BinaryColumn, BinaryDataset};
use crate::imli::{Timer, TrainError, TrainOutcome};
use crate::maxsat::{self, BackendConfig, Model};
use crate::proplogic::{exactly_one, Literal, VarId, WcnfBuilder, WcnfInstance};
use crate::rules::{FeatureLiteral, ModelMeta, Rule, RuleForm, RuleSet};

/// Training parameters: `rule_count` rules of at most `rule_len` features.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImlibParams {
    /// Number of rules k.
    pub rule_count: usize,
    /// Maximum features per rule l.
    pub rule_len: usize,
    /// Misclassification weight λ.
    pub lambda: u64,
    /// Samples per partition.
    pub partition_size: usize,
    /// Quantile count used during binarization (provenance).
    pub quantiles: usize,
    pub seed: u64,
}

impl Default for ImlibParams {
    fn default() -> ImlibParams {
        ImlibParams {
            rule_count: 2,
            rule_len: 2,
            lambda: 10,
            partition_size: 16,
            quantiles: 4,
            seed: 0,
        }
    }
}

/// Variable layout of one partition instance. `choice[o][d][j]` puts feature
/// `j` into slot `d` of rule `o` (index `m` is the skip marker);
/// `sign[o][d]` the slot's polarity; `agree[o][d][i]` whether the slot does
/// not block sample `i`; `covers[o][i]` whether rule `o` accepts sample `i`.
/// Choice and sign persist across partitions, the rest are per-sample.
#[derive(Debug, Clone)]
pub struct ImlibVarMap {
    pub choice: Vec<Vec<Vec<VarId>>>,
    pub sign: Vec<Vec<VarId>>,
    pub agree: Vec<Vec<Vec<VarId>>>,
    pub covers: Vec<Vec<VarId>>,
}

/// Slot choices and polarities carried between partitions. Only the choice
/// polarities feed the next partition's soft units; signs ride along because
/// decoding needs them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImlibState {
    pub choice: Vec<Vec<Vec<bool>>>,
    pub sign: Vec<Vec<bool>>,
}

impl ImlibState {
    fn from_model(model: &Model, vars: &ImlibVarMap) -> ImlibState {
        ImlibState {
            choice: vars
                .choice
                .iter()
                .map(|rule| {
                    rule.iter()
                        .map(|slot| slot.iter().map(|&v| model.get(v)).collect())
                        .collect()
                })
                .collect(),
            sign: vars
                .sign
                .iter()
                .map(|rule| rule.iter().map(|&v| model.get(v)).collect())
                .collect(),
        }
    }
}

/// The literal stating that a slot's agreement variable matches a sample
/// bit: the agreement literal itself when the bit is 1, its negation when 0.
pub fn agreement_literal(bit: bool, agree: Literal) -> Literal {
    if bit {
        agree
    } else {
        !agree
    }
}

/// Soft-constraint shape for [`encode_with`].
enum SoftMode<'a> {
    /// Weighted learning: sparsity softs plus λ-weighted classification.
    Weighted {
        lambda: u64,
        prior: Option<&'a ImlibState>,
    },
    /// Everything hard: the exact SAT query.
    AllHard,
}

fn encode_with(
    rows: &[&[bool]],
    labels: &[bool],
    rule_count: usize,
    rule_len: usize,
    soft: SoftMode<'_>,
    keep_names: bool,
) -> (WcnfInstance, ImlibVarMap) {
    assert!(!rows.is_empty(), "partition must be non-empty");
    assert_eq!(rows.len(), labels.len());
    let m = rows[0].len();
    let (k, l, n) = (rule_count, rule_len, rows.len());
    let mut b = WcnfBuilder::new().keep_names(keep_names);

    let choice: Vec<Vec<Vec<VarId>>> = (0..k)
        .map(|o| {
            (0..l)
                .map(|d| {
                    (0..=m)
                        .map(|j| {
                            let v = b.fresh_var();
                            let tag = if j == m {
                                alloc::format!("choice_r{o}_s{d}_skip")
                            } else {
                                alloc::format!("choice_r{o}_s{d}_f{j}")
                            };
                            b.name(tag, v);
                            v
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let sign: Vec<Vec<VarId>> = (0..k)
        .map(|o| {
            (0..l)
                .map(|d| {
                    let v = b.fresh_var();
                    b.name(alloc::format!("sign_r{o}_s{d}"), v);
                    v
                })
                .collect()
        })
        .collect();
    let agree: Vec<Vec<Vec<VarId>>> = (0..k)
        .map(|o| {
            (0..l)
                .map(|d| {
                    (0..n)
                        .map(|i| {
                            let v = b.fresh_var();
                            b.name(alloc::format!("agree_r{o}_s{d}_i{i}"), v);
                            v
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let covers: Vec<Vec<VarId>> = (0..k)
        .map(|o| {
            (0..n)
                .map(|i| {
                    let v = b.fresh_var();
                    b.name(alloc::format!("covers_r{o}_i{i}"), v);
                    v
                })
                .collect()
        })
        .collect();

    // Each slot picks exactly one of {feature₁..feature_m, skip}.
    for rule in &choice {
        for slot in rule {
            let lits: Vec<Literal> = slot.iter().map(|&v| Literal::positive(v)).collect();
            b.add_hard_clauses(exactly_one(&lits).expect("distinct fresh vars"));
        }
    }
    // Each rule keeps at least one real feature.
    for rule in &choice {
        b.add_hard(
            rule.iter()
                .map(|slot| Literal::negative(slot[m]))
                .collect(),
        );
    }
    // A chosen feature constrains agreement to the sample bit; a skipped
    // slot never blocks.
    for o in 0..k {
        for d in 0..l {
            let sign_lit = Literal::positive(sign[o][d]);
            for (i, row) in rows.iter().enumerate() {
                let agree_lit = Literal::positive(agree[o][d][i]);
                for (j, &bit) in row.iter().enumerate() {
                    let pick = Literal::negative(choice[o][d][j]);
                    let s = agreement_literal(bit, agree_lit);
                    b.add_hard(alloc::vec![pick, !sign_lit, s]);
                    b.add_hard(alloc::vec![pick, sign_lit, !s]);
                }
                b.add_hard(alloc::vec![
                    Literal::negative(choice[o][d][m]),
                    agree_lit
                ]);
            }
        }
    }
    // Coverage is the conjunction of a rule's agreements.
    for o in 0..k {
        for i in 0..n {
            let z = Literal::positive(covers[o][i]);
            let mut long = Vec::with_capacity(l + 1);
            long.push(z);
            for d in 0..l {
                let e = Literal::positive(agree[o][d][i]);
                b.add_hard(alloc::vec![!z, e]);
                long.push(!e);
            }
            b.add_hard(long);
        }
    }

    let (h_weight, sparsity) = match soft {
        SoftMode::Weighted { lambda, prior } => {
            // Sparsity softs: pull every slot toward skip on the first
            // partition, toward the previous polarities afterwards.
            for (o, rule) in choice.iter().enumerate() {
                for (d, slot) in rule.iter().enumerate() {
                    for (j, &v) in slot.iter().enumerate() {
                        let keep_true = match prior {
                            Some(p) => p.choice[o][d][j],
                            None => j == m, // prefer skip, avoid features
                        };
                        b.add_soft(alloc::vec![Literal::new(v, keep_true)], 1);
                    }
                }
            }
            (Some(lambda), true)
        }
        SoftMode::AllHard => (None, false),
    };
    let _ = sparsity;

    // Classification: every positive sample covered by some rule, no
    // negative sample covered by any rule.
    for (i, &label) in labels.iter().enumerate() {
        if label {
            let clause: Vec<Literal> =
                (0..k).map(|o| Literal::positive(covers[o][i])).collect();
            match h_weight {
                Some(w) => b.add_soft(clause, w),
                None => b.add_hard(clause),
            }
        } else {
            for o in 0..k {
                let unit = alloc::vec![Literal::negative(covers[o][i])];
                match h_weight {
                    Some(w) => b.add_soft(unit, w),
                    None => b.add_hard(unit),
                }
            }
        }
    }

    (
        b.finish(),
        ImlibVarMap {
            choice,
            sign,
            agree,
            covers,
        },
    )
}

/// Encodes one weighted partition, see the module docs.
pub fn encode_partition(
    rows: &[&[bool]],
    labels: &[bool],
    params: &ImlibParams,
    prior: Option<&ImlibState>,
    keep_names: bool,
) -> (WcnfInstance, ImlibVarMap) {
    encode_with(
        rows,
        labels,
        params.rule_count,
        params.rule_len,
        SoftMode::Weighted {
            lambda: params.lambda,
            prior,
        },
        keep_names,
    )
}

/// Reads the DNF rules out of slot choices: a skipped slot contributes
/// nothing, a feature slot contributes the feature with the slot's sign.
/// Panics if a slot violates the exactly-one invariant, which means the
/// encoder and solver disagree.
pub fn decode_dnf_rules(state: &ImlibState, columns: &[BinaryColumn]) -> Vec<Rule> {
    let m = columns.len();
    state
        .choice
        .iter()
        .zip(&state.sign)
        .map(|(slots, signs)| {
            let mut lits = Vec::new();
            for (slot, &positive) in slots.iter().zip(signs) {
                let chosen: Vec<usize> =
                    (0..=m).filter(|&j| slot[j]).collect();
                assert_eq!(
                    chosen.len(),
                    1,
                    "slot must pick exactly one feature or skip"
                );
                let j = chosen[0];
                if j < m {
                    lits.push(FeatureLiteral::from_column(j, &columns[j], positive));
                }
            }
            Rule::new(lits)
        })
        .collect()
}

/// Runs the incremental loop and decodes a DNF rule set directly. The size
/// cap is a hard guarantee: every decoded rule has between 1 and `rule_len`
/// literals before reduction.
pub fn train(
    ds: &BinaryDataset,
    params: &ImlibParams,
    backend: &BackendConfig,
) -> Result<TrainOutcome, TrainError> {
    check_params(ds, params)?;
    let plan = make_partitions(ds, params.partition_size, params.seed)?;
    let timer = Timer::start();
    let mut state: Option<ImlibState> = None;
    let mut final_cost = 0;
    for part in &plan.parts {
        let rows: Vec<&[bool]> = part.iter().map(|&i| ds.rows[i].as_slice()).collect();
        let labels: Vec<bool> = part.iter().map(|&i| ds.labels[i]).collect();
        let (inst, vars) = encode_partition(&rows, &labels, params, state.as_ref(), false);
        let sol = maxsat::solve(&inst, backend)?
            .optimal()
            .ok_or(TrainError::InternalUnsat)?;
        state = Some(ImlibState::from_model(&sol.model, &vars));
        final_cost = sol.cost;
    }

    let state = state.expect("at least one partition");
    let mut pre_reduction =
        RuleSet::new(RuleForm::Dnf, decode_dnf_rules(&state, &ds.columns));
    pre_reduction.meta = meta_for(ds, params);
    for rule in &pre_reduction.rules {
        assert!(
            !rule.is_empty() && rule.len() <= params.rule_len,
            "decoded rule size {} outside 1..={}",
            rule.len(),
            params.rule_len
        );
    }
    let mut rule_set = crate::rules::reduce_redundancy(&pre_reduction);
    let train_seconds = timer.elapsed();
    rule_set.meta.train_seconds = train_seconds;
    pre_reduction.meta.train_seconds = train_seconds;

    Ok(TrainOutcome {
        rule_set,
        pre_reduction,
        train_seconds,
        partition_count: plan.parts.len(),
        final_cost,
    })
}

/// Encodes partition `index` exactly as the training loop would see it,
/// solving the earlier partitions to obtain the prior.
pub fn partition_instance(
    ds: &BinaryDataset,
    params: &ImlibParams,
    backend: &BackendConfig,
    index: usize,
) -> Result<WcnfInstance, TrainError> {
    check_params(ds, params)?;
    let plan = make_partitions(ds, params.partition_size, params.seed)?;
    assert!(index < plan.parts.len(), "partition index out of range");
    let mut state: Option<ImlibState> = None;
    for (t, part) in plan.parts.iter().enumerate().take(index + 1) {
        let rows: Vec<&[bool]> = part.iter().map(|&i| ds.rows[i].as_slice()).collect();
        let labels: Vec<bool> = part.iter().map(|&i| ds.labels[i]).collect();
        let (inst, vars) = encode_partition(&rows, &labels, params, state.as_ref(), t == index);
        if t == index {
            return Ok(inst);
        }
        let sol = maxsat::solve(&inst, backend)?
            .optimal()
            .ok_or(TrainError::InternalUnsat)?;
        state = Some(ImlibState::from_model(&sol.model, &vars));
    }
    unreachable!("loop returns at the requested partition")
}

/// The exact mode: all constraints hard, one SAT call on the full dataset.
/// Returns a rule set classifying every sample correctly, or `None` when no
/// such set of `rule_count` rules with `rule_len` features each exists.
pub fn solve_sqfsat_exact(
    ds: &BinaryDataset,
    rule_count: usize,
    rule_len: usize,
    seed: u64,
) -> Result<Option<RuleSet>, TrainError> {
    if rule_count == 0 || rule_len == 0 || rule_len > ds.num_features() {
        return Err(TrainError::BadParams(alloc::format!(
            "need 1 ≤ l ≤ m and k ≥ 1 (got k={rule_count}, l={rule_len}, m={})",
            ds.num_features()
        )));
    }
    let rows: Vec<&[bool]> = ds.rows.iter().map(|r| r.as_slice()).collect();
    let (inst, vars) = encode_with(
        &rows,
        &ds.labels,
        rule_count,
        rule_len,
        SoftMode::AllHard,
        false,
    );
    let Some(model) = maxsat::solve_sat(inst.num_vars, &inst.hard, seed) else {
        return Ok(None);
    };
    let state = ImlibState::from_model(&model, &vars);
    let mut rs = RuleSet::new(RuleForm::Dnf, decode_dnf_rules(&state, &ds.columns));
    rs.meta = ModelMeta {
        learner: String::from("sqfsat"),
        k: rule_count,
        l: Some(rule_len),
        lambda: None,
        lp: None,
        q: None,
        seed,
        train_seconds: 0.0,
        class_name: ds.class_name.clone(),
        positive_label: ds.positive_label.to_string(),
    };
    Ok(Some(rs))
}

fn check_params(ds: &BinaryDataset, params: &ImlibParams) -> Result<(), TrainError> {
    if params.rule_count == 0
        || params.rule_len == 0
        || params.rule_len > ds.num_features()
        || params.lambda == 0
    {
        return Err(TrainError::BadParams(alloc::format!(
            "need k ≥ 1, λ ≥ 1, 1 ≤ l ≤ m (got k={}, λ={}, l={}, m={})",
            params.rule_count,
            params.lambda,
            params.rule_len,
            ds.num_features()
        )));
    }
    Ok(())
}

fn meta_for(ds: &BinaryDataset, params: &ImlibParams) -> ModelMeta {
    ModelMeta {
        learner: String::from("imlib"),
        k: params.rule_count,
        l: Some(params.rule_len),
        lambda: Some(params.lambda),
        lp: Some(params.partition_size),
        q: Some(params.quantiles),
        seed: params.seed,
        train_seconds: 0.0,
        class_name: ds.class_name.clone(),
        positive_label: ds.positive_label.to_string(),
    }
}
