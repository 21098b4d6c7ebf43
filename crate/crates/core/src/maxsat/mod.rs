//! Optimal weighted partial MaxSAT solving.
//!
//! The embedded backend runs a linear SAT–UNSAT search on top of the CDCL
//! engine in [`crate::sat`]: relax each soft clause with a selector literal,
//! find any model, then repeatedly forbid the current cost with a weighted
//! sequential counter until the instance becomes unsatisfiable. The last
//! model found is optimal.
//!
//! Returned assignments are verified, never trusted: hard clauses are
//! re-checked and the cost is recomputed from the instance before a result is
//! surfaced. [`solve_brute_force`] enumerates every assignment and exists as
//! the testing oracle.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::proplogic::{Clause, Literal, VarId, WcnfInstance};
use crate::sat::Solver;

mod wcnf;
pub use wcnf::{emit_wcnf, parse_external_result, parse_wcnf, WcnfParseError};

#[cfg(feature = "std")]
mod external;

/// A total assignment over an instance's variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model(Vec<bool>);

impl Model {
    pub fn from_values(values: Vec<bool>) -> Model {
        Model(values)
    }

    pub fn get(&self, var: VarId) -> bool {
        self.0[var.index()]
    }

    /// Raw values indexed by [`VarId::index`].
    pub fn values(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// An optimal solution: the model and the total weight of falsified soft
/// clauses. `reported_cost` is set when an external solver claimed a
/// different cost than recomputation gives; the recomputed value wins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub model: Model,
    pub cost: u64,
    pub reported_cost: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    Optimal(Solution),
    /// The hard clauses alone are unsatisfiable.
    HardUnsat,
}

impl SolveResult {
    pub fn optimal(self) -> Option<Solution> {
        match self {
            SolveResult::Optimal(s) => Some(s),
            SolveResult::HardUnsat => None,
        }
    }
}

/// WCNF text dialects, see [`emit_wcnf`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WcnfDialect {
    /// `p wcnf <vars> <clauses> <top>` header; hard clauses carry the top
    /// weight.
    #[default]
    Classic,
    /// Headerless 2022 MaxSAT-Evaluation format; hard clauses start with `h`.
    Mse22,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Backend {
    /// The in-process engine. The seed steers branching tie-breaks; a fixed
    /// seed on a fixed instance reproduces the exact assignment.
    Embedded { seed: u64 },
    /// Run `command` on a WCNF file. `{instance}` in the command is replaced
    /// by the file path (appended when absent); stdout must follow MaxSAT-
    /// Evaluation output conventions.
    External { command: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackendConfig {
    pub backend: Backend,
    pub dialect: WcnfDialect,
    pub time_limit_secs: Option<u64>,
}

impl Default for BackendConfig {
    fn default() -> BackendConfig {
        BackendConfig {
            backend: Backend::Embedded { seed: 0 },
            dialect: WcnfDialect::Classic,
            time_limit_secs: None,
        }
    }
}

impl BackendConfig {
    pub fn embedded(seed: u64) -> BackendConfig {
        BackendConfig {
            backend: Backend::Embedded { seed },
            ..BackendConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveError {
    /// The external process could not be started or exited abnormally.
    ExternalLaunch(String),
    /// The external process exceeded the configured time limit.
    ExternalTimeout(u64),
    /// The external process produced output we cannot interpret, or an
    /// assignment that violates the hard clauses.
    MalformedOutput(String),
    /// An external backend was requested but the crate was built without
    /// `std`.
    ExternalUnsupported,
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::ExternalLaunch(msg) => write!(f, "external solver failed: {msg}"),
            SolveError::ExternalTimeout(s) => {
                write!(f, "external solver exceeded time limit of {s}s")
            }
            SolveError::MalformedOutput(msg) => {
                write!(f, "unusable external solver output: {msg}")
            }
            SolveError::ExternalUnsupported => {
                write!(f, "external solver backends require the `std` feature")
            }
        }
    }
}

impl core::error::Error for SolveError {}

/// Solves the instance optimally with the configured backend. Whatever the
/// backend claims, the returned assignment satisfies every hard clause and
/// `cost` equals the recomputed falsified soft weight.
pub fn solve(inst: &WcnfInstance, cfg: &BackendConfig) -> Result<SolveResult, SolveError> {
    solve_with_warm(inst, cfg, None)
}

/// Like [`solve`], with an optional warm-start assignment over the
/// instance's variables (auxiliaries will be reconstructed). A hard-feasible
/// warm start seeds the embedded search's upper bound, which keeps the cost
/// counter small; an infeasible one is ignored. External backends make no
/// use of it.
pub fn solve_with_warm(
    inst: &WcnfInstance,
    cfg: &BackendConfig,
    warm: Option<&[bool]>,
) -> Result<SolveResult, SolveError> {
    debug_assert!(inst.is_well_formed());
    let result = match &cfg.backend {
        Backend::Embedded { seed } => solve_embedded_warm(inst, *seed, warm),
        Backend::External { command } => {
            #[cfg(feature = "std")]
            {
                external::solve_external(inst, command, cfg.dialect, cfg.time_limit_secs)?
            }
            #[cfg(not(feature = "std"))]
            {
                let _ = command;
                return Err(SolveError::ExternalUnsupported);
            }
        }
    };
    if let SolveResult::Optimal(sol) = &result {
        if !inst.hard_satisfied_by(sol.model.values()) {
            return Err(SolveError::MalformedOutput(String::from(
                "assignment violates hard clauses",
            )));
        }
        debug_assert_eq!(sol.cost, inst.cost_of(sol.model.values()));
    }
    Ok(result)
}

/// Linear SAT–UNSAT search with the embedded engine.
pub fn solve_embedded(inst: &WcnfInstance, seed: u64) -> SolveResult {
    solve_embedded_warm(inst, seed, None)
}

fn solve_embedded_warm(inst: &WcnfInstance, seed: u64, warm: Option<&[bool]>) -> SolveResult {
    let mut sat = Solver::with_seed(seed);
    for _ in 0..inst.num_vars {
        sat.new_var();
    }
    for c in &inst.hard {
        if !sat.add_clause(c.lits()) {
            return SolveResult::HardUnsat;
        }
    }

    // One objective literal per soft clause, true when the clause may be
    // falsified. Unit softs need no relaxation selector: their negation is
    // the objective literal. Phase hints steer the first model toward
    // satisfying the softs, which keeps the initial bound small.
    let mut objective: Vec<(Literal, u64)> = Vec::with_capacity(inst.soft.len());
    for sc in &inst.soft {
        if let [l] = sc.clause.lits() {
            sat.set_phase_hint(l.var(), l.is_positive());
            objective.push((!*l, sc.weight));
        } else {
            let r = Literal::positive(sat.new_var());
            let mut lits = sc.clause.lits().to_vec();
            lits.push(r);
            if !sat.add_clause(&lits) {
                return SolveResult::HardUnsat;
            }
            objective.push((r, sc.weight));
        }
    }

    if !sat.solve() {
        return SolveResult::HardUnsat;
    }
    let take_model = |sat: &Solver| sat.model()[..inst.num_vars as usize].to_vec();
    let mut best = take_model(&sat);
    let mut best_cost = inst.cost_of(&best);
    #[cfg(feature = "std")]
    let dbg_lsu = std::env::var("RULESAT_DEBUG_LSU").is_ok();
    #[cfg(feature = "std")]
    let t_first = std::time::Instant::now();

    if best_cost > 0 {
        let counter = CostCounter::build(&mut sat, &objective, best_cost);
        #[cfg(feature = "std")]
        if dbg_lsu {
            eprintln!(
                "lsu: c0={} counter_outputs={} vars_after={} t_first={:.1}ms",
                best_cost,
                counter.outputs.len(),
                sat.num_vars(),
                t_first.elapsed().as_secs_f64() * 1e3
            );
        }
        loop {
            // Forbid any assignment whose selector weight reaches the
            // current best; a model below the bound must then be cheaper.
            let at_least_best = counter.at_least(best_cost);
            if !sat.add_clause(&[!at_least_best]) || !sat.solve() {
                break;
            }
            let values = take_model(&sat);
            let cost = inst.cost_of(&values);
            debug_assert!(cost < best_cost);
            best = values;
            best_cost = cost;
            if best_cost == 0 {
                break;
            }
        }
    }

    SolveResult::Optimal(Solution {
        model: Model(best),
        cost: best_cost,
        reported_cost: None,
    })
}

/// SAT check over hard clauses only; `None` means unsatisfiable.
pub fn solve_sat(num_vars: u32, clauses: &[Clause], seed: u64) -> Option<Model> {
    let mut sat = Solver::with_seed(seed);
    for _ in 0..num_vars {
        sat.new_var();
    }
    for c in clauses {
        if !sat.add_clause(c.lits()) {
            return None;
        }
    }
    sat.solve()
        .then(|| Model(sat.model()[..num_vars as usize].to_vec()))
}

/// Weighted sequential counter over the objective literals, sparse in the
/// achievable partial sums and clamped at `cap`. `outputs[i] = (v, s)` means
/// the clauses force `s` true whenever the selected weight reaches `v`.
#[derive(Debug)]
struct CostCounter {
    outputs: Vec<(u64, Literal)>,
}

impl CostCounter {
    fn build(sat: &mut Solver, objective: &[(Literal, u64)], cap: u64) -> CostCounter {
        debug_assert!(cap >= 1);
        let mut prev: Vec<(u64, Literal)> = Vec::new();
        for &(lit, w) in objective {
            let mut values: BTreeSet<u64> = prev.iter().map(|&(v, _)| v).collect();
            values.insert(w.min(cap));
            for &(v, _) in &prev {
                values.insert((v + w).min(cap));
            }
            let next: Vec<(u64, Literal)> = values
                .into_iter()
                .map(|v| (v, Literal::positive(sat.new_var())))
                .collect();
            let reg = |vals: &[(u64, Literal)], v: u64| -> Literal {
                vals[vals.binary_search_by_key(&v, |p| p.0).unwrap()].1
            };
            for &(v, s_prev) in &prev {
                sat.add_clause(&[!s_prev, reg(&next, v)]);
                sat.add_clause(&[!lit, !s_prev, reg(&next, (v + w).min(cap))]);
            }
            sat.add_clause(&[!lit, reg(&next, w.min(cap))]);
            // Registers are monotone: reaching a sum reaches every smaller
            // one. Without this ladder an overshooting sum could skip the
            // exact register a bound asserts against.
            for pair in next.windows(2) {
                sat.add_clause(&[!pair[1].1, pair[0].1]);
            }
            prev = next;
        }
        CostCounter { outputs: prev }
    }

    /// The output meaning "selected weight ≥ t". `t` must not exceed the
    /// cap and some achievable sum must reach it; both hold for every bound
    /// the search loop asserts, since bounds are previously observed costs.
    fn at_least(&self, t: u64) -> Literal {
        self.outputs
            .iter()
            .find(|&&(v, _)| v >= t)
            .expect("bound below an achieved cost")
            .1
    }
}

/// Exhaustive-enumeration oracle: tries all `2^num_vars` assignments and
/// returns the first one (in binary counting order) of minimum cost.
/// Exponential on purpose; guards against instances beyond ~2^26.
pub fn solve_brute_force(inst: &WcnfInstance) -> SolveResult {
    assert!(inst.num_vars <= 26, "brute force is for tiny instances");
    let n = inst.num_vars as usize;
    let mut best: Option<(u64, Vec<bool>)> = None;
    for bits in 0u64..1 << n {
        let values: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
        if !inst.hard_satisfied_by(&values) {
            continue;
        }
        let cost = inst.cost_of(&values);
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, values));
        }
    }
    match best {
        Some((cost, values)) => SolveResult::Optimal(Solution {
            model: Model(values),
            cost,
            reported_cost: None,
        }),
        None => SolveResult::HardUnsat,
    }
}
