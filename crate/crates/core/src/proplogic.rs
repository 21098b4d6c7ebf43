//! Propositional formulas, clauses, and their conversion into weighted CNF.
//!
//! Variables are dense positive integers handed out by a [`VarAllocator`].
//! [`Formula`] holds the non-clausal constraints the encoders produce;
//! [`tseitin`] turns a formula into clauses that are equisatisfiable with it
//! and whose models, projected onto the formula's own variables, are exactly
//! the formula's models.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Not;

/// A propositional variable. Identifiers start at 1 and are allocated densely
/// per instance; 0 is never a valid variable.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(u32);

impl VarId {
    /// Builds a variable from its 1-based number. Panics on 0.
    pub fn new(number: u32) -> VarId {
        assert!(number >= 1, "variable numbers start at 1");
        VarId(number)
    }

    /// The 1-based number (DIMACS convention).
    #[inline]
    pub fn number(self) -> u32 {
        self.0
    }

    /// The 0-based index, for dense per-variable tables.
    #[inline]
    pub fn index(self) -> usize {
        (self.0 - 1) as usize
    }
}

impl fmt::Debug for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A variable or its negation, encoded as `var << 1 | sign`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal(u32);

impl Literal {
    #[inline]
    pub fn new(var: VarId, positive: bool) -> Literal {
        Literal(var.0 << 1 | u32::from(!positive))
    }

    #[inline]
    pub fn positive(var: VarId) -> Literal {
        Literal::new(var, true)
    }

    #[inline]
    pub fn negative(var: VarId) -> Literal {
        Literal::new(var, false)
    }

    #[inline]
    pub fn var(self) -> VarId {
        VarId(self.0 >> 1)
    }

    /// Dense index for per-literal tables (`var << 1 | sign`).
    #[inline]
    pub(crate) fn code(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    /// Signed DIMACS form: variable number, negative when negated.
    pub fn to_dimacs(self) -> i64 {
        let n = i64::from(self.var().0);
        if self.is_positive() {
            n
        } else {
            -n
        }
    }

    /// Parses a signed DIMACS literal; rejects 0.
    pub fn from_dimacs(n: i64) -> Option<Literal> {
        if n == 0 || n.unsigned_abs() > u64::from(u32::MAX) {
            return None;
        }
        Some(Literal::new(VarId::new(n.unsigned_abs() as u32), n > 0))
    }

    /// True under the given per-variable assignment.
    #[inline]
    pub fn satisfied_by(self, values: &[bool]) -> bool {
        values[self.var().index()] == self.is_positive()
    }
}

impl Not for Literal {
    type Output = Literal;
    #[inline]
    fn not(self) -> Literal {
        Literal(self.0 ^ 1)
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// Hands out fresh variables, densely from 1.
#[derive(Debug, Default, Clone)]
pub struct VarAllocator {
    next: u32,
}

impl VarAllocator {
    pub fn new() -> VarAllocator {
        VarAllocator { next: 0 }
    }

    pub fn fresh(&mut self) -> VarId {
        self.next += 1;
        VarId(self.next)
    }

    /// Number of variables allocated so far.
    pub fn count(&self) -> u32 {
        self.next
    }
}

/// A disjunction of literals. Construction keeps the given order;
/// [`Clause::normalized`] deduplicates and drops tautologies.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Clause(Vec<Literal>);

impl Clause {
    pub fn new(lits: Vec<Literal>) -> Clause {
        Clause(lits)
    }

    /// Order-preserving deduplication; `None` if the clause contains both a
    /// literal and its negation (a tautology, which carries no constraint).
    pub fn normalized(lits: Vec<Literal>) -> Option<Clause> {
        let mut out: Vec<Literal> = Vec::with_capacity(lits.len());
        for lit in lits {
            if out.contains(&!lit) {
                return None;
            }
            if !out.contains(&lit) {
                out.push(lit);
            }
        }
        Some(Clause(out))
    }

    #[inline]
    pub fn lits(&self) -> &[Literal] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn satisfied_by(&self, values: &[bool]) -> bool {
        self.0.iter().any(|l| l.satisfied_by(values))
    }

    /// Canonical key for set-level comparisons in tests.
    pub fn sorted(&self) -> Vec<Literal> {
        let mut v = self.0.clone();
        v.sort_unstable();
        v
    }
}

impl fmt::Debug for Clause {
    // Signed-literal list, e.g. `[1, -2]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// A clause with a positive integer weight; falsifying it costs the weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoftClause {
    pub clause: Clause,
    pub weight: u64,
}

/// A weighted partial MaxSAT instance: hard clauses that must hold and soft
/// clauses whose total falsified weight is minimized.
#[derive(Debug, Clone, Default)]
pub struct WcnfInstance {
    pub num_vars: u32,
    pub hard: Vec<Clause>,
    pub soft: Vec<SoftClause>,
    /// Optional decoding aid: tag → variable. Not part of instance identity.
    pub names: BTreeMap<String, VarId>,
}

impl WcnfInstance {
    /// Classic-format top weight: strictly exceeds the total soft weight.
    pub fn top_weight(&self) -> u64 {
        1 + self.soft.iter().map(|s| s.weight).sum::<u64>()
    }

    /// Total weight of soft clauses falsified by `values`.
    pub fn cost_of(&self, values: &[bool]) -> u64 {
        self.soft
            .iter()
            .filter(|s| !s.clause.satisfied_by(values))
            .map(|s| s.weight)
            .sum()
    }

    pub fn hard_satisfied_by(&self, values: &[bool]) -> bool {
        self.hard.iter().all(|c| c.satisfied_by(values))
    }

    /// Every literal within bounds and every soft weight ≥ 1.
    pub fn is_well_formed(&self) -> bool {
        let in_range = |c: &Clause| c.lits().iter().all(|l| l.var().0 <= self.num_vars);
        self.hard.iter().all(in_range)
            && self.soft.iter().all(|s| in_range(&s.clause) && s.weight >= 1)
    }
}

impl PartialEq for WcnfInstance {
    // Identity excludes the name map.
    fn eq(&self, other: &Self) -> bool {
        self.num_vars == other.num_vars && self.hard == other.hard && self.soft == other.soft
    }
}

/// Accumulates an instance while allocating variables.
#[derive(Debug, Default)]
pub struct WcnfBuilder {
    alloc: VarAllocator,
    hard: Vec<Clause>,
    soft: Vec<SoftClause>,
    names: BTreeMap<String, VarId>,
    keep_names: bool,
}

impl WcnfBuilder {
    pub fn new() -> WcnfBuilder {
        WcnfBuilder::default()
    }

    /// Record tags passed to [`WcnfBuilder::name`]. Off by default; training
    /// loops build thousands of instances and the map is debugging aid only.
    pub fn keep_names(mut self, keep: bool) -> WcnfBuilder {
        self.keep_names = keep;
        self
    }

    pub fn fresh_var(&mut self) -> VarId {
        self.alloc.fresh()
    }

    pub fn allocator_mut(&mut self) -> &mut VarAllocator {
        &mut self.alloc
    }

    pub fn name(&mut self, tag: String, var: VarId) {
        if self.keep_names {
            self.names.insert(tag, var);
        }
    }

    /// Adds a hard clause; tautologies are dropped.
    pub fn add_hard(&mut self, lits: Vec<Literal>) {
        if let Some(c) = Clause::normalized(lits) {
            self.hard.push(c);
        }
    }

    /// Adds a soft clause of the given weight; tautologies are dropped since
    /// they can never be falsified.
    pub fn add_soft(&mut self, lits: Vec<Literal>, weight: u64) {
        assert!(weight >= 1, "soft weights are positive");
        if let Some(c) = Clause::normalized(lits) {
            self.soft.push(SoftClause { clause: c, weight });
        }
    }

    pub fn add_hard_clauses(&mut self, clauses: Vec<Clause>) {
        for c in clauses {
            self.add_hard(c.0);
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.alloc.count()
    }

    pub fn finish(self) -> WcnfInstance {
        WcnfInstance {
            num_vars: self.alloc.count(),
            hard: self.hard,
            soft: self.soft,
            names: self.names,
        }
    }
}

/// Errors from the clause-level helpers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LogicError {
    /// `exactly_one` was given two literals over the same variable.
    DuplicateVariable(VarId),
    /// `eval_formula` hit a variable outside the assignment.
    UnassignedVariable(VarId),
}

impl fmt::Display for LogicError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogicError::DuplicateVariable(v) => {
                write!(f, "duplicate variable {v:?} in literal list")
            }
            LogicError::UnassignedVariable(v) => write!(f, "variable {v:?} is unassigned"),
        }
    }
}

impl core::error::Error for LogicError {}

/// Exactly-one over the given literals: one at-least-one clause plus the
/// pairwise at-most-one clauses, `1 + n(n-1)/2` in total.
pub fn exactly_one(lits: &[Literal]) -> Result<Vec<Clause>, LogicError> {
    assert!(!lits.is_empty(), "exactly_one needs at least one literal");
    for (i, a) in lits.iter().enumerate() {
        if let Some(b) = lits[i + 1..].iter().find(|b| b.var() == a.var()) {
            return Err(LogicError::DuplicateVariable(b.var()));
        }
    }
    let mut out = Vec::with_capacity(1 + lits.len() * (lits.len() - 1) / 2);
    out.push(Clause::new(lits.to_vec()));
    for (i, &a) in lits.iter().enumerate() {
        for &b in &lits[i + 1..] {
            out.push(Clause::new(vec![!a, !b]));
        }
    }
    Ok(out)
}

/// A propositional formula tree. `And`/`Or` take arbitrarily many children;
/// an empty `And` is true and an empty `Or` is false.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Lit(Literal),
    Not(alloc::boxed::Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(alloc::boxed::Box<Formula>, alloc::boxed::Box<Formula>),
    Iff(alloc::boxed::Box<Formula>, alloc::boxed::Box<Formula>),
    ConstTrue,
    ConstFalse,
}

impl Formula {
    pub fn lit(l: Literal) -> Formula {
        Formula::Lit(l)
    }

    pub fn var(v: VarId) -> Formula {
        Formula::Lit(Literal::positive(v))
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(alloc::boxed::Box::new(f))
    }

    pub fn and(children: Vec<Formula>) -> Formula {
        Formula::And(children)
    }

    pub fn or(children: Vec<Formula>) -> Formula {
        Formula::Or(children)
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(alloc::boxed::Box::new(a), alloc::boxed::Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(alloc::boxed::Box::new(a), alloc::boxed::Box::new(b))
    }

    /// The literal this formula is, if it is one (possibly under negations).
    fn as_literal(&self) -> Option<Literal> {
        match self {
            Formula::Lit(l) => Some(*l),
            Formula::Not(g) => g.as_literal().map(|l| !l),
            _ => None,
        }
    }
}

/// Standard Boolean semantics. The assignment is queried per variable and may
/// be partial; touching an unassigned variable is an error.
pub fn eval_formula<F>(f: &Formula, assignment: &F) -> Result<bool, LogicError>
where
    F: Fn(VarId) -> Option<bool>,
{
    match f {
        Formula::Lit(l) => assignment(l.var())
            .map(|v| v == l.is_positive())
            .ok_or(LogicError::UnassignedVariable(l.var())),
        Formula::Not(g) => Ok(!eval_formula(g, assignment)?),
        Formula::And(cs) => {
            let mut all = true;
            for c in cs {
                all &= eval_formula(c, assignment)?;
            }
            Ok(all)
        }
        Formula::Or(cs) => {
            let mut any = false;
            for c in cs {
                any |= eval_formula(c, assignment)?;
            }
            Ok(any)
        }
        Formula::Implies(a, b) => {
            Ok(!eval_formula(a, assignment)? | eval_formula(b, assignment)?)
        }
        Formula::Iff(a, b) => Ok(eval_formula(a, assignment)? == eval_formula(b, assignment)?),
        Formula::ConstTrue => Ok(true),
        Formula::ConstFalse => Ok(false),
    }
}

/// Result of converting a formula to CNF: asserting all `clauses` together
/// with `root` (when present) is equisatisfiable with the formula, and the
/// models of that clause set projected onto the formula's own variables are
/// exactly the formula's models.
#[derive(Debug, Clone)]
pub struct CnfConversion {
    pub clauses: Vec<Clause>,
    pub root: Option<Literal>,
}

/// Tseitin conversion of `f`, asserted at the top level.
///
/// Literal shapes pass through as the root with no clauses. Implications and
/// disjunctions over literals become plain clauses. A biconditional with a
/// literal on one side and a conjunction/disjunction of literals on the other
/// becomes its definitional clauses directly. Only genuinely compound
/// subformulas allocate auxiliary variables, and those always get the full
/// two-sided definitions so that model projection stays exact.
pub fn tseitin(f: &Formula, alloc: &mut VarAllocator) -> CnfConversion {
    let mut clauses = Vec::new();
    let root = assert_formula(f, alloc, &mut clauses);
    CnfConversion { clauses, root }
}

fn assert_formula(
    f: &Formula,
    alloc: &mut VarAllocator,
    out: &mut Vec<Clause>,
) -> Option<Literal> {
    if let Some(l) = f.as_literal() {
        return Some(l);
    }
    match f {
        Formula::ConstTrue => None,
        Formula::ConstFalse => {
            out.push(Clause::new(Vec::new()));
            None
        }
        Formula::And(cs) => {
            for c in cs {
                if let Some(l) = assert_formula(c, alloc, out) {
                    out.push(Clause::new(vec![l]));
                }
            }
            None
        }
        Formula::Or(cs) => {
            assert_disjunction(cs.iter().collect(), alloc, out);
            None
        }
        Formula::Implies(a, b) => {
            let neg = Formula::not((**a).clone());
            assert_disjunction(vec![&neg, b], alloc, out);
            None
        }
        Formula::Iff(a, b) => {
            assert_iff(a, b, alloc, out);
            None
        }
        Formula::Not(g) => match &**g {
            // De Morgan at the top level, to keep clause shapes tight.
            Formula::Or(cs) => {
                for c in cs {
                    let neg = Formula::not((*c).clone());
                    if let Some(l) = assert_formula(&neg, alloc, out) {
                        out.push(Clause::new(vec![l]));
                    }
                }
                None
            }
            Formula::And(cs) => {
                let negs: Vec<Formula> = cs.iter().map(|c| Formula::not(c.clone())).collect();
                assert_disjunction(negs.iter().collect(), alloc, out);
                None
            }
            Formula::Implies(a, b) => {
                // ¬(a → b) = a ∧ ¬b
                if let Some(l) = assert_formula(a, alloc, out) {
                    out.push(Clause::new(vec![l]));
                }
                let neg = Formula::not((**b).clone());
                if let Some(l) = assert_formula(&neg, alloc, out) {
                    out.push(Clause::new(vec![l]));
                }
                None
            }
            Formula::Iff(a, b) => {
                let neg = Formula::not((**b).clone());
                assert_iff(a, &neg, alloc, out);
                None
            }
            Formula::ConstTrue => {
                out.push(Clause::new(Vec::new()));
                None
            }
            Formula::ConstFalse => None,
            // Lit and Not are covered by as_literal above.
            Formula::Not(h) => assert_formula(h, alloc, out),
            Formula::Lit(_) => unreachable!("handled by as_literal"),
        },
        Formula::Lit(_) => unreachable!("handled by as_literal"),
    }
}

/// Asserts `c₁ ∨ … ∨ cₙ` as one clause, reifying compound children.
fn assert_disjunction(children: Vec<&Formula>, alloc: &mut VarAllocator, out: &mut Vec<Clause>) {
    let mut lits = Vec::with_capacity(children.len());
    for c in children {
        match c {
            Formula::ConstTrue => return, // trivially satisfied
            Formula::ConstFalse => {}
            _ => lits.push(reify(c, alloc, out)),
        }
    }
    out.push(Clause::new(lits));
}

/// Asserts `a ↔ b`, exploiting literal-vs-junction shapes.
fn assert_iff(a: &Formula, b: &Formula, alloc: &mut VarAllocator, out: &mut Vec<Clause>) {
    // Normalize so a literal side, if any, comes first.
    let (a, b) = if a.as_literal().is_none() && b.as_literal().is_some() {
        (b, a)
    } else {
        (a, b)
    };
    match (a.as_literal(), b) {
        (Some(la), Formula::And(cs)) if cs.iter().all(|c| c.as_literal().is_some()) => {
            let ls: Vec<Literal> = cs.iter().map(|c| c.as_literal().unwrap()).collect();
            define_and(la, &ls, out);
        }
        (Some(la), Formula::Or(cs)) if cs.iter().all(|c| c.as_literal().is_some()) => {
            let ls: Vec<Literal> = cs.iter().map(|c| c.as_literal().unwrap()).collect();
            define_or(la, &ls, out);
        }
        (Some(la), Formula::ConstTrue) => out.push(Clause::new(vec![la])),
        (Some(la), Formula::ConstFalse) => out.push(Clause::new(vec![!la])),
        _ => {
            let ra = reify(a, alloc, out);
            let rb = reify(b, alloc, out);
            out.push(Clause::new(vec![!ra, rb]));
            out.push(Clause::new(vec![ra, !rb]));
        }
    }
}

/// Clauses for `z ↔ (l₁ ∧ … ∧ lₙ)`.
fn define_and(z: Literal, lits: &[Literal], out: &mut Vec<Clause>) {
    let mut long = Vec::with_capacity(lits.len() + 1);
    long.push(z);
    for &l in lits {
        out.push(Clause::new(vec![!z, l]));
        long.push(!l);
    }
    out.push(Clause::new(long));
}

/// Clauses for `z ↔ (l₁ ∨ … ∨ lₙ)`.
fn define_or(z: Literal, lits: &[Literal], out: &mut Vec<Clause>) {
    let mut long = Vec::with_capacity(lits.len() + 1);
    long.push(!z);
    for &l in lits {
        out.push(Clause::new(vec![z, !l]));
        long.push(l);
    }
    out.push(Clause::new(long));
}

/// Returns a literal equivalent to `f`, introducing a fully-defined auxiliary
/// variable for compound shapes.
fn reify(f: &Formula, alloc: &mut VarAllocator, out: &mut Vec<Clause>) -> Literal {
    if let Some(l) = f.as_literal() {
        return l;
    }
    match f {
        Formula::ConstTrue => {
            let t = Literal::positive(alloc.fresh());
            out.push(Clause::new(vec![t]));
            t
        }
        Formula::ConstFalse => {
            let t = Literal::positive(alloc.fresh());
            out.push(Clause::new(vec![t]));
            !t
        }
        Formula::And(cs) => {
            if cs.is_empty() {
                return reify(&Formula::ConstTrue, alloc, out);
            }
            let rs: Vec<Literal> = cs.iter().map(|c| reify(c, alloc, out)).collect();
            if rs.len() == 1 {
                return rs[0];
            }
            let z = Literal::positive(alloc.fresh());
            define_and(z, &rs, out);
            z
        }
        Formula::Or(cs) => {
            if cs.is_empty() {
                return reify(&Formula::ConstFalse, alloc, out);
            }
            let rs: Vec<Literal> = cs.iter().map(|c| reify(c, alloc, out)).collect();
            if rs.len() == 1 {
                return rs[0];
            }
            let z = Literal::positive(alloc.fresh());
            define_or(z, &rs, out);
            z
        }
        Formula::Implies(a, b) => {
            let ra = reify(a, alloc, out);
            let rb = reify(b, alloc, out);
            let z = Literal::positive(alloc.fresh());
            define_or(z, &[!ra, rb], out);
            z
        }
        Formula::Iff(a, b) => {
            let ra = reify(a, alloc, out);
            let rb = reify(b, alloc, out);
            let z = Literal::positive(alloc.fresh());
            // z ↔ (ra ↔ rb)
            out.push(Clause::new(vec![!z, !ra, rb]));
            out.push(Clause::new(vec![!z, ra, !rb]));
            out.push(Clause::new(vec![z, ra, rb]));
            out.push(Clause::new(vec![z, !ra, !rb]));
            z
        }
        Formula::Not(g) => !reify(g, alloc, out),
        Formula::Lit(_) => unreachable!("handled by as_literal"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: u32) -> VarId {
        VarId::new(n)
    }

    fn pos(n: u32) -> Literal {
        Literal::positive(v(n))
    }

    fn neg(n: u32) -> Literal {
        Literal::negative(v(n))
    }

    #[test]
    fn literal_negation_is_involutive() {
        let l = pos(7);
        assert_eq!(!!l, l);
        assert_eq!((!l).var(), l.var());
        assert_ne!((!l).is_positive(), l.is_positive());
    }

    #[test]
    fn dimacs_round_trip() {
        for n in [1i64, -1, 42, -99] {
            assert_eq!(Literal::from_dimacs(n).unwrap().to_dimacs(), n);
        }
        assert!(Literal::from_dimacs(0).is_none());
    }

    #[test]
    fn normalization_dedups_and_drops_tautologies() {
        let c = Clause::normalized(vec![pos(1), pos(2), pos(1)]).unwrap();
        assert_eq!(c.lits(), &[pos(1), pos(2)]);
        assert!(Clause::normalized(vec![pos(1), neg(1)]).is_none());
    }

    #[test]
    fn normalization_is_idempotent() {
        let once = Clause::normalized(vec![pos(3), neg(2), pos(3), pos(5)]).unwrap();
        let twice = Clause::normalized(once.lits().to_vec()).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn exactly_one_clause_counts() {
        // 2 literals → 2 clauses; 4 literals → 7 clauses.
        let lits2 = [pos(1), pos(2)];
        assert_eq!(exactly_one(&lits2).unwrap().len(), 2);
        let lits4 = [pos(1), pos(2), pos(3), pos(4)];
        assert_eq!(exactly_one(&lits4).unwrap().len(), 7);
        for n in 1..=50u32 {
            let lits: Vec<Literal> = (1..=n).map(pos).collect();
            let expected = 1 + (n as usize) * (n as usize - 1) / 2;
            assert_eq!(exactly_one(&lits).unwrap().len(), expected);
        }
    }

    #[test]
    fn exactly_one_rejects_duplicate_variables() {
        assert_eq!(
            exactly_one(&[pos(1), neg(1)]),
            Err(LogicError::DuplicateVariable(v(1)))
        );
    }

    #[test]
    fn exactly_one_has_exactly_n_models() {
        // For 3 literals, exactly 3 of the 8 assignments satisfy the set.
        let lits = [pos(1), pos(2), pos(3)];
        let clauses = exactly_one(&lits).unwrap();
        let mut sat_count = 0;
        for bits in 0u32..8 {
            let values: Vec<bool> = (0..3).map(|i| bits >> i & 1 == 1).collect();
            if clauses.iter().all(|c| c.satisfied_by(&values)) {
                sat_count += 1;
            }
        }
        assert_eq!(sat_count, 3);
    }

    #[test]
    fn eval_empty_junctions() {
        let empty = |_| -> Option<bool> { None };
        assert!(eval_formula(&Formula::And(vec![]), &empty).unwrap());
        assert!(!eval_formula(&Formula::Or(vec![]), &empty).unwrap());
    }

    #[test]
    fn eval_reports_unassigned() {
        let f = Formula::var(v(2));
        let only_one = |var: VarId| (var == v(1)).then_some(true);
        assert_eq!(
            eval_formula(&f, &only_one),
            Err(LogicError::UnassignedVariable(v(2)))
        );
    }

    #[test]
    fn eval_rule_set_shape() {
        // x₁ ∨ (x₂ ∧ ¬x₃) over the sample [0, 0, 1] evaluates to 0.
        let f = Formula::or(vec![
            Formula::var(v(1)),
            Formula::and(vec![
                Formula::var(v(2)),
                Formula::not(Formula::var(v(3))),
            ]),
        ]);
        let sample = [false, false, true];
        let assign = |var: VarId| sample.get(var.index()).copied();
        assert!(!eval_formula(&f, &assign).unwrap());
    }

    #[test]
    fn tseitin_literal_passthrough() {
        let mut alloc = VarAllocator::new();
        alloc.fresh(); // p
        let conv = tseitin(&Formula::var(v(1)), &mut alloc);
        assert!(conv.clauses.is_empty());
        assert_eq!(conv.root, Some(pos(1)));
    }

    #[test]
    fn tseitin_implication_needs_no_auxiliary() {
        let mut alloc = VarAllocator::new();
        let a = alloc.fresh();
        let b = alloc.fresh();
        let conv = tseitin(
            &Formula::implies(Formula::var(a), Formula::var(b)),
            &mut alloc,
        );
        assert_eq!(conv.root, None);
        assert_eq!(conv.clauses, vec![Clause::new(vec![neg(1), pos(2)])]);
        assert_eq!(alloc.count(), 2);
    }

    #[test]
    fn tseitin_iff_with_conjunction() {
        // z ↔ (a ∧ b) becomes {(¬z ∨ a), (¬z ∨ b), (z ∨ ¬a ∨ ¬b)}.
        let mut alloc = VarAllocator::new();
        let z = alloc.fresh();
        let a = alloc.fresh();
        let b = alloc.fresh();
        let conv = tseitin(
            &Formula::iff(
                Formula::var(z),
                Formula::and(vec![Formula::var(a), Formula::var(b)]),
            ),
            &mut alloc,
        );
        assert_eq!(conv.root, None);
        assert_eq!(alloc.count(), 3, "no auxiliary expected");
        let got: alloc::collections::BTreeSet<Vec<Literal>> =
            conv.clauses.iter().map(|c| c.sorted()).collect();
        let want: alloc::collections::BTreeSet<Vec<Literal>> = [
            Clause::new(vec![neg(1), pos(2)]),
            Clause::new(vec![neg(1), pos(3)]),
            Clause::new(vec![pos(1), neg(2), neg(3)]),
        ]
        .iter()
        .map(|c| c.sorted())
        .collect();
        assert_eq!(got, want);
    }
}
