//! The embedded CDCL SAT engine: two-watched-literal propagation,
//! activity-based branching with phase saving, first-UIP clause learning, and
//! Luby restarts. Clauses may be added between `solve` calls, which is what
//! the MaxSAT search loop relies on.
//!
//! Branching is deterministic for a fixed seed: ties in the activity order are
//! broken by variable index and the occasional random decision comes from a
//! seeded xorshift.

use alloc::vec;
use alloc::vec::Vec;

use crate::proplogic::{Literal, VarId};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum LBool {
    True,
    False,
    Undef,
}

#[derive(Clone, Copy, Debug)]
struct Watcher {
    cref: u32,
    blocker: Literal,
}

#[derive(Debug)]
struct ClauseData {
    lits: Vec<Literal>,
    activity: f32,
    learnt: bool,
    deleted: bool,
}

/// Deterministic xorshift64*; only used for the rare random branch.
#[derive(Debug)]
struct XorShift(u64);

impl XorShift {
    fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.0 = x;
        x.wrapping_mul(0x2545_f491_4f6c_dd1d)
    }
}

const VAR_DECAY: f64 = 0.95;
const CLAUSE_DECAY: f32 = 0.999;
const RESTART_BASE: u64 = 100;
// One random decision in ~50.
const RANDOM_BRANCH_ONE_IN: u64 = 50;

/// Incremental CDCL solver over [`crate::proplogic`] literals.
#[derive(Debug)]
pub struct Solver {
    clauses: Vec<ClauseData>,
    learnt_refs: Vec<u32>,
    watches: Vec<Vec<Watcher>>, // indexed by literal code
    assign: Vec<LBool>,         // per var
    reason: Vec<Option<u32>>,
    level: Vec<u32>,
    trail: Vec<Literal>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    clause_inc: f32,
    order: VarOrder,
    phase: Vec<bool>,
    seen: Vec<bool>,
    rng: XorShift,
    ok: bool,
    model: Vec<bool>,
    max_learnts: usize,
    pub conflicts: u64,
}

impl Solver {
    pub fn with_seed(seed: u64) -> Solver {
        Solver {
            clauses: Vec::new(),
            learnt_refs: Vec::new(),
            watches: vec![Vec::new(), Vec::new()],
            assign: Vec::new(),
            reason: Vec::new(),
            level: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: Vec::new(),
            var_inc: 1.0,
            clause_inc: 1.0,
            order: VarOrder::new(),
            phase: Vec::new(),
            seen: Vec::new(),
            rng: XorShift(seed | 1),
            ok: true,
            model: Vec::new(),
            max_learnts: 4000,
            conflicts: 0,
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.assign.len() as u32
    }

    /// Still satisfiable as far as top-level reasoning knows. Once an
    /// `add_clause` or `solve` derives a root conflict this goes false for
    /// the lifetime of the solver.
    pub fn is_ok(&self) -> bool {
        self.ok
    }

    /// Allocates the next variable. Numbers are handed out densely from 1, so
    /// interleaving with a [`crate::proplogic::VarAllocator`] sequence stays
    /// aligned as long as both sides allocate in lockstep.
    pub fn new_var(&mut self) -> VarId {
        self.new_var_with_phase(false)
    }

    /// Allocates a variable with an initial saved phase, used as the first
    /// decision polarity.
    pub fn new_var_with_phase(&mut self, phase: bool) -> VarId {
        let idx = self.assign.len();
        self.assign.push(LBool::Undef);
        self.reason.push(None);
        self.level.push(0);
        self.activity.push(0.0);
        self.phase.push(phase);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.order.push(idx as u32, &self.activity);
        VarId::new(idx as u32 + 1)
    }

    pub fn set_phase_hint(&mut self, var: VarId, phase: bool) {
        self.phase[var.index()] = phase;
    }

    fn lit_value(&self, l: Literal) -> LBool {
        match self.assign[l.var().index()] {
            LBool::Undef => LBool::Undef,
            LBool::True => {
                if l.is_positive() {
                    LBool::True
                } else {
                    LBool::False
                }
            }
            LBool::False => {
                if l.is_positive() {
                    LBool::False
                } else {
                    LBool::True
                }
            }
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    /// Adds a clause. Returns false when the clause set became unsatisfiable
    /// at the root level. May be called between `solve` calls; any partial
    /// assignment from a previous call is undone first.
    pub fn add_clause(&mut self, lits: &[Literal]) -> bool {
        if !self.ok {
            return false;
        }
        self.cancel_until(0);
        // Root-level simplification: drop false literals, skip satisfied or
        // tautological clauses, deduplicate.
        let mut cl: Vec<Literal> = Vec::with_capacity(lits.len());
        for &l in lits {
            debug_assert!(l.var().number() <= self.num_vars(), "literal out of range");
            match self.lit_value(l) {
                LBool::True => return true,
                LBool::False => continue,
                LBool::Undef => {
                    if cl.contains(&!l) {
                        return true;
                    }
                    if !cl.contains(&l) {
                        cl.push(l);
                    }
                }
            }
        }
        match cl.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(cl[0], None);
                if self.propagate().is_some() {
                    self.ok = false;
                }
                self.ok
            }
            _ => {
                self.attach(cl, false);
                true
            }
        }
    }

    fn attach(&mut self, lits: Vec<Literal>, learnt: bool) -> u32 {
        debug_assert!(lits.len() >= 2);
        let cref = self.clauses.len() as u32;
        self.watches[(!lits[0]).code()].push(Watcher {
            cref,
            blocker: lits[1],
        });
        self.watches[(!lits[1]).code()].push(Watcher {
            cref,
            blocker: lits[0],
        });
        self.clauses.push(ClauseData {
            lits,
            activity: 0.0,
            learnt,
            deleted: false,
        });
        if learnt {
            self.learnt_refs.push(cref);
        }
        cref
    }

    fn enqueue(&mut self, l: Literal, reason: Option<u32>) {
        debug_assert_eq!(self.lit_value(l), LBool::Undef);
        let v = l.var().index();
        self.assign[v] = if l.is_positive() {
            LBool::True
        } else {
            LBool::False
        };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn propagate(&mut self) -> Option<u32> {
        let mut conflict = None;
        'queue: while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = !p;
            let mut ws = core::mem::take(&mut self.watches[p.code()]);
            let mut i = 0;
            'watchers: while i < ws.len() {
                let w = ws[i];
                if self.lit_value(w.blocker) == LBool::True {
                    i += 1;
                    continue;
                }
                let cref = w.cref as usize;
                {
                    let cl = &mut self.clauses[cref].lits;
                    if cl[0] == false_lit {
                        cl.swap(0, 1);
                    }
                    debug_assert_eq!(cl[1], false_lit);
                }
                let first = self.clauses[cref].lits[0];
                if first != w.blocker && self.lit_value(first) == LBool::True {
                    ws[i] = Watcher {
                        cref: w.cref,
                        blocker: first,
                    };
                    i += 1;
                    continue;
                }
                // Look for a non-false literal to watch instead.
                let len = self.clauses[cref].lits.len();
                for k in 2..len {
                    let lk = self.clauses[cref].lits[k];
                    if self.lit_value(lk) != LBool::False {
                        self.clauses[cref].lits.swap(1, k);
                        self.watches[(!lk).code()].push(Watcher {
                            cref: w.cref,
                            blocker: first,
                        });
                        ws.swap_remove(i);
                        continue 'watchers;
                    }
                }
                // None found: the clause is unit or conflicting.
                ws[i] = Watcher {
                    cref: w.cref,
                    blocker: first,
                };
                i += 1;
                if self.lit_value(first) == LBool::False {
                    self.qhead = self.trail.len();
                    conflict = Some(w.cref);
                    self.watches[p.code()] = ws;
                    break 'queue;
                }
                self.enqueue(first, Some(w.cref));
            }
            self.watches[p.code()] = ws;
        }
        conflict
    }

    fn cancel_until(&mut self, target: u32) {
        if self.decision_level() <= target {
            return;
        }
        let sep = self.trail_lim[target as usize];
        for idx in (sep..self.trail.len()).rev() {
            let l = self.trail[idx];
            let v = l.var().index();
            self.phase[v] = l.is_positive();
            self.assign[v] = LBool::Undef;
            self.reason[v] = None;
            self.order.restore(v as u32, &self.activity);
        }
        self.trail.truncate(sep);
        self.trail_lim.truncate(target as usize);
        self.qhead = sep;
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.order.bumped(v as u32, &self.activity);
    }

    fn bump_clause(&mut self, cref: usize) {
        if !self.clauses[cref].learnt {
            return;
        }
        self.clauses[cref].activity += self.clause_inc;
        if self.clauses[cref].activity > 1e20 {
            for c in &mut self.clauses {
                c.activity *= 1e-20;
            }
            self.clause_inc *= 1e-20;
        }
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first) and the level to backtrack to.
    fn analyze(&mut self, confl: u32) -> (Vec<Literal>, u32) {
        let mut learnt: Vec<Literal> = vec![Literal::positive(VarId::new(1))]; // placeholder
        let mut counter = 0u32;
        let mut p: Option<Literal> = None;
        let mut index = self.trail.len();
        let mut confl = confl as usize;
        loop {
            self.bump_clause(confl);
            let skip = usize::from(p.is_some());
            for k in skip..self.clauses[confl].lits.len() {
                let q = self.clauses[confl].lits[k];
                let v = q.var().index();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(v);
                    if self.level[v] >= self.decision_level() {
                        counter += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var().index()] {
                    break;
                }
            }
            let lit = self.trail[index];
            let v = lit.var().index();
            p = Some(lit);
            self.seen[v] = false;
            counter -= 1;
            if counter == 0 {
                break;
            }
            confl = self.reason[v].expect("non-decision on conflict path has a reason") as usize;
        }
        learnt[0] = !p.unwrap();

        // Cheap self-subsumption: a literal is redundant when its reason's
        // remaining literals are all already in the clause (or root-level).
        let mut keep = vec![true; learnt.len()];
        for (i, &l) in learnt.iter().enumerate().skip(1) {
            if let Some(r) = self.reason[l.var().index()] {
                let redundant = self.clauses[r as usize].lits[1..].iter().all(|q| {
                    let v = q.var().index();
                    self.seen[v] || self.level[v] == 0
                });
                keep[i] = !redundant;
            }
        }
        let mut reduced: Vec<Literal> = learnt
            .iter()
            .zip(&keep)
            .filter_map(|(&l, &k)| k.then_some(l))
            .collect();
        for &l in &learnt {
            self.seen[l.var().index()] = false;
        }

        // Backtrack to the second-highest level in the clause; move that
        // literal to position 1 so it is watched.
        let bt = if reduced.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..reduced.len() {
                if self.level[reduced[i].var().index()]
                    > self.level[reduced[max_i].var().index()]
                {
                    max_i = i;
                }
            }
            reduced.swap(1, max_i);
            self.level[reduced[1].var().index()]
        };
        (reduced, bt)
    }

    fn pick_branch(&mut self) -> Option<u32> {
        if !self.assign.is_empty() && self.rng.next() % RANDOM_BRANCH_ONE_IN == 0 {
            let v = (self.rng.next() % self.assign.len() as u64) as usize;
            if self.assign[v] == LBool::Undef {
                return Some(v as u32);
            }
        }
        while let Some(v) = self.order.pop_max(&self.activity) {
            if self.assign[v as usize] == LBool::Undef {
                return Some(v);
            }
        }
        None
    }

    fn reduce_learnts(&mut self) {
        let mut keyed: Vec<(f32, u32)> = self
            .learnt_refs
            .iter()
            .map(|&c| (self.clauses[c as usize].activity, c))
            .collect();
        keyed.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        let half = keyed.len() / 2;
        let mut kept = Vec::with_capacity(keyed.len() - half);
        for (i, &(_, cref)) in keyed.iter().enumerate() {
            let c = &self.clauses[cref as usize];
            let head = c.lits[0].var().index();
            let locked =
                self.reason[head] == Some(cref) && self.assign[head] != LBool::Undef;
            if i < half && c.lits.len() > 2 && !locked {
                self.detach(cref);
            } else {
                kept.push(cref);
            }
        }
        self.learnt_refs = kept;
    }

    fn detach(&mut self, cref: u32) {
        let (w0, w1) = {
            let c = &self.clauses[cref as usize];
            ((!c.lits[0]).code(), (!c.lits[1]).code())
        };
        for w in [w0, w1] {
            let ws = &mut self.watches[w];
            if let Some(pos) = ws.iter().position(|x| x.cref == cref) {
                ws.swap_remove(pos);
            }
        }
        self.clauses[cref as usize].deleted = true;
        self.clauses[cref as usize].lits.clear();
        self.clauses[cref as usize].lits.shrink_to_fit();
    }

    /// Runs the CDCL loop to completion. Returns true and stores a model on
    /// SAT; false on UNSAT (and the solver stays UNSAT from then on).
    pub fn solve(&mut self) -> bool {
        if !self.ok {
            return false;
        }
        self.cancel_until(0);
        if self.propagate().is_some() {
            self.ok = false;
            return false;
        }
        self.max_learnts = self.max_learnts.max(self.clauses.len() / 3);
        let mut restarts = 0u32;
        let mut budget = RESTART_BASE;
        let mut since_restart = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.conflicts += 1;
                since_restart += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return false;
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let asserting = learnt[0];
                    let cref = self.attach(learnt, true);
                    self.bump_clause(cref as usize);
                    self.enqueue(asserting, Some(cref));
                }
                self.var_inc /= VAR_DECAY;
                self.clause_inc /= CLAUSE_DECAY;
            } else {
                if since_restart >= budget {
                    restarts += 1;
                    budget = RESTART_BASE * luby(restarts);
                    since_restart = 0;
                    self.cancel_until(0);
                    continue;
                }
                if self.learnt_refs.len() > self.max_learnts + self.trail.len() {
                    self.reduce_learnts();
                    self.max_learnts += self.max_learnts / 10;
                }
                match self.pick_branch() {
                    None => {
                        self.model = self
                            .assign
                            .iter()
                            .map(|&a| a == LBool::True)
                            .collect();
                        return true;
                    }
                    Some(v) => {
                        self.trail_lim.push(self.trail.len());
                        let phase = self.phase[v as usize];
                        self.enqueue(Literal::new(VarId::new(v + 1), phase), None);
                    }
                }
            }
        }
    }

    /// The model found by the last successful `solve`, indexed by
    /// [`VarId::index`].
    pub fn model(&self) -> &[bool] {
        &self.model
    }

    pub fn value(&self, var: VarId) -> bool {
        self.model[var.index()]
    }
}

/// Luby sequence 1,1,2,1,1,2,4,… as a power of two.
fn luby(i: u32) -> u64 {
    // Find the finite subsequence containing index i and its position.
    let mut k = 1u32;
    loop {
        if i == (1 << k) - 1 {
            return 1 << (k - 1);
        }
        if i < (1 << k) - 1 {
            break;
        }
        k += 1;
    }
    luby(i - (1 << (k - 1)) + 1)
}

/// Max-heap over variables keyed by activity, with an index for O(log n)
/// bump updates. Ties break toward the lower variable index.
#[derive(Debug, Default)]
struct VarOrder {
    heap: Vec<u32>,
    pos: Vec<i32>,
}

impl VarOrder {
    fn new() -> VarOrder {
        VarOrder::default()
    }

    fn push(&mut self, v: u32, act: &[f64]) {
        debug_assert_eq!(v as usize, self.pos.len());
        self.pos.push(-1);
        self.insert(v, act);
    }

    fn insert(&mut self, v: u32, act: &[f64]) {
        if self.pos[v as usize] >= 0 {
            return;
        }
        self.pos[v as usize] = self.heap.len() as i32;
        self.heap.push(v);
        self.sift_up(self.heap.len() - 1, act);
    }

    /// Re-inserts an unassigned variable after backtracking.
    fn restore(&mut self, v: u32, act: &[f64]) {
        self.insert(v, act);
    }

    fn bumped(&mut self, v: u32, act: &[f64]) {
        let p = self.pos[v as usize];
        if p >= 0 {
            self.sift_up(p as usize, act);
        }
    }

    fn pop_max(&mut self, act: &[f64]) -> Option<u32> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top as usize] = -1;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.sift_down(0, act);
        }
        Some(top)
    }

    fn better(&self, a: u32, b: u32, act: &[f64]) -> bool {
        let (aa, ab) = (act[a as usize], act[b as usize]);
        aa > ab || (aa == ab && a < b)
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if self.better(self.heap[i], self.heap[parent], act) {
                self.swap(i, parent);
                i = parent;
            } else {
                break;
            }
        }
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut best = i;
            if l < self.heap.len() && self.better(self.heap[l], self.heap[best], act) {
                best = l;
            }
            if r < self.heap.len() && self.better(self.heap[r], self.heap[best], act) {
                best = r;
            }
            if best == i {
                break;
            }
            self.swap(i, best);
            i = best;
        }
    }

    fn swap(&mut self, i: usize, j: usize) {
        self.heap.swap(i, j);
        self.pos[self.heap[i] as usize] = i as i32;
        self.pos[self.heap[j] as usize] = j as i32;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proplogic::Literal;

    fn lit(solver_vars: &[VarId], n: i32) -> Literal {
        let v = solver_vars[(n.unsigned_abs() - 1) as usize];
        Literal::new(v, n > 0)
    }

    fn setup(num_vars: usize) -> (Solver, Vec<VarId>) {
        let mut s = Solver::with_seed(7);
        let vars: Vec<VarId> = (0..num_vars).map(|_| s.new_var()).collect();
        (s, vars)
    }

    #[test]
    fn unit_propagation_chain() {
        let (mut s, v) = setup(3);
        assert!(s.add_clause(&[lit(&v, 1)]));
        assert!(s.add_clause(&[lit(&v, -1), lit(&v, 2)]));
        assert!(s.add_clause(&[lit(&v, -2), lit(&v, 3)]));
        assert!(s.solve());
        assert!(s.value(v[0]) && s.value(v[1]) && s.value(v[2]));
    }

    #[test]
    fn contradiction_is_unsat() {
        let (mut s, v) = setup(1);
        assert!(s.add_clause(&[lit(&v, 1)]));
        assert!(!s.add_clause(&[lit(&v, -1)]));
        assert!(!s.solve());
    }

    #[test]
    fn simple_sat_with_forced_literal() {
        let (mut s, v) = setup(2);
        assert!(s.add_clause(&[lit(&v, 1), lit(&v, 2)]));
        assert!(s.add_clause(&[lit(&v, -1)]));
        assert!(s.solve());
        assert!(!s.value(v[0]));
        assert!(s.value(v[1]));
    }

    #[test]
    fn incremental_clause_addition_flips_result() {
        let (mut s, v) = setup(2);
        assert!(s.add_clause(&[lit(&v, 1), lit(&v, 2)]));
        assert!(s.solve());
        assert!(s.add_clause(&[lit(&v, -1)]));
        // Adding ¬2 contradicts at the root: ¬1 already forced 2.
        assert!(!s.add_clause(&[lit(&v, -2)]));
        assert!(!s.solve());
        assert!(!s.is_ok());
    }

    #[test]
    fn pigeonhole_three_into_two_is_unsat() {
        // var p_{i,j} = pigeon i in hole j, i in 0..3, j in 0..2
        let (mut s, v) = setup(6);
        let p = |i: usize, j: usize| Literal::new(v[i * 2 + j], true);
        for i in 0..3 {
            assert!(s.add_clause(&[p(i, 0), p(i, 1)]));
        }
        for j in 0..2 {
            for a in 0..3 {
                for b in a + 1..3 {
                    s.add_clause(&[!p(a, j), !p(b, j)]);
                }
            }
        }
        assert!(!s.solve());
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let build = || {
            let (mut s, v) = setup(8);
            s.add_clause(&[lit(&v, 1), lit(&v, 2), lit(&v, 3)]);
            s.add_clause(&[lit(&v, -2), lit(&v, 4)]);
            s.add_clause(&[lit(&v, -4), lit(&v, 5), lit(&v, -6)]);
            s.add_clause(&[lit(&v, 6), lit(&v, 7)]);
            s.add_clause(&[lit(&v, -7), lit(&v, -8)]);
            assert!(s.solve());
            s.model().to_vec()
        };
        assert_eq!(build(), build());
    }
}
