//! The learned model: rule sets over feature literals, their application to
//! samples, the redundancy-reduction rewrites, metrics, and formatting.
//!
//! A rule is a conjunction of feature literals; a DNF rule set fires when any
//! rule holds, a CNF set when every rule (read as a disjunction) holds.
//! Negating a set swaps the form and complements every literal, which is an
//! exact involution — the route by which the IMLI learner turns its native
//! CNF models into DNF.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::dataset::{render_literal, BinaryColumn, Cell, ColumnTest, RawTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleForm {
    Dnf,
    Cnf,
}

/// One binarized feature or its complement, carrying enough provenance to
/// display itself and to test raw rows directly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureLiteral {
    /// Index into the binarized feature columns.
    pub column: usize,
    pub positive: bool,
    pub source_column: usize,
    pub source_name: String,
    pub test: ColumnTest,
}

impl FeatureLiteral {
    pub fn new(
        column: usize,
        positive: bool,
        source_column: usize,
        source_name: &str,
        test: ColumnTest,
    ) -> FeatureLiteral {
        FeatureLiteral {
            column,
            positive,
            source_column,
            source_name: source_name.to_string(),
            test,
        }
    }

    pub fn from_column(index: usize, col: &BinaryColumn, positive: bool) -> FeatureLiteral {
        FeatureLiteral {
            column: index,
            positive,
            source_column: col.source_column,
            source_name: col.source_name.clone(),
            test: col.test.clone(),
        }
    }

    pub fn negated(&self) -> FeatureLiteral {
        FeatureLiteral {
            positive: !self.positive,
            ..self.clone()
        }
    }

    pub fn render(&self) -> String {
        render_literal(&self.source_name, &self.test, self.positive)
    }

    /// The literal's truth on a binarized sample.
    pub fn holds_on_bits(&self, bits: &[bool]) -> bool {
        bits[self.column] == self.positive
    }
}

/// A conjunction of feature literals. Zero literals is permitted (the always
/// true conjunction); IMLI's CNF negation can produce such rules.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Rule {
    pub literals: Vec<FeatureLiteral>,
}

impl Rule {
    pub fn new(literals: Vec<FeatureLiteral>) -> Rule {
        Rule { literals }
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }
}

/// Provenance carried along with a trained model.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ModelMeta {
    pub learner: String,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lp: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub q: Option<usize>,
    pub seed: u64,
    pub train_seconds: f64,
    pub class_name: String,
    pub positive_label: String,
}

/// A DNF or CNF set of rules plus training provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleSet {
    pub form: RuleForm,
    pub rules: Vec<Rule>,
    pub meta: ModelMeta,
}

impl RuleSet {
    pub fn new(form: RuleForm, rules: Vec<Rule>) -> RuleSet {
        RuleSet {
            form,
            rules,
            meta: ModelMeta::default(),
        }
    }

    /// Applies the set to a binarized sample.
    ///
    /// DNF: true iff some rule's conjunction holds (an empty rule always
    /// holds; an empty rule list never fires). CNF is the dual: every rule,
    /// read as a disjunction, must hold.
    pub fn apply(&self, bits: &[bool]) -> bool {
        match self.form {
            RuleForm::Dnf => self
                .rules
                .iter()
                .any(|r| r.literals.iter().all(|l| l.holds_on_bits(bits))),
            RuleForm::Cnf => self
                .rules
                .iter()
                .all(|r| r.literals.iter().any(|l| l.holds_on_bits(bits))),
        }
    }

    /// The logical negation: form swapped, every literal complemented.
    pub fn negated(&self) -> RuleSet {
        RuleSet {
            form: match self.form {
                RuleForm::Dnf => RuleForm::Cnf,
                RuleForm::Cnf => RuleForm::Dnf,
            },
            rules: self
                .rules
                .iter()
                .map(|r| Rule::new(r.literals.iter().map(FeatureLiteral::negated).collect()))
                .collect(),
            meta: self.meta.clone(),
        }
    }

    /// Binds the model's literals to a raw table's columns by name.
    pub fn raw_predictor(&self, columns: &[String]) -> Result<RawPredictor<'_>, RulesError> {
        let mut resolved = Vec::with_capacity(self.rules.len());
        for rule in &self.rules {
            let mut cols = Vec::with_capacity(rule.len());
            for lit in &rule.literals {
                let idx = columns
                    .iter()
                    .position(|c| *c == lit.source_name)
                    .ok_or_else(|| RulesError::UnknownColumn(lit.source_name.clone()))?;
                cols.push(idx);
            }
            resolved.push(cols);
        }
        Ok(RawPredictor {
            rule_set: self,
            columns: resolved,
        })
    }
}

/// Applies a rule set directly to raw rows, evaluating each literal's test on
/// the source cell. Equivalent to binarizing with the same thresholds and
/// applying to bits.
#[derive(Debug)]
pub struct RawPredictor<'a> {
    rule_set: &'a RuleSet,
    columns: Vec<Vec<usize>>,
}

impl RawPredictor<'_> {
    pub fn predict(&self, cells: &[Cell]) -> Result<bool, RulesError> {
        let lit_holds = |rule_i: usize, lit_i: usize| -> Result<bool, RulesError> {
            let lit = &self.rule_set.rules[rule_i].literals[lit_i];
            let cell = &cells[self.columns[rule_i][lit_i]];
            let raw = lit
                .test
                .holds(cell)
                .ok_or_else(|| RulesError::NonNumericValue(lit.source_name.clone()))?;
            Ok(raw == lit.positive)
        };
        match self.rule_set.form {
            RuleForm::Dnf => {
                for (ri, rule) in self.rule_set.rules.iter().enumerate() {
                    let mut all = true;
                    for li in 0..rule.len() {
                        all &= lit_holds(ri, li)?;
                    }
                    if all {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            RuleForm::Cnf => {
                for (ri, rule) in self.rule_set.rules.iter().enumerate() {
                    let mut any = false;
                    for li in 0..rule.len() {
                        any |= lit_holds(ri, li)?;
                    }
                    if !any {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    pub fn predict_table(&self, table: &RawTable) -> Result<Vec<bool>, RulesError> {
        table.rows.iter().map(|row| self.predict(row)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RulesError {
    UnknownColumn(String),
    NonNumericValue(String),
}

impl fmt::Display for RulesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RulesError::UnknownColumn(c) => write!(f, "model references unknown column `{c}`"),
            RulesError::NonNumericValue(c) => {
                write!(f, "numeric test on non-numeric value in column `{c}`")
            }
        }
    }
}

impl core::error::Error for RulesError {}

/// Interpretability metrics: rule count, total literal count |R|, and the
/// size of the largest rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSetMetrics {
    pub rule_count: usize,
    pub total_size: usize,
    pub largest_rule: usize,
}

pub fn metrics(rs: &RuleSet) -> RuleSetMetrics {
    RuleSetMetrics {
        rule_count: rs.rules.len(),
        total_size: rs.rules.iter().map(Rule::len).sum(),
        largest_rule: rs.rules.iter().map(Rule::len).max().unwrap_or(0),
    }
}

/// The three redundancy rewrites, applied within each rule of a DNF set:
///
/// 1. duplicate literals are deduplicated;
/// 2. ordinal literals on the same source column merge by dominance — among
///    `> a` bounds the largest survives, among `≤ b` bounds the smallest,
///    and an empty interval (`> a` with `≤ b`, b ≤ a) kills the rule;
/// 3. a rule containing a literal and its exact opposite is deleted.
///
/// Rule order is otherwise preserved, and the result never has more literals
/// or rules than the input.
pub fn reduce_redundancy(rs: &RuleSet) -> RuleSet {
    assert_eq!(rs.form, RuleForm::Dnf, "reduction is defined on DNF sets");
    let rules = rs.rules.iter().filter_map(reduce_rule).collect();
    RuleSet {
        form: RuleForm::Dnf,
        rules,
        meta: rs.meta.clone(),
    }
}

fn reduce_rule(rule: &Rule) -> Option<Rule> {
    // Deduplicate on (binary column, polarity), keeping first occurrences.
    let mut lits: Vec<&FeatureLiteral> = Vec::with_capacity(rule.len());
    for lit in &rule.literals {
        if !lits
            .iter()
            .any(|l| l.column == lit.column && l.positive == lit.positive)
        {
            lits.push(lit);
        }
    }

    // Opposite features in the same rule make it unsatisfiable.
    for (i, a) in lits.iter().enumerate() {
        if lits[i + 1..]
            .iter()
            .any(|b| b.column == a.column && b.positive != a.positive)
        {
            return None;
        }
    }

    // Ordinal dominance per source column: tightest lower and upper bound
    // survive; a crossed pair empties the interval.
    let mut keep = alloc::vec![true; lits.len()];
    let sources: alloc::collections::BTreeSet<usize> = lits
        .iter()
        .filter(|l| matches!(l.test, ColumnTest::AtMost(_)))
        .map(|l| l.source_column)
        .collect();
    for source in sources {
        let mut best_upper: Option<(usize, f64)> = None; // value ≤ t, smallest t
        let mut best_lower: Option<(usize, f64)> = None; // value > t, largest t
        for (i, lit) in lits.iter().enumerate() {
            let ColumnTest::AtMost(t) = lit.test else {
                continue;
            };
            if lit.source_column != source {
                continue;
            }
            if lit.positive {
                if best_upper.is_none_or(|(_, b)| t < b) {
                    best_upper = Some((i, t));
                }
            } else if best_lower.is_none_or(|(_, b)| t > b) {
                best_lower = Some((i, t));
            }
        }
        if let (Some((_, upper)), Some((_, lower))) = (best_upper, best_lower) {
            if upper <= lower {
                return None; // lower < value ≤ upper is empty
            }
        }
        for (i, lit) in lits.iter().enumerate() {
            let ColumnTest::AtMost(_) = lit.test else {
                continue;
            };
            if lit.source_column != source {
                continue;
            }
            let chosen = if lit.positive { best_upper } else { best_lower };
            keep[i] = chosen.map(|(j, _)| j) == Some(i);
        }
    }

    Some(Rule::new(
        lits.iter()
            .zip(&keep)
            .filter_map(|(l, &k)| k.then(|| (*l).clone()))
            .collect(),
    ))
}

/// Formats the set in the display grammar: each rule parenthesized, literals
/// joined by `and`, rules joined by `or` (dual connectives for CNF). The
/// empty DNF set renders as `(false)`, an empty DNF rule as `(true)`.
pub fn format_ruleset(rs: &RuleSet) -> String {
    let (inner, outer, empty_rule, empty_set) = match rs.form {
        RuleForm::Dnf => (" and ", " or ", "(true)", "(false)"),
        RuleForm::Cnf => (" or ", " and ", "(false)", "(true)"),
    };
    if rs.rules.is_empty() {
        return empty_set.to_string();
    }
    let parts: Vec<String> = rs
        .rules
        .iter()
        .map(|r| {
            if r.is_empty() {
                empty_rule.to_string()
            } else {
                let lits: Vec<String> = r.literals.iter().map(FeatureLiteral::render).collect();
                alloc::format!("({})", lits.join(inner))
            }
        })
        .collect();
    parts.join(outer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    // Fixture columns: 0 = Age ≤ 18, 1 = Age ≤ 20, 2 = Height ≤ 2, 3 = Hike.
    fn age_gt(col: usize, t: f64) -> FeatureLiteral {
        FeatureLiteral::new(col, false, 0, "Age", ColumnTest::AtMost(t))
    }

    fn height_le(positive: bool) -> FeatureLiteral {
        FeatureLiteral::new(2, positive, 1, "Height", ColumnTest::AtMost(2.0))
    }

    fn hike(positive: bool) -> FeatureLiteral {
        FeatureLiteral::new(3, positive, 2, "Hike", ColumnTest::Is("yes".to_string()))
    }

    fn dnf(rules: Vec<Rule>) -> RuleSet {
        RuleSet::new(RuleForm::Dnf, rules)
    }

    #[test]
    fn apply_example_rule_set() {
        // R = (x¹) ∨ (x² ∧ ¬x³) over X₁ = [0,0,1] is 0; |R| = 3.
        let r = dnf(vec![
            Rule::new(vec![FeatureLiteral::new(
                0,
                true,
                0,
                "Man",
                ColumnTest::Is("yes".to_string()),
            )]),
            Rule::new(vec![
                FeatureLiteral::new(1, true, 1, "Smoke", ColumnTest::Is("yes".to_string())),
                FeatureLiteral::new(2, false, 2, "Hike", ColumnTest::Is("yes".to_string())),
            ]),
        ]);
        assert!(!r.apply(&[false, false, true]));
        assert!(r.apply(&[true, false, false]));
        let m = metrics(&r);
        assert_eq!(
            (m.rule_count, m.total_size, m.largest_rule),
            (2, 3, 2)
        );
    }

    #[test]
    fn empty_shapes() {
        let empty_set = dnf(vec![]);
        assert!(!empty_set.apply(&[true, true, true, true]));
        assert_eq!(metrics(&empty_set), RuleSetMetrics {
            rule_count: 0,
            total_size: 0,
            largest_rule: 0
        });
        assert_eq!(format_ruleset(&empty_set), "(false)");

        let with_empty_rule = dnf(vec![Rule::default()]);
        assert!(with_empty_rule.apply(&[false, false, false, false]));
        assert_eq!(format_ruleset(&with_empty_rule), "(true)");
    }

    #[test]
    fn sizes_with_a_zero_rule() {
        let mk = |n: usize| {
            Rule::new(
                (0..n)
                    .map(|i| {
                        FeatureLiteral::new(i, true, i, "f", ColumnTest::Is("1".to_string()))
                    })
                    .collect(),
            )
        };
        let rs = dnf(vec![mk(6), mk(11), mk(0)]);
        let m = metrics(&rs);
        assert_eq!((m.total_size, m.largest_rule), (17, 11));
    }

    #[test]
    fn ordinal_dominance_rewrite() {
        // (Age>18 ∧ Age>20) ∨ (Height≤2) → (Age>20) ∨ (Height≤2)
        let rs = dnf(vec![
            Rule::new(vec![age_gt(0, 18.0), age_gt(1, 20.0)]),
            Rule::new(vec![height_le(true)]),
        ]);
        let reduced = reduce_redundancy(&rs);
        assert_eq!(format_ruleset(&reduced), "(Age > 20.0) or (Height ≤ 2.0)");
    }

    #[test]
    fn opposite_features_delete_rules() {
        // (Age>20) ∨ (Height≤2 ∧ Height>2) ∨ (Hike ∧ Not Hike) → (Age>20)
        let rs = dnf(vec![
            Rule::new(vec![age_gt(1, 20.0)]),
            Rule::new(vec![height_le(true), height_le(false)]),
            Rule::new(vec![hike(true), hike(false)]),
        ]);
        let reduced = reduce_redundancy(&rs);
        assert_eq!(format_ruleset(&reduced), "(Age > 20.0)");
    }

    #[test]
    fn duplicate_features_dedup() {
        // (Hike ∧ Hike) ∨ (Age>20) → (Hike) ∨ (Age>20)
        let rs = dnf(vec![
            Rule::new(vec![hike(true), hike(true)]),
            Rule::new(vec![age_gt(1, 20.0)]),
        ]);
        let reduced = reduce_redundancy(&rs);
        assert_eq!(format_ruleset(&reduced), "(Hike) or (Age > 20.0)");
    }

    #[test]
    fn mixed_direction_interval_is_kept() {
        // > 18 together with ≤ 20 is a satisfiable interval; no rewrite given.
        let rs = dnf(vec![Rule::new(vec![
            age_gt(0, 18.0),
            FeatureLiteral::new(1, true, 0, "Age", ColumnTest::AtMost(20.0)),
        ])]);
        let reduced = reduce_redundancy(&rs);
        assert_eq!(format_ruleset(&reduced), "(Age > 18.0 and Age ≤ 20.0)");
    }

    #[test]
    fn crossed_interval_deletes_rule() {
        // > 20 together with ≤ 18 is empty.
        let rs = dnf(vec![
            Rule::new(vec![
                age_gt(1, 20.0),
                FeatureLiteral::new(0, true, 0, "Age", ColumnTest::AtMost(18.0)),
            ]),
            Rule::new(vec![hike(true)]),
        ]);
        assert_eq!(format_ruleset(&reduce_redundancy(&rs)), "(Hike)");
    }

    #[test]
    fn reduction_never_grows(){
        let rs = dnf(vec![
            Rule::new(vec![age_gt(0, 18.0), age_gt(1, 20.0), hike(true), hike(true)]),
            Rule::new(vec![height_le(true), height_le(false)]),
        ]);
        let before = metrics(&rs);
        let after = metrics(&reduce_redundancy(&rs));
        assert!(after.total_size <= before.total_size);
        assert!(after.largest_rule <= before.largest_rule);
        assert!(after.rule_count <= before.rule_count);
    }

    #[test]
    fn negation_is_involutive_and_dual() {
        let rs = dnf(vec![
            Rule::new(vec![age_gt(1, 20.0), hike(true)]),
            Rule::new(vec![height_le(true)]),
            Rule::default(),
        ]);
        let neg = rs.negated();
        assert_eq!(neg.form, RuleForm::Cnf);
        assert_eq!(neg.negated(), rs);
        for bits in 0u32..16 {
            let sample: Vec<bool> = (0..4).map(|i| bits >> i & 1 == 1).collect();
            assert_eq!(rs.apply(&sample), !neg.apply(&sample));
        }
    }

    #[test]
    fn formatting_matches_display_grammar() {
        let rs = dnf(vec![Rule::new(vec![
            FeatureLiteral::new(0, true, 0, "AreaQ", ColumnTest::AtMost(5.0)),
            FeatureLiteral::new(1, false, 1, "Alkhol", ColumnTest::AtMost(3.0)),
        ])]);
        assert_eq!(format_ruleset(&rs), "(AreaQ ≤ 5.0 and Alkhol > 3.0)");
    }

    #[test]
    fn model_json_round_trip() {
        let mut rs = dnf(vec![Rule::new(vec![age_gt(1, 20.0), hike(false)])]);
        rs.meta = ModelMeta {
            learner: "imlib".to_string(),
            k: 2,
            l: Some(2),
            lambda: Some(10),
            lp: Some(16),
            q: Some(4),
            seed: 7,
            train_seconds: 0.25,
            class_name: "class".to_string(),
            positive_label: "yes".to_string(),
        };
        let json = serde_json::to_string_pretty(&rs).unwrap();
        let back: RuleSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rs);
    }
}
