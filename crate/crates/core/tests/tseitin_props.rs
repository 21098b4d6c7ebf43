//! Exhaustive truth-table verification of the CNF conversion: for random
//! formulas, the models of the produced clauses (with the root asserted),
//! projected onto the formula's own variables, are exactly the formula's
//! models.

use proptest::prelude::*;
use std::collections::BTreeSet;

use rulesat_core::proplogic::{
    eval_formula, tseitin, Clause, Formula, Literal, VarAllocator, VarId,
};

const ORIG_VARS: u32 = 3;

fn arb_formula(depth: u32) -> BoxedStrategy<Formula> {
    let leaf = prop_oneof![
        (1..=ORIG_VARS, any::<bool>())
            .prop_map(|(v, pos)| Formula::Lit(Literal::new(VarId::new(v), pos))),
        Just(Formula::ConstTrue),
        Just(Formula::ConstFalse),
    ];
    leaf.prop_recursive(depth, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 0..3).prop_map(Formula::And),
            prop::collection::vec(inner.clone(), 0..3).prop_map(Formula::Or),
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::iff(a, b)),
        ]
    })
    .boxed()
}

fn models_of_formula(f: &Formula) -> BTreeSet<Vec<bool>> {
    let mut out = BTreeSet::new();
    for bits in 0u32..1 << ORIG_VARS {
        let values: Vec<bool> = (0..ORIG_VARS).map(|i| bits >> i & 1 == 1).collect();
        let assign = |v: VarId| values.get(v.index()).copied();
        if eval_formula(f, &assign).unwrap() {
            out.insert(values);
        }
    }
    out
}

fn projected_models(clauses: &[Clause], root: Option<Literal>, total_vars: u32) -> BTreeSet<Vec<bool>> {
    let mut out = BTreeSet::new();
    for bits in 0u64..1 << total_vars {
        let values: Vec<bool> = (0..total_vars).map(|i| bits >> i & 1 == 1).collect();
        let sat = clauses.iter().all(|c| c.satisfied_by(&values))
            && root.is_none_or(|r| r.satisfied_by(&values));
        if sat {
            out.insert(values[..ORIG_VARS as usize].to_vec());
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn projection_preserves_models(f in arb_formula(3)) {
        let mut alloc = VarAllocator::new();
        for _ in 0..ORIG_VARS {
            alloc.fresh();
        }
        let conv = tseitin(&f, &mut alloc);
        let total = alloc.count();
        prop_assume!(total <= 16); // keep enumeration tractable
        prop_assert_eq!(
            projected_models(&conv.clauses, conv.root, total),
            models_of_formula(&f)
        );
    }
}

#[test]
fn deep_nesting_example() {
    // ((a ↔ b) → ¬(c ∧ a)) exercises auxiliary allocation on both sides.
    let mut alloc = VarAllocator::new();
    let vars: Vec<VarId> = (0..ORIG_VARS).map(|_| alloc.fresh()).collect();
    let f = Formula::implies(
        Formula::iff(Formula::var(vars[0]), Formula::var(vars[1])),
        Formula::not(Formula::and(vec![
            Formula::var(vars[2]),
            Formula::var(vars[0]),
        ])),
    );
    let conv = tseitin(&f, &mut alloc);
    assert_eq!(
        projected_models(&conv.clauses, conv.root, alloc.count()),
        models_of_formula(&f)
    );
}
