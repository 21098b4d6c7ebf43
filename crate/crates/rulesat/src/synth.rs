//! Seeded synthetic tables at benchmark scale. These exist for throughput
//! and pipeline testing — rows are generated, not measured, so they say
//! nothing about accuracy on any real phenomenon.
//!
//! Labels come from a planted two-rule DNF over the generated features with
//! a small flip rate, which keeps the learned instances non-trivial: the
//! optimizer has real misclassification/sparsity trade-offs to make.

use rulesat_core::dataset::{Cell, RawTable};

/// xorshift64*; self-contained so generated fixtures never depend on RNG
/// crate versions.
struct Gen(u64);

impl Gen {
    fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.0 = x;
        x.wrapping_mul(0x2545_f491_4f6c_dd1d)
    }

    fn uniform(&mut self) -> f64 {
        (self.next() >> 11) as f64 / (1u64 << 53) as f64
    }

    fn below(&mut self, n: usize) -> usize {
        (self.next() % n as u64) as usize
    }
}

/// Numeric table: `features` float columns, labels from a planted rule
/// `(x₀ > 0.6 ∧ x₁ ≤ 0.4) ∨ (x₂ > 0.8)` with 8% label noise.
pub fn numeric_table(n: usize, features: usize, seed: u64) -> RawTable {
    assert!(features >= 3, "the planted rule needs three columns");
    let mut g = Gen(seed | 1);
    let mut columns: Vec<String> = (0..features).map(|j| format!("x{j}")).collect();
    columns.push("label".to_string());
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let vals: Vec<f64> = (0..features)
            .map(|_| (g.uniform() * 1000.0).round() / 1000.0)
            .collect();
        let mut label = (vals[0] > 0.6 && vals[1] <= 0.4) || vals[2] > 0.8;
        if g.uniform() < 0.08 {
            label = !label;
        }
        // Force both classes even for tiny n.
        if i == 0 {
            label = true;
        }
        if i == 1 {
            label = false;
        }
        let mut row: Vec<Cell> = vals.into_iter().map(Cell::Num).collect();
        row.push(Cell::Text(if label { "yes" } else { "no" }.to_string()));
        rows.push(row);
    }
    RawTable::new(columns, rows, features, "yes").expect("generated table is valid")
}

/// Categorical table: `features` columns over small alphabets, labels from a
/// planted rule `(c₀ = a0v1) ∨ (c₁ = a1v2 ∧ c₂ ≠ a2v0)` with 5% noise.
pub fn categorical_table(n: usize, features: usize, alphabet: usize, seed: u64) -> RawTable {
    assert!(features >= 3 && alphabet >= 3);
    let mut g = Gen(seed | 1);
    let mut columns: Vec<String> = (0..features).map(|j| format!("attr{j}")).collect();
    columns.push("class".to_string());
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let vals: Vec<usize> = (0..features).map(|_| g.below(alphabet)).collect();
        let mut label = vals[0] == 1 || (vals[1] == 2 && vals[2] != 0);
        if g.uniform() < 0.05 {
            label = !label;
        }
        if i == 0 {
            label = true;
        }
        if i == 1 {
            label = false;
        }
        let mut row: Vec<Cell> = vals
            .iter()
            .enumerate()
            .map(|(j, &v)| Cell::Text(format!("a{j}v{v}")))
            .collect();
        row.push(Cell::Text(if label { "e" } else { "p" }.to_string()));
        rows.push(row);
    }
    RawTable::new(columns, rows, features, "e").expect("generated table is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_both_classes() {
        let a = numeric_table(200, 5, 42);
        let b = numeric_table(200, 5, 42);
        assert_eq!(a.rows, b.rows);
        let positives = (0..a.len()).filter(|&i| a.class_value(i)).count();
        assert!(positives > 10 && positives < 190);
    }

    #[test]
    fn categorical_is_learnable_shape() {
        let t = categorical_table(100, 4, 4, 7);
        assert_eq!(t.columns.len(), 5);
        assert_eq!(t.len(), 100);
        let positives = (0..t.len()).filter(|&i| t.class_value(i)).count();
        assert!(positives > 5 && positives < 95);
    }
}
