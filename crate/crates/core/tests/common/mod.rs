//! Shared fixtures for the integration suites.

use rand::Rng;
use rulesat_core::dataset::{BinaryColumn, BinaryDataset, ColumnTest};

/// A dataset of plain named bits, enough for encoder-level tests.
pub fn bit_dataset(rows: Vec<Vec<bool>>, labels: Vec<bool>) -> BinaryDataset {
    let m = rows.first().map(Vec::len).unwrap_or(0);
    BinaryDataset {
        columns: (0..m)
            .map(|j| BinaryColumn::new(j, format!("f{j}"), ColumnTest::Is("1".to_string())))
            .collect(),
        rows,
        labels,
        class_name: "class".to_string(),
        positive_label: "1".to_string(),
    }
}

pub fn random_bit_dataset<R: Rng>(rng: &mut R, n: usize, m: usize) -> BinaryDataset {
    let rows: Vec<Vec<bool>> = (0..n)
        .map(|_| (0..m).map(|_| rng.gen_bool(0.5)).collect())
        .collect();
    let labels: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    bit_dataset(rows, labels)
}
