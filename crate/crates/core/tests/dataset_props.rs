//! Property tests for splitting, partitioning, and binarization round-trips.

mod common;

use proptest::prelude::*;

use common::bit_dataset;
use rulesat_core::dataset::{
    binarize, make_partitions, split_indices, split_train_test, Cell, ColumnTest, RawTable,
};

proptest! {
    #[test]
    fn partitions_are_disjoint_covering_and_balanced(
        n in 1usize..2000,
        lp_frac in 0.0f64..1.0,
        seed in any::<u64>(),
        label_bias in 0.05f64..0.95,
    ) {
        let lp = 1 + (lp_frac * n as f64) as usize;
        let mut state = seed;
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            labels.push((state >> 33) as f64 / f64::from(u32::MAX) * 2.0 < label_bias * 2.0);
        }
        let rows = labels.iter().map(|&y| vec![y]).collect();
        let ds = bit_dataset(rows, labels.clone());
        let plan = make_partitions(&ds, lp, seed).unwrap();

        prop_assert_eq!(plan.parts.len(), n.div_ceil(lp));
        // Disjoint and covering.
        let mut seen = vec![false; n];
        for part in &plan.parts {
            prop_assert!(!part.is_empty());
            prop_assert!(part.len() <= lp);
            for &i in part {
                prop_assert!(!seen[i], "index {} appears twice", i);
                seen[i] = true;
            }
        }
        prop_assert!(seen.iter().all(|&s| s));
        // Per-class counts across partitions differ by at most one.
        for class in [false, true] {
            let counts: Vec<usize> = plan
                .parts
                .iter()
                .map(|p| p.iter().filter(|&&i| labels[i] == class).count())
                .collect();
            let (lo, hi) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
            prop_assert!(hi - lo <= 1, "class {} counts {:?}", class, counts);
        }
        // Same seed reproduces the plan.
        prop_assert_eq!(plan, make_partitions(&ds, lp, seed).unwrap());
    }

    #[test]
    fn split_partitions_the_rows(n in 1usize..500, ratio in 0.01f64..1.0, seed in any::<u64>()) {
        let (train, test) = split_indices(n, ratio, seed).unwrap();
        prop_assert_eq!(train.len(), ((ratio * n as f64) + 0.5) as usize);
        let mut union: Vec<usize> = train.iter().chain(test.iter()).copied().collect();
        union.sort_unstable();
        prop_assert_eq!(union, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn binarized_bits_read_back(values in prop::collection::vec(-50i32..50, 5..40), q in 2usize..6) {
        let mut rows: Vec<Vec<Cell>> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                vec![
                    Cell::Num(f64::from(v) / 4.0),
                    Cell::Text(if i % 3 == 0 { "p" } else { "n" }.to_string()),
                ]
            })
            .collect();
        // Both classes always present for 5+ rows.
        rows[0][1] = Cell::Text("p".to_string());
        rows[1][1] = Cell::Text("n".to_string());
        let table = RawTable::new(
            vec!["x".to_string(), "class".to_string()],
            rows,
            1,
            "p",
        )
        .unwrap();
        match binarize(&table, q) {
            Err(_) => {} // constant or fully-collapsed column
            Ok(ds) => {
                for (ci, col) in ds.columns.iter().enumerate() {
                    let ColumnTest::AtMost(t) = col.test else { continue };
                    for (ri, row) in ds.rows.iter().enumerate() {
                        let raw = table.rows[ri][0].as_number().unwrap();
                        prop_assert_eq!(row[ci], raw <= t);
                    }
                    // Thresholds never produce constant columns.
                    let bits: Vec<bool> = ds.rows.iter().map(|r| r[ci]).collect();
                    prop_assert!(bits.iter().any(|&b| b) && !bits.iter().all(|&b| b));
                }
            }
        }
    }
}

#[test]
fn split_train_test_carries_rows_and_labels() {
    let labels = vec![true, false, true, false, true, false, true, false];
    let rows: Vec<Vec<bool>> = (0..8).map(|i| vec![i % 2 == 0, i < 4]).collect();
    let ds = bit_dataset(rows.clone(), labels.clone());
    let (train, test) = split_train_test(&ds, 0.75, 42).unwrap();
    assert_eq!(train.len(), 6);
    assert_eq!(test.len(), 2);
    let mut reassembled: Vec<(Vec<bool>, bool)> = train
        .rows
        .iter()
        .cloned()
        .zip(train.labels.iter().copied())
        .chain(test.rows.iter().cloned().zip(test.labels.iter().copied()))
        .collect();
    reassembled.sort();
    let mut original: Vec<(Vec<bool>, bool)> =
        rows.into_iter().zip(labels).collect();
    original.sort();
    assert_eq!(reassembled, original);
}
