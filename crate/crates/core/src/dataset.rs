//! Raw tabular data and its Boolean view: feature classification,
//! binarization, train/test splitting, and class-balanced partitions for
//! incremental training.
//!
//! Features come in four kinds. Constant columns are discarded, two-valued
//! columns become one bit, categorical columns are one-hot encoded, and
//! numeric columns are cut at interior quantile boundaries into `value ≤ t`
//! bits. Quantile boundaries are computed on the rows the binarizer was
//! fitted on (the training rows, in the experiment pipeline), never on test
//! rows.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// One table cell: a finite number or free text.
#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    /// Numbers are recognized greedily: any token that parses as a finite
    /// float is numeric, everything else stays text.
    pub fn parse(token: &str) -> Cell {
        let t = token.trim();
        match t.parse::<f64>() {
            Ok(x) if x.is_finite() => Cell::Num(canonical_f64(x)),
            _ => Cell::Text(t.to_string()),
        }
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }

    fn key(&self) -> CellKey {
        match self {
            Cell::Num(x) => CellKey::Num(canonical_f64(*x).to_bits()),
            Cell::Text(s) => CellKey::Text(s.clone()),
        }
    }

    fn is_missing(&self) -> bool {
        matches!(self, Cell::Text(s) if s.is_empty())
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Num(x) => write!(f, "{}", fmt_number(*x)),
            Cell::Text(s) => write!(f, "{s}"),
        }
    }
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Cell {}

#[derive(PartialEq, Eq, PartialOrd, Ord, Clone)]
enum CellKey {
    Num(u64),
    Text(String),
}

fn canonical_f64(x: f64) -> f64 {
    // Collapse -0.0 so value identity matches numeric equality.
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

/// Renders a threshold or numeric category the way rules display them:
/// integral values keep one decimal ("3.0"), others print shortest ("2.35").
pub fn fmt_number(x: f64) -> String {
    if x == ((x as i64) as f64) {
        format!("{x:.1}")
    } else {
        format!("{x}")
    }
}

/// Errors from table construction and the dataset operations.
#[derive(Debug, Clone, PartialEq)]
pub enum DatasetError {
    EmptyTable,
    RaggedRow { row: usize, expected: usize, got: usize },
    MissingCell { row: usize, column: usize },
    ClassColumnOutOfRange(usize),
    /// After mapping to positive-vs-rest, one side is empty.
    DegenerateClass { positives: usize, negatives: usize },
    BadQuantiles(usize),
    BadRatio(f64),
    BadPartitionSize(usize),
    EmptyTrainingSet,
    /// A kind override cannot apply to the column's values.
    BadOverride { column: usize, reason: String },
    /// The class column may not be used as a feature.
    ClassColumnAsFeature,
    /// Every feature column was discarded; nothing to learn from.
    NoUsableFeatures,
    /// A numeric test hit a non-numeric cell.
    NonNumericCell { row: usize, column: usize },
}

impl fmt::Display for DatasetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetError::EmptyTable => write!(f, "table has no rows"),
            DatasetError::RaggedRow { row, expected, got } => {
                write!(f, "row {row} has {got} cells, expected {expected}")
            }
            DatasetError::MissingCell { row, column } => {
                write!(f, "missing value at row {row}, column {column}")
            }
            DatasetError::ClassColumnOutOfRange(i) => {
                write!(f, "class column index {i} out of range")
            }
            DatasetError::DegenerateClass {
                positives,
                negatives,
            } => write!(
                f,
                "class designation yields {positives} positive / {negatives} negative samples"
            ),
            DatasetError::BadQuantiles(q) => write!(f, "quantile count {q} must be at least 2"),
            DatasetError::BadRatio(r) => write!(f, "split ratio {r} not in (0, 1]"),
            DatasetError::BadPartitionSize(lp) => {
                write!(f, "samples per partition {lp} must be at least 1")
            }
            DatasetError::EmptyTrainingSet => write!(f, "training set is empty"),
            DatasetError::BadOverride { column, reason } => {
                write!(f, "kind override for column {column}: {reason}")
            }
            DatasetError::ClassColumnAsFeature => {
                write!(f, "the class column cannot be used as a feature")
            }
            DatasetError::NoUsableFeatures => {
                write!(f, "no feature column survived binarization")
            }
            DatasetError::NonNumericCell { row, column } => {
                write!(f, "non-numeric value at row {row}, column {column}")
            }
        }
    }
}

impl core::error::Error for DatasetError {}

/// An ingested table: header labels, cell rows, and the class designation.
#[derive(Debug, Clone)]
pub struct RawTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub class_column: usize,
    pub positive_label: Cell,
}

impl RawTable {
    /// Validates shape and class designation: rows must be rectangular with
    /// no missing cells, and mapping the class column to positive-vs-rest
    /// must leave both classes inhabited.
    pub fn new(
        columns: Vec<String>,
        rows: Vec<Vec<Cell>>,
        class_column: usize,
        positive_label: &str,
    ) -> Result<RawTable, DatasetError> {
        if rows.is_empty() {
            return Err(DatasetError::EmptyTable);
        }
        if class_column >= columns.len() {
            return Err(DatasetError::ClassColumnOutOfRange(class_column));
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != columns.len() {
                return Err(DatasetError::RaggedRow {
                    row: r,
                    expected: columns.len(),
                    got: row.len(),
                });
            }
            if let Some(c) = row.iter().position(Cell::is_missing) {
                return Err(DatasetError::MissingCell { row: r, column: c });
            }
        }
        let positive_label = Cell::parse(positive_label);
        let positives = rows
            .iter()
            .filter(|row| row[class_column] == positive_label)
            .count();
        if positives == 0 || positives == rows.len() {
            return Err(DatasetError::DegenerateClass {
                positives,
                negatives: rows.len() - positives,
            });
        }
        Ok(RawTable {
            columns,
            rows,
            class_column,
            positive_label,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn class_value(&self, row: usize) -> bool {
        self.rows[row][self.class_column] == self.positive_label
    }
}

/// The four feature kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    Constant,
    Binary,
    Categorical,
    Ordinal,
}

/// Classifies a column by its values: one distinct value is constant, two is
/// binary, more than two is ordinal when all values are numeric and
/// categorical otherwise.
pub fn classify_feature(cells: &[Cell]) -> FeatureKind {
    assert!(!cells.is_empty(), "cannot classify an empty column");
    let distinct: BTreeSet<CellKey> = cells.iter().map(Cell::key).collect();
    match distinct.len() {
        1 => FeatureKind::Constant,
        2 => FeatureKind::Binary,
        _ if cells.iter().all(|c| matches!(c, Cell::Num(_))) => FeatureKind::Ordinal,
        _ => FeatureKind::Categorical,
    }
}

/// How one source column maps to binary columns.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureEncoding {
    /// Constant column, contributes nothing.
    Dropped,
    /// One bit: 1 when the cell equals this value.
    Binary { positive_value: Cell },
    /// One-hot over the ordered category list.
    Categorical { categories: Vec<String> },
    /// One `value ≤ t` bit per threshold, thresholds strictly ascending.
    Ordinal { thresholds: Vec<f64> },
}

/// A fitted per-column encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSpec {
    pub column: usize,
    pub name: String,
    pub encoding: FeatureEncoding,
}

/// The membership test one binary column performs on its source column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "op", content = "value")]
pub enum ColumnTest {
    /// Numeric `value ≤ t`; the negation displays as `value > t`.
    AtMost(f64),
    /// One-hot category equality; the negation displays as `≠`.
    Equals(String),
    /// Binary-feature equality; displays as the bare feature name when the
    /// value is truthy-like, `name is value` otherwise.
    Is(String),
}

impl ColumnTest {
    /// Whether a raw cell passes the test.
    pub fn holds(&self, cell: &Cell) -> Option<bool> {
        match self {
            ColumnTest::AtMost(t) => cell.as_number().map(|x| x <= *t),
            ColumnTest::Equals(v) | ColumnTest::Is(v) => Some(&cell.to_string() == v),
        }
    }
}

fn truthy(value: &str) -> bool {
    matches!(
        value.to_ascii_lowercase().as_str(),
        "1" | "1.0" | "true" | "yes" | "y" | "t"
    )
}

/// One column of the binarized matrix with everything needed to display the
/// feature and its negation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryColumn {
    pub source_column: usize,
    pub source_name: String,
    pub test: ColumnTest,
    /// Display for the bit being 1, e.g. "Age ≤ 20.0".
    pub label: String,
    /// Display for the bit being 0, e.g. "Age > 20.0".
    pub negated_label: String,
}

impl BinaryColumn {
    pub fn new(source_column: usize, source_name: String, test: ColumnTest) -> BinaryColumn {
        let label = render_literal(&source_name, &test, true);
        let negated_label = render_literal(&source_name, &test, false);
        BinaryColumn {
            source_column,
            source_name,
            test,
            label,
            negated_label,
        }
    }
}

/// Human-readable form of a feature literal: `Age ≤ 20.0` / `Age > 20.0`,
/// `color = red` / `color ≠ red`, and for binary features the bare name (or
/// `Not name`) when the stored value is truthy-like.
pub fn render_literal(source_name: &str, test: &ColumnTest, positive: bool) -> String {
    match test {
        ColumnTest::AtMost(t) => {
            let op = if positive { "≤" } else { ">" };
            format!("{source_name} {op} {}", fmt_number(*t))
        }
        ColumnTest::Equals(v) => {
            let op = if positive { "=" } else { "≠" };
            format!("{source_name} {op} {v}")
        }
        ColumnTest::Is(v) => {
            if truthy(v) {
                if positive {
                    source_name.to_string()
                } else {
                    format!("Not {source_name}")
                }
            } else {
                let op = if positive { "is" } else { "is-not" };
                format!("{source_name} {op} {v}")
            }
        }
    }
}

/// The binarized view: an n×m bit matrix, the class bit vector, and display
/// metadata per binary column.
#[derive(Debug, Clone)]
pub struct BinaryDataset {
    pub columns: Vec<BinaryColumn>,
    pub rows: Vec<Vec<bool>>,
    pub labels: Vec<bool>,
    pub class_name: String,
    pub positive_label: String,
}

impl BinaryDataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn num_features(&self) -> usize {
        self.columns.len()
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&y| y).count()
    }

    /// Clones the selected rows into a new dataset (columns shared).
    pub fn subset(&self, indices: &[usize]) -> BinaryDataset {
        BinaryDataset {
            columns: self.columns.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            class_name: self.class_name.clone(),
            positive_label: self.positive_label.clone(),
        }
    }
}

/// A fitted binarizer: apply it to any rows of the same table schema.
#[derive(Debug, Clone)]
pub struct Binarizer {
    pub specs: Vec<FeatureSpec>,
    class_name: String,
    positive_label: String,
}

impl Binarizer {
    /// Fits encodings on the given rows (all rows when `None`). Overrides
    /// force a column's kind; forcing is rejected when the values cannot
    /// support it.
    pub fn fit(
        table: &RawTable,
        quantiles: usize,
        fit_rows: Option<&[usize]>,
        overrides: &BTreeMap<usize, FeatureKind>,
    ) -> Result<Binarizer, DatasetError> {
        if quantiles < 2 {
            return Err(DatasetError::BadQuantiles(quantiles));
        }
        if table.rows.is_empty() {
            return Err(DatasetError::EmptyTable);
        }
        if overrides.contains_key(&table.class_column) {
            return Err(DatasetError::ClassColumnAsFeature);
        }
        let all_rows: Vec<usize>;
        let row_ids = match fit_rows {
            Some(ids) => ids,
            None => {
                all_rows = (0..table.rows.len()).collect();
                &all_rows
            }
        };
        if row_ids.is_empty() {
            return Err(DatasetError::EmptyTrainingSet);
        }

        let mut specs = Vec::new();
        for (col, name) in table.columns.iter().enumerate() {
            if col == table.class_column {
                continue;
            }
            let cells: Vec<&Cell> = row_ids.iter().map(|&r| &table.rows[r][col]).collect();
            let owned: Vec<Cell> = cells.iter().map(|c| (*c).clone()).collect();
            let kind = overrides
                .get(&col)
                .copied()
                .unwrap_or_else(|| classify_feature(&owned));
            let encoding = fit_column(col, &owned, kind, quantiles)?;
            specs.push(FeatureSpec {
                column: col,
                name: name.clone(),
                encoding,
            });
        }
        Ok(Binarizer {
            specs,
            class_name: table.columns[table.class_column].clone(),
            positive_label: table.positive_label.to_string(),
        })
    }

    /// Applies the fitted encodings to the given rows (all rows when
    /// `None`). Categories unseen during fitting encode as all-zero one-hot.
    pub fn transform(
        &self,
        table: &RawTable,
        rows: Option<&[usize]>,
    ) -> Result<BinaryDataset, DatasetError> {
        let all_rows: Vec<usize>;
        let row_ids = match rows {
            Some(ids) => ids,
            None => {
                all_rows = (0..table.rows.len()).collect();
                &all_rows
            }
        };

        let mut columns: Vec<BinaryColumn> = Vec::new();
        for spec in &self.specs {
            match &spec.encoding {
                FeatureEncoding::Dropped => {}
                FeatureEncoding::Binary { positive_value } => columns.push(BinaryColumn::new(
                    spec.column,
                    spec.name.clone(),
                    ColumnTest::Is(positive_value.to_string()),
                )),
                FeatureEncoding::Categorical { categories } => {
                    for cat in categories {
                        columns.push(BinaryColumn::new(
                            spec.column,
                            spec.name.clone(),
                            ColumnTest::Equals(cat.clone()),
                        ));
                    }
                }
                FeatureEncoding::Ordinal { thresholds } => {
                    for &t in thresholds {
                        columns.push(BinaryColumn::new(
                            spec.column,
                            spec.name.clone(),
                            ColumnTest::AtMost(t),
                        ));
                    }
                }
            }
        }
        if columns.is_empty() {
            return Err(DatasetError::NoUsableFeatures);
        }

        let mut bit_rows = Vec::with_capacity(row_ids.len());
        let mut labels = Vec::with_capacity(row_ids.len());
        for &r in row_ids {
            let mut bits = Vec::with_capacity(columns.len());
            for c in &columns {
                let cell = &table.rows[r][c.source_column];
                let bit = c.test.holds(cell).ok_or(DatasetError::NonNumericCell {
                    row: r,
                    column: c.source_column,
                })?;
                bits.push(bit);
            }
            bit_rows.push(bits);
            labels.push(table.class_value(r));
        }
        Ok(BinaryDataset {
            columns,
            rows: bit_rows,
            labels,
            class_name: self.class_name.clone(),
            positive_label: self.positive_label.clone(),
        })
    }
}

fn fit_column(
    col: usize,
    cells: &[Cell],
    kind: FeatureKind,
    quantiles: usize,
) -> Result<FeatureEncoding, DatasetError> {
    let distinct: BTreeMap<CellKey, Cell> =
        cells.iter().map(|c| (c.key(), c.clone())).collect();
    match kind {
        FeatureKind::Constant => Ok(FeatureEncoding::Dropped),
        FeatureKind::Binary => {
            if distinct.len() != 2 {
                return Err(DatasetError::BadOverride {
                    column: col,
                    reason: format!("{} distinct values, binary needs 2", distinct.len()),
                });
            }
            let pair: Vec<&Cell> = distinct.values().collect();
            Ok(FeatureEncoding::Binary {
                positive_value: pick_binary_positive(pair[0], pair[1]).clone(),
            })
        }
        FeatureKind::Categorical => {
            if distinct.len() < 3 {
                return Err(DatasetError::BadOverride {
                    column: col,
                    reason: format!(
                        "{} distinct values, one-hot needs at least 3 (use binary)",
                        distinct.len()
                    ),
                });
            }
            let mut categories: Vec<String> =
                distinct.values().map(|c| c.to_string()).collect();
            categories.sort();
            Ok(FeatureEncoding::Categorical { categories })
        }
        FeatureKind::Ordinal => {
            let mut values = Vec::with_capacity(cells.len());
            for c in cells {
                match c.as_number() {
                    Some(x) => values.push(x),
                    None => {
                        return Err(DatasetError::BadOverride {
                            column: col,
                            reason: "ordinal needs numeric values".to_string(),
                        })
                    }
                }
            }
            let thresholds = quantile_boundaries(&mut values, quantiles);
            if thresholds.is_empty() {
                // All interior boundaries collapsed onto the maximum; the
                // column cannot contribute a non-constant bit at this q.
                Ok(FeatureEncoding::Dropped)
            } else {
                Ok(FeatureEncoding::Ordinal { thresholds })
            }
        }
    }
}

/// Deterministic choice of which of two values maps to 1: the larger number
/// for numeric pairs, the truthy member for yes/no-style pairs, otherwise
/// the lexicographically larger string.
fn pick_binary_positive<'a>(a: &'a Cell, b: &'a Cell) -> &'a Cell {
    match (a, b) {
        (Cell::Num(x), Cell::Num(y)) => {
            if x >= y {
                a
            } else {
                b
            }
        }
        _ => {
            let (sa, sb) = (a.to_string(), b.to_string());
            match (truthy(&sa), truthy(&sb)) {
                (true, false) => a,
                (false, true) => b,
                _ => {
                    if sa >= sb {
                        a
                    } else {
                        b
                    }
                }
            }
        }
    }
}

/// Interior quantile boundaries (linear interpolation between order
/// statistics), deduplicated, and trimmed of cuts at or above the maximum
/// that would yield constant columns.
fn quantile_boundaries(values: &mut [f64], quantiles: usize) -> Vec<f64> {
    values.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    let max = values[n - 1];
    let mut out: Vec<f64> = Vec::with_capacity(quantiles - 1);
    for i in 1..quantiles {
        let p = i as f64 / quantiles as f64;
        let pos = (n - 1) as f64 * p;
        let lo = pos as usize; // truncation == floor for non-negative
        let frac = pos - lo as f64;
        let v = if frac > 0.0 && lo + 1 < n {
            values[lo] + frac * (values[lo + 1] - values[lo])
        } else {
            values[lo]
        };
        if v < max && out.last() != Some(&v) {
            out.push(v);
        }
    }
    out
}

/// Fit-and-transform over the whole table: the plain binarize operation.
pub fn binarize(table: &RawTable, quantiles: usize) -> Result<BinaryDataset, DatasetError> {
    Binarizer::fit(table, quantiles, None, &BTreeMap::new())?.transform(table, None)
}

/// Seeded uniform split of `0..n` into round(ratio·n) train indices and the
/// rest; both sides come back sorted.
pub fn split_indices(
    n: usize,
    ratio: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>), DatasetError> {
    if n == 0 {
        return Err(DatasetError::EmptyTable);
    }
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(DatasetError::BadRatio(ratio));
    }
    let n_train = ((ratio * n as f64) + 0.5) as usize; // round half up
    let n_train = n_train.min(n);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut train = idx[..n_train].to_vec();
    let mut test = idx[n_train..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Splits a binarized dataset by row. Same seed, same split.
pub fn split_train_test(
    ds: &BinaryDataset,
    ratio: f64,
    seed: u64,
) -> Result<(BinaryDataset, BinaryDataset), DatasetError> {
    let (train, test) = split_indices(ds.len(), ratio, seed)?;
    Ok((ds.subset(&train), ds.subset(&test)))
}

/// Partition layout for incremental training: disjoint index sets covering
/// the training rows, with per-class counts across partitions differing by
/// at most one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionPlan {
    pub parts: Vec<Vec<usize>>,
    pub seed: u64,
}

/// Builds `ceil(n / lp)` partitions. Each class's indices are shuffled and
/// dealt round-robin (the second class continuing where the first stopped,
/// so partition sizes stay within `lp`).
pub fn make_partitions(
    ds: &BinaryDataset,
    samples_per_partition: usize,
    seed: u64,
) -> Result<PartitionPlan, DatasetError> {
    if ds.is_empty() {
        return Err(DatasetError::EmptyTrainingSet);
    }
    if samples_per_partition == 0 {
        return Err(DatasetError::BadPartitionSize(0));
    }
    let n = ds.len();
    let p = n.div_ceil(samples_per_partition);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut negatives: Vec<usize> = (0..n).filter(|&i| !ds.labels[i]).collect();
    let mut positives: Vec<usize> = (0..n).filter(|&i| ds.labels[i]).collect();
    negatives.shuffle(&mut rng);
    positives.shuffle(&mut rng);

    let mut parts: Vec<Vec<usize>> = alloc::vec![Vec::new(); p];
    let mut slot = 0usize;
    for idx in negatives.into_iter().chain(positives) {
        parts[slot % p].push(idx);
        slot += 1;
    }
    for part in &mut parts {
        part.sort_unstable();
    }
    Ok(PartitionPlan { parts, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn cells(tokens: &[&str]) -> Vec<Cell> {
        tokens.iter().map(|t| Cell::parse(t)).collect()
    }

    #[test]
    fn classify_the_four_kinds() {
        assert_eq!(classify_feature(&cells(&["a", "a", "a"])), FeatureKind::Constant);
        assert_eq!(classify_feature(&cells(&["yes", "no", "yes"])), FeatureKind::Binary);
        assert_eq!(
            classify_feature(&cells(&["1.2", "3.4", "2.2", "5.0"])),
            FeatureKind::Ordinal
        );
        assert_eq!(
            classify_feature(&cells(&["red", "green", "blue"])),
            FeatureKind::Categorical
        );
    }

    #[test]
    fn two_valued_numeric_is_binary_not_ordinal() {
        assert_eq!(classify_feature(&cells(&["3", "7", "3", "7"])), FeatureKind::Binary);
    }

    fn toy_table() -> RawTable {
        // columns: const, flag, color, size, class
        let header = vec![
            "const".to_string(),
            "flag".to_string(),
            "color".to_string(),
            "size".to_string(),
            "class".to_string(),
        ];
        let rows = vec![
            cells(&["k", "yes", "red", "1", "pos"]),
            cells(&["k", "no", "green", "2", "neg"]),
            cells(&["k", "yes", "blue", "3", "neg"]),
            cells(&["k", "no", "red", "4", "pos"]),
        ];
        RawTable::new(header, rows, 4, "pos").unwrap()
    }

    #[test]
    fn binarize_shapes_and_labels() {
        let ds = binarize(&toy_table(), 2).unwrap();
        // const dropped; flag → 1; color → 3 one-hot; size (q=2) → 1 cut at 2.5
        assert_eq!(ds.num_features(), 5);
        assert_eq!(ds.labels, vec![true, false, false, true]);
        let flag = &ds.columns[0];
        assert_eq!(flag.label, "flag");
        assert_eq!(flag.negated_label, "Not flag");
        let size = ds.columns.last().unwrap();
        assert_eq!(size.label, "size ≤ 2.5");
        assert_eq!(size.negated_label, "size > 2.5");
        let size_bits: Vec<bool> = ds.rows.iter().map(|r| r[4]).collect();
        assert_eq!(size_bits, vec![true, true, false, false]);
    }

    #[test]
    fn one_hot_rows_sum_to_one() {
        let ds = binarize(&toy_table(), 2).unwrap();
        for row in &ds.rows {
            let hot: usize = (1..4).map(|i| usize::from(row[i])).sum();
            assert_eq!(hot, 1);
        }
    }

    #[test]
    fn ordinal_read_back_matches_threshold() {
        let ds = binarize(&toy_table(), 4).unwrap();
        let table = toy_table();
        for (ci, col) in ds.columns.iter().enumerate() {
            if let ColumnTest::AtMost(t) = col.test {
                for (ri, row) in ds.rows.iter().enumerate() {
                    let raw = table.rows[ri][col.source_column].as_number().unwrap();
                    assert_eq!(row[ci], raw <= t);
                }
            }
        }
    }

    #[test]
    fn constant_column_contributes_nothing() {
        let ds = binarize(&toy_table(), 2).unwrap();
        assert!(ds.columns.iter().all(|c| c.source_column != 0));
    }

    #[test]
    fn quantile_median_of_four() {
        let mut vals = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_boundaries(&mut vals, 2), vec![2.5]);
    }

    #[test]
    fn quantile_dedups_ties() {
        let mut vals = [1.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 9.0];
        let cuts = quantile_boundaries(&mut vals, 4);
        assert_eq!(cuts, vec![2.0]);
    }

    #[test]
    fn missing_cells_are_rejected_with_row_index() {
        let header = vec!["a".to_string(), "class".to_string()];
        let rows = vec![cells(&["1", "p"]), cells(&["", "n"])];
        assert_eq!(
            RawTable::new(header, rows, 1, "p").unwrap_err(),
            DatasetError::MissingCell { row: 1, column: 0 }
        );
    }

    #[test]
    fn split_sizes_and_determinism() {
        let (train, test) = split_indices(150, 0.8, 9).unwrap();
        assert_eq!(train.len(), 120);
        assert_eq!(test.len(), 30);
        assert_eq!(split_indices(150, 0.8, 9).unwrap(), (train, test));

        let (all, none) = split_indices(5, 1.0, 1).unwrap();
        assert_eq!(all.len(), 5);
        assert!(none.is_empty());
    }

    #[test]
    fn split_is_a_partition_of_rows() {
        let (train, test) = split_indices(37, 0.6, 3).unwrap();
        let mut union: Vec<usize> = train.iter().chain(test.iter()).copied().collect();
        union.sort_unstable();
        assert_eq!(union, (0..37).collect::<Vec<_>>());
    }

    fn flat_dataset(labels: Vec<bool>) -> BinaryDataset {
        BinaryDataset {
            columns: vec![BinaryColumn::new(
                0,
                "f".to_string(),
                ColumnTest::Is("yes".to_string()),
            )],
            rows: labels.iter().map(|&y| vec![y]).collect(),
            labels,
            class_name: "class".to_string(),
            positive_label: "yes".to_string(),
        }
    }

    #[test]
    fn partitions_balance_classes() {
        // 6 negative, 4 positive, lp = 4 → 3 partitions, negatives (2,2,2),
        // positives spread (2,1,1) in some order.
        let labels = vec![
            false, false, false, false, false, false, true, true, true, true,
        ];
        let ds = flat_dataset(labels.clone());
        let plan = make_partitions(&ds, 4, 11).unwrap();
        assert_eq!(plan.parts.len(), 3);
        let mut neg_counts: Vec<usize> = Vec::new();
        let mut pos_counts: Vec<usize> = Vec::new();
        for part in &plan.parts {
            neg_counts.push(part.iter().filter(|&&i| !labels[i]).count());
            pos_counts.push(part.iter().filter(|&&i| labels[i]).count());
        }
        assert_eq!(neg_counts, vec![2, 2, 2]);
        let mut sorted_pos = pos_counts.clone();
        sorted_pos.sort_unstable();
        assert_eq!(sorted_pos, vec![1, 1, 2]);
        assert!(plan.parts.iter().all(|p| p.len() <= 4));
    }

    #[test]
    fn one_partition_when_lp_covers_everything() {
        let ds = flat_dataset(vec![true, false, true, false]);
        let plan = make_partitions(&ds, 100, 0).unwrap();
        assert_eq!(plan.parts.len(), 1);
        assert_eq!(plan.parts[0], vec![0, 1, 2, 3]);
    }

    #[test]
    fn balanced_two_by_two() {
        let ds = flat_dataset(vec![true, false, true, false]);
        let plan = make_partitions(&ds, 2, 5).unwrap();
        assert_eq!(plan.parts.len(), 2);
        for part in &plan.parts {
            assert_eq!(part.len(), 2);
            assert_eq!(part.iter().filter(|&&i| ds.labels[i]).count(), 1);
        }
    }
}
