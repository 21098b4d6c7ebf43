//! File ingestion and emission: CSV tables, binarized-matrix dumps with their
//! JSON label sidecar, and model JSON.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use rulesat_core::dataset::{BinaryColumn, BinaryDataset, Cell, FeatureKind, RawTable};
use rulesat_core::rules::RuleSet;

/// A parsed CSV: header plus cell rows, before class designation.
#[derive(Debug, Clone)]
pub struct CsvTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

pub fn read_csv(path: &Path) -> Result<CsvTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let columns: Vec<String> = reader
        .headers()
        .context("csv header")?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("csv row {}", i + 1))?;
        rows.push(record.iter().map(Cell::parse).collect());
    }
    Ok(CsvTable { columns, rows })
}

/// Resolves a column given by name or 0-based index.
pub fn resolve_column(columns: &[String], spec: &str) -> Result<usize> {
    if let Some(i) = columns.iter().position(|c| c == spec) {
        return Ok(i);
    }
    if let Ok(i) = spec.parse::<usize>() {
        if i < columns.len() {
            return Ok(i);
        }
    }
    bail!(
        "no column `{spec}` (available: {})",
        columns.join(", ")
    )
}

/// Parses repeated `--kind column=kind` overrides.
pub fn parse_overrides(
    columns: &[String],
    specs: &[String],
) -> Result<BTreeMap<usize, FeatureKind>> {
    let mut out = BTreeMap::new();
    for spec in specs {
        let Some((col, kind)) = spec.rsplit_once('=') else {
            bail!("kind override `{spec}` is not of the form column=kind");
        };
        let idx = resolve_column(columns, col)?;
        let kind = match kind {
            "constant" | "drop" => FeatureKind::Constant,
            "binary" => FeatureKind::Binary,
            "categorical" => FeatureKind::Categorical,
            "ordinal" => FeatureKind::Ordinal,
            other => bail!("unknown feature kind `{other}`"),
        };
        out.insert(idx, kind);
    }
    Ok(out)
}

/// Builds the validated table: class column defaults to the last header and
/// the positive label, when omitted, is inferred for two-valued class
/// columns by the same truthy-or-larger rule binarization uses.
pub fn designate_class(
    csv: CsvTable,
    class_col: Option<&str>,
    positive: Option<&str>,
) -> Result<RawTable> {
    let class_column = match class_col {
        Some(spec) => resolve_column(&csv.columns, spec)?,
        None => csv.columns.len().saturating_sub(1),
    };
    let positive = match positive {
        Some(v) => v.to_string(),
        None => infer_positive(&csv, class_column)?,
    };
    RawTable::new(csv.columns, csv.rows, class_column, &positive)
        .map_err(|e| anyhow::anyhow!("{e}"))
}

fn infer_positive(csv: &CsvTable, class_column: usize) -> Result<String> {
    let mut distinct: Vec<String> = Vec::new();
    for row in &csv.rows {
        let v = row
            .get(class_column)
            .map(ToString::to_string)
            .unwrap_or_default();
        if !distinct.contains(&v) {
            distinct.push(v);
        }
    }
    match distinct.len() {
        2 => {
            distinct.sort();
            // Prefer the truthy-looking value, else the lexicographically
            // larger one, mirroring binary-feature mapping.
            let truthy = ["1", "1.0", "true", "yes", "y", "t"];
            let pick = distinct
                .iter()
                .find(|v| truthy.contains(&v.to_ascii_lowercase().as_str()))
                .unwrap_or(&distinct[1]);
            Ok(pick.clone())
        }
        n => bail!(
            "class column has {n} distinct values ({}); pass --positive to choose the positive class",
            distinct.join(", ")
        ),
    }
}

/// Writes the 0/1 matrix: one column per binary feature (labeled), plus the
/// class bit.
pub fn write_matrix_csv(ds: &BinaryDataset, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("writing {}", path.display()))?;
    let mut header: Vec<String> = ds.columns.iter().map(|c| c.label.clone()).collect();
    header.push(ds.class_name.clone());
    w.write_record(&header)?;
    for (row, &y) in ds.rows.iter().zip(&ds.labels) {
        let mut rec: Vec<&str> = row.iter().map(|&b| if b { "1" } else { "0" }).collect();
        rec.push(if y { "1" } else { "0" });
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct LabelSidecar<'a> {
    class_name: &'a str,
    positive_label: &'a str,
    columns: &'a [BinaryColumn],
}

/// The JSON sidecar mapping matrix columns back to source features.
pub fn write_labels_json(ds: &BinaryDataset, path: &Path) -> Result<()> {
    let sidecar = LabelSidecar {
        class_name: &ds.class_name,
        positive_label: &ds.positive_label,
        columns: &ds.columns,
    };
    std::fs::write(path, serde_json::to_string_pretty(&sidecar)?)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Writes a raw table back out as CSV (used by the synthetic generator).
pub fn write_table_csv(table: &RawTable, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("writing {}", path.display()))?;
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(ToString::to_string))?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_model(rs: &RuleSet, path: &Path) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(rs)?)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<RuleSet> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing model {}", path.display()))
}
