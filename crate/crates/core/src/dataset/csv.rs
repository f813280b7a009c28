//! CSV loading and writing (RFC-4180-style, header row, `.` decimal).

use std::fmt::Write as _;
use std::fs::File;
use std::io::Write as _;
use std::path::Path;

use super::Dataset;
use crate::error::{CdfError, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// How to locate the label column.
#[derive(Debug, Clone)]
pub enum LabelColumn {
    Name(String),
    Index(usize),
}

impl LabelColumn {
    /// Resolve against the header: exact name match first, then a numeric
    /// string as a 0-based column index.
    pub fn resolve(&self, header: &[String]) -> Result<usize> {
        match self {
            LabelColumn::Index(i) if *i < header.len() => Ok(*i),
            LabelColumn::Index(i) => Err(CdfError::Parse(format!(
                "label column index {i} out of range ({} columns)",
                header.len()
            ))),
            LabelColumn::Name(name) => {
                if let Some(pos) = header.iter().position(|h| h == name) {
                    return Ok(pos);
                }
                if let Ok(i) = name.parse::<usize>() {
                    if i < header.len() {
                        return Ok(i);
                    }
                }
                Err(CdfError::Parse(format!("label column {name:?} not found")))
            }
        }
    }
}

/// Treatment of cells that do not parse as finite numbers (blank cells,
/// text, NaN/inf).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MissingPolicy {
    /// Any unusable cell aborts the load.
    Reject,
    /// Rows containing an unusable cell are skipped.
    DropRows,
}

/// Load a CSV with a header row into a dataset.
///
/// Labels are encoded by first appearance; feature column order is
/// preserved.
pub fn load_csv<T: Scalar>(
    path: impl AsRef<Path>,
    label_column: &LabelColumn,
    missing_policy: MissingPolicy,
) -> Result<Dataset<T>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| CdfError::Parse(format!("{}: {e}", path.display())))?;

    let header: Vec<String> = reader
        .headers()?
        .iter()
        .map(|s| s.trim().to_string())
        .collect();
    let label_idx = label_column.resolve(&header)?;
    let feature_names: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != label_idx)
        .map(|(_, name)| name.clone())
        .collect();

    let mut rows: Vec<Vec<T>> = Vec::new();
    let mut labels = Vec::new();
    let mut label_names: Vec<String> = Vec::new();

    for (line, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != header.len() {
            return Err(CdfError::Parse(format!(
                "row {}: expected {} fields, got {}",
                line + 2,
                header.len(),
                record.len()
            )));
        }
        let mut row = Vec::with_capacity(feature_names.len());
        let mut usable = true;
        for (i, cell) in record.iter().enumerate() {
            if i == label_idx {
                continue;
            }
            match parse_cell::<T>(cell) {
                Some(v) => row.push(v),
                None => {
                    if missing_policy == MissingPolicy::Reject {
                        return Err(CdfError::Parse(format!(
                            "row {}, column {:?}: unusable numeric cell {cell:?}",
                            line + 2,
                            header[i]
                        )));
                    }
                    usable = false;
                    break;
                }
            }
        }
        if !usable {
            continue;
        }
        let raw_label = record.get(label_idx).unwrap_or("").trim().to_string();
        let class = match label_names.iter().position(|l| l == &raw_label) {
            Some(c) => c,
            None => {
                label_names.push(raw_label);
                label_names.len() - 1
            }
        };
        rows.push(row);
        labels.push(class);
    }

    if rows.is_empty() {
        return Err(CdfError::InvalidData(format!(
            "{}: no usable rows",
            path.display()
        )));
    }
    Dataset::new(Matrix::from_rows(&rows)?, labels, label_names, feature_names)
}

/// Load a CSV where every column is a feature (prediction input without a
/// label column). Returns the matrix and the header names.
pub fn load_csv_matrix<T: Scalar>(
    path: impl AsRef<Path>,
    missing_policy: MissingPolicy,
) -> Result<(Matrix<T>, Vec<String>)> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| CdfError::Parse(format!("{}: {e}", path.display())))?;
    let header: Vec<String> = reader
        .headers()?
        .iter()
        .map(|s| s.trim().to_string())
        .collect();

    let mut rows: Vec<Vec<T>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let mut row = Vec::with_capacity(header.len());
        let mut usable = true;
        for (i, cell) in record.iter().enumerate() {
            match parse_cell::<T>(cell) {
                Some(v) => row.push(v),
                None => {
                    if missing_policy == MissingPolicy::Reject {
                        return Err(CdfError::Parse(format!(
                            "row {}, column {:?}: unusable numeric cell {cell:?}",
                            line + 2,
                            header.get(i).map_or("?", String::as_str)
                        )));
                    }
                    usable = false;
                    break;
                }
            }
        }
        if usable {
            rows.push(row);
        }
    }
    if rows.is_empty() {
        return Err(CdfError::InvalidData(format!(
            "{}: no usable rows",
            path.display()
        )));
    }
    Ok((Matrix::from_rows(&rows)?, header))
}

fn parse_cell<T: Scalar>(cell: &str) -> Option<T> {
    let cell = cell.trim();
    if cell.is_empty() {
        return None;
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Some(T::from_f64_lossy(v)),
        _ => None,
    }
}

/// Render a dataset as CSV text with the label as the last column.
///
/// Numbers use the shortest representation that parses back exactly, so the
/// output is byte-stable and lossless.
pub fn csv_string<T: Scalar>(data: &Dataset<T>, label_col_name: &str) -> String {
    let mut out = String::new();
    for name in data.feature_names() {
        push_field(&mut out, name);
        out.push(',');
    }
    push_field(&mut out, label_col_name);
    out.push('\n');

    for (i, row) in data.features().iter_rows().enumerate() {
        for v in row {
            let _ = write!(out, "{v},");
        }
        push_field(&mut out, data.label_name_of(i));
        out.push('\n');
    }
    out
}

/// Write [`csv_string`] output to a file.
pub fn write_csv<T: Scalar>(
    data: &Dataset<T>,
    path: impl AsRef<Path>,
    label_col_name: &str,
) -> Result<()> {
    let mut file = File::create(path.as_ref())?;
    file.write_all(csv_string(data, label_col_name).as_bytes())?;
    Ok(())
}

fn push_field(out: &mut String, field: &str) {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        out.push('"');
        out.push_str(&field.replace('"', "\"\""));
        out.push('"');
    } else {
        out.push_str(field);
    }
}
