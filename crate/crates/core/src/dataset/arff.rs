//! Minimal ARFF reader.
//!
//! Supports the dense subset served by OpenML for numeric data: `@relation`,
//! `@attribute <name> numeric` (`real`/`integer` accepted as aliases),
//! nominal attributes `{v1,...}`, `%` comments and `?` missing values.
//! The last nominal attribute is the class; rows with a missing value are
//! dropped. Sparse `{index value}` rows, string and date attributes are
//! rejected.

use std::fs;
use std::path::Path;

use super::Dataset;
use crate::error::{CdfError, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Debug)]
enum AttrKind {
    Numeric,
    Nominal(Vec<String>),
}

pub fn load_arff<T: Scalar>(path: impl AsRef<Path>) -> Result<Dataset<T>> {
    load_arff_with_label(path).map(|(d, _)| d)
}

/// Like [`load_arff`] but also returns the class attribute's name (wanted
/// when converting to CSV).
pub fn load_arff_with_label<T: Scalar>(
    path: impl AsRef<Path>,
) -> Result<(Dataset<T>, String)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| CdfError::Parse(format!("{}: {e}", path.display())))?;
    parse_arff_with_label(&text)
}

#[cfg(test)]
pub(crate) fn parse_arff<T: Scalar>(text: &str) -> Result<Dataset<T>> {
    parse_arff_with_label(text).map(|(d, _)| d)
}

/// Parse ARFF text, returning the dataset and the class attribute name.
pub fn parse_arff_with_label<T: Scalar>(text: &str) -> Result<(Dataset<T>, String)> {
    let mut attrs: Vec<(String, AttrKind)> = Vec::new();
    let mut in_data = false;
    let mut data_lines: Vec<&str> = Vec::new();

    for raw in text.lines() {
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if in_data {
            data_lines.push(line);
            continue;
        }
        let lower = line.to_ascii_lowercase();
        if lower.starts_with("@relation") {
            continue;
        } else if lower.starts_with("@attribute") {
            attrs.push(parse_attribute(line)?);
        } else if lower.starts_with("@data") {
            in_data = true;
        } else {
            return Err(CdfError::Parse(format!("unexpected ARFF line: {line}")));
        }
    }
    if !in_data {
        return Err(CdfError::Parse("missing @data section".into()));
    }
    if attrs.is_empty() {
        return Err(CdfError::Parse("no @attribute declarations".into()));
    }

    // the last nominal attribute is the class; all other attributes must be
    // numeric
    let label_idx = attrs
        .iter()
        .rposition(|(_, k)| matches!(k, AttrKind::Nominal(_)))
        .ok_or_else(|| CdfError::Parse("no nominal class attribute".into()))?;
    for (i, (name, kind)) in attrs.iter().enumerate() {
        if i != label_idx && matches!(kind, AttrKind::Nominal(_)) {
            return Err(CdfError::Parse(format!(
                "unsupported attribute type: {name:?} is nominal but not the class"
            )));
        }
    }
    let label_names: Vec<String> = match &attrs[label_idx].1 {
        AttrKind::Nominal(values) => values.clone(),
        AttrKind::Numeric => unreachable!(),
    };
    let feature_names: Vec<String> = attrs
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != label_idx)
        .map(|(_, (name, _))| name.clone())
        .collect();

    let mut rows: Vec<Vec<T>> = Vec::new();
    let mut labels: Vec<usize> = Vec::new();
    for line in data_lines {
        if line.starts_with('{') {
            return Err(CdfError::Parse("sparse ARFF is unsupported".into()));
        }
        let fields = split_data_line(line);
        if fields.len() != attrs.len() {
            return Err(CdfError::Parse(format!(
                "data row has {} values, expected {}",
                fields.len(),
                attrs.len()
            )));
        }
        if fields.iter().any(|f| f == "?") {
            continue; // fixed policy: drop rows with missing values
        }
        let mut row = Vec::with_capacity(feature_names.len());
        let mut class = None;
        for (i, field) in fields.iter().enumerate() {
            if i == label_idx {
                let c = label_names
                    .iter()
                    .position(|v| v == field)
                    .ok_or_else(|| {
                        CdfError::Parse(format!("undeclared class value {field:?}"))
                    })?;
                class = Some(c);
            } else {
                let v: f64 = field.parse().map_err(|_| {
                    CdfError::Parse(format!("non-numeric value {field:?}"))
                })?;
                if !v.is_finite() {
                    return Err(CdfError::Parse(format!("non-finite value {field:?}")));
                }
                row.push(T::from_f64_lossy(v));
            }
        }
        rows.push(row);
        labels.push(class.expect("class column visited"));
    }

    if rows.is_empty() {
        return Err(CdfError::InvalidData("ARFF has no usable data rows".into()));
    }
    let label_attr = attrs[label_idx].0.clone();
    let dataset =
        Dataset::new(Matrix::from_rows(&rows)?, labels, label_names, feature_names)?;
    Ok((dataset, label_attr))
}

fn strip_comment(line: &str) -> &str {
    // % starts a comment unless inside quotes
    let mut in_quote: Option<char> = None;
    for (i, c) in line.char_indices() {
        match in_quote {
            Some(q) if c == q => in_quote = None,
            None if c == '\'' || c == '"' => in_quote = Some(c),
            None if c == '%' => return &line[..i],
            _ => {}
        }
    }
    line
}

fn parse_attribute(line: &str) -> Result<(String, AttrKind)> {
    let rest = line["@attribute".len()..].trim_start();
    let (name, rest) = take_token(rest)
        .ok_or_else(|| CdfError::Parse(format!("malformed @attribute: {line}")))?;
    let type_str = rest.trim();
    if type_str.is_empty() {
        return Err(CdfError::Parse(format!("malformed @attribute: {line}")));
    }
    if type_str.starts_with('{') {
        let inner = type_str
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .ok_or_else(|| CdfError::Parse(format!("malformed nominal spec: {line}")))?;
        let values: Vec<String> = inner
            .split(',')
            .map(|v| unquote(v.trim()).to_string())
            .collect();
        if values.is_empty() || values.iter().any(String::is_empty) {
            return Err(CdfError::Parse(format!("empty nominal value in: {line}")));
        }
        return Ok((name, AttrKind::Nominal(values)));
    }
    match type_str.to_ascii_lowercase().as_str() {
        "numeric" | "real" | "integer" => Ok((name, AttrKind::Numeric)),
        other => Err(CdfError::Parse(format!(
            "unsupported attribute type {other:?} for {name:?}"
        ))),
    }
}

/// First (possibly quoted) token and the remainder of the line.
fn take_token(s: &str) -> Option<(String, &str)> {
    let s = s.trim_start();
    let mut chars = s.char_indices();
    let (_, first) = chars.next()?;
    if first == '\'' || first == '"' {
        for (i, c) in chars {
            if c == first {
                return Some((s[1..i].to_string(), &s[i + 1..]));
            }
        }
        None
    } else {
        let end = s
            .char_indices()
            .find(|(_, c)| c.is_whitespace())
            .map_or(s.len(), |(i, _)| i);
        Some((s[..end].to_string(), &s[end..]))
    }
}

fn split_data_line(line: &str) -> Vec<String> {
    line.split(',')
        .map(|f| unquote(f.trim()).to_string())
        .collect()
}

fn unquote(s: &str) -> &str {
    for q in ['\'', '"'] {
        if s.len() >= 2 && s.starts_with(q) && s.ends_with(q) {
            return &s[1..s.len() - 1];
        }
    }
    s
}
