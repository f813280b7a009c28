//! Tabular classification data: loading, validation, encoding, resampling.

mod arff;
mod csv;
mod split;

pub use arff::{load_arff, load_arff_with_label, parse_arff_with_label};
pub use csv::{csv_string, load_csv, load_csv_matrix, write_csv, LabelColumn, MissingPolicy};
pub use split::{random_split, stratified_split, SplitPair};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CdfError, Result};
use crate::matrix::Matrix;
use crate::rng::stream_rng;
use crate::scalar::Scalar;

/// Immutable feature matrix with integer-encoded labels.
///
/// Labels are indices into `label_names`; a class may have zero rows (e.g.
/// after bootstrapping) but its index and name are preserved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset<T> {
    features: Matrix<T>,
    labels: Vec<usize>,
    label_names: Vec<String>,
    feature_names: Vec<String>,
}

impl<T: Scalar> Dataset<T> {
    /// Validating constructor. Rejects empty data, out-of-range labels,
    /// non-finite feature values and name/shape mismatches.
    pub fn new(
        features: Matrix<T>,
        labels: Vec<usize>,
        label_names: Vec<String>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        if features.rows() == 0 || features.cols() == 0 {
            return Err(CdfError::InvalidData(
                "dataset needs at least one row and one feature".into(),
            ));
        }
        if labels.len() != features.rows() {
            return Err(CdfError::DimensionMismatch {
                expected: features.rows(),
                actual: labels.len(),
            });
        }
        if feature_names.len() != features.cols() {
            return Err(CdfError::DimensionMismatch {
                expected: features.cols(),
                actual: feature_names.len(),
            });
        }
        if label_names.is_empty() {
            return Err(CdfError::InvalidData("no classes declared".into()));
        }
        for (i, name) in label_names.iter().enumerate() {
            if label_names[..i].contains(name) {
                return Err(CdfError::InvalidData(format!(
                    "duplicate class name {name:?}"
                )));
            }
        }
        let k = label_names.len();
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return Err(CdfError::InvalidData(format!(
                "label index {bad} out of range for {k} classes"
            )));
        }
        if !features.all_finite() {
            return Err(CdfError::InvalidData(
                "feature matrix contains NaN or infinite values".into(),
            ));
        }
        Ok(Self {
            features,
            labels,
            label_names,
            feature_names,
        })
    }

    /// Constructor for rows taken from an already-validated dataset.
    pub(crate) fn from_valid_parts(
        features: Matrix<T>,
        labels: Vec<usize>,
        label_names: Vec<String>,
        feature_names: Vec<String>,
    ) -> Self {
        Self {
            features,
            labels,
            label_names,
            feature_names,
        }
    }

    /// Number of samples.
    pub fn n(&self) -> usize {
        self.features.rows()
    }

    /// Number of features.
    pub fn p(&self) -> usize {
        self.features.cols()
    }

    /// Number of declared classes.
    pub fn k(&self) -> usize {
        self.label_names.len()
    }

    pub fn features(&self) -> &Matrix<T> {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Per-class sample counts, indexed by class.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.k()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Number of classes with at least one row.
    pub fn present_classes(&self) -> usize {
        self.class_counts().iter().filter(|&&c| c > 0).count()
    }

    /// Decoded label string for a row.
    pub fn label_name_of(&self, row: usize) -> &str {
        &self.label_names[self.labels[row]]
    }

    /// New dataset holding the given rows, in order (duplicates allowed).
    /// Class dictionary and feature names are preserved.
    pub fn subset(&self, indices: &[usize]) -> Self {
        let features = self.features.select_rows(indices);
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        Self::from_valid_parts(
            features,
            labels,
            self.label_names.clone(),
            self.feature_names.clone(),
        )
    }
}

/// Draw `n` rows i.i.d. uniformly with replacement.
///
/// Deterministic for a fixed seed; classes absent from the draw keep their
/// indices in the returned dataset.
pub fn bootstrap_sample<T: Scalar>(data: &Dataset<T>, seed: u64) -> Dataset<T> {
    let n = data.n();
    let mut rng = stream_rng(seed, 0);
    let indices: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
    data.subset(&indices)
}

/// Per-feature z-score transform fitted on training data.
///
/// Uses population statistics; constant features are centered only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer<T> {
    pub means: Vec<T>,
    pub stds: Vec<T>,
}

impl<T: Scalar> Standardizer<T> {
    pub fn fit(data: &Dataset<T>) -> Self {
        let n = T::from_usize(data.n()).unwrap();
        let p = data.p();
        let mut means = vec![T::zero(); p];
        let mut stds = vec![T::zero(); p];
        for row in data.features().iter_rows() {
            for (m, &v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut means {
            *m /= n;
        }
        for row in data.features().iter_rows() {
            for ((s, &m), &v) in stds.iter_mut().zip(&means).zip(row) {
                let d = v - m;
                *s += d * d;
            }
        }
        for s in &mut stds {
            *s = (*s / n).sqrt();
        }
        Self { means, stds }
    }

    pub fn transform_row(&self, row: &[T], out: &mut Vec<T>) {
        out.clear();
        out.extend(row.iter().zip(&self.means).zip(&self.stds).map(
            |((&v, &m), &s)| {
                if s > T::zero() {
                    (v - m) / s
                } else {
                    v - m
                }
            },
        ));
    }

    pub fn transform(&self, data: &Dataset<T>) -> Result<Dataset<T>> {
        if data.p() != self.means.len() {
            return Err(CdfError::DimensionMismatch {
                expected: self.means.len(),
                actual: data.p(),
            });
        }
        let mut out = data.clone();
        let cols = self.means.len();
        for (i, v) in out.features.as_mut_slice().iter_mut().enumerate() {
            let j = i % cols;
            let s = self.stds[j];
            *v = if s > T::zero() {
                (*v - self.means[j]) / s
            } else {
                *v - self.means[j]
            };
        }
        Ok(out)
    }
}
