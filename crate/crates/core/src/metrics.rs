//! Classification metrics: accuracy, Cohen's kappa, confusion matrix.

use crate::error::{CdfError, Result};

/// K x K contingency table, `counts[actual][predicted]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: Vec<u64>,
    k: usize,
    n: u64,
}

impl ConfusionMatrix {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn get(&self, actual: usize, predicted: usize) -> u64 {
        self.counts[actual * self.k + predicted]
    }

    /// Sum of the diagonal (correct predictions).
    pub fn trace(&self) -> u64 {
        (0..self.k).map(|c| self.get(c, c)).sum()
    }

    fn row_sum(&self, actual: usize) -> u64 {
        (0..self.k).map(|p| self.get(actual, p)).sum()
    }

    fn col_sum(&self, predicted: usize) -> u64 {
        (0..self.k).map(|a| self.get(a, predicted)).sum()
    }
}

fn check_pair(actual: &[usize], predicted: &[usize]) -> Result<()> {
    if actual.len() != predicted.len() {
        return Err(CdfError::DimensionMismatch {
            expected: actual.len(),
            actual: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(CdfError::InvalidData("empty label vectors".into()));
    }
    Ok(())
}

/// Fraction of positions where the vectors agree.
pub fn accuracy(actual: &[usize], predicted: &[usize]) -> Result<f64> {
    check_pair(actual, predicted)?;
    let hits = actual
        .iter()
        .zip(predicted)
        .filter(|(a, p)| a == p)
        .count();
    Ok(hits as f64 / actual.len() as f64)
}

/// Chance-corrected agreement `(p_o - p_e) / (1 - p_e)`.
///
/// When expected agreement is 1 (both vectors constant and equal) the
/// formula is 0/0; this returns 1 for perfect agreement and 0 otherwise so
/// aggregate reports stay total.
pub fn cohens_kappa(actual: &[usize], predicted: &[usize]) -> Result<f64> {
    check_pair(actual, predicted)?;
    let k = actual
        .iter()
        .chain(predicted)
        .max()
        .map_or(1, |&m| m + 1);
    let cm = confusion(actual, predicted, k)?;
    let n = cm.n() as f64;
    let p_o = cm.trace() as f64 / n;
    let p_e: f64 = (0..k)
        .map(|c| (cm.row_sum(c) as f64 / n) * (cm.col_sum(c) as f64 / n))
        .sum();
    if (1.0 - p_e).abs() < 1e-15 {
        return Ok(if (1.0 - p_o).abs() < 1e-15 { 1.0 } else { 0.0 });
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

/// Contingency counts for class indices below `k`.
pub fn confusion(actual: &[usize], predicted: &[usize], k: usize) -> Result<ConfusionMatrix> {
    if actual.len() != predicted.len() {
        return Err(CdfError::DimensionMismatch {
            expected: actual.len(),
            actual: predicted.len(),
        });
    }
    let mut counts = vec![0u64; k * k];
    for (&a, &p) in actual.iter().zip(predicted) {
        if a >= k || p >= k {
            return Err(CdfError::InvalidData(format!(
                "class index {} out of range for k = {k}",
                a.max(p)
            )));
        }
        counts[a * k + p] += 1;
    }
    Ok(ConfusionMatrix {
        counts,
        k,
        n: actual.len() as u64,
    })
}
