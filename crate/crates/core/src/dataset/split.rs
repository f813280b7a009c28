//! Train/test holdout splitting.

use rand::seq::SliceRandom;

use super::Dataset;
use crate::error::{CdfError, Result};
use crate::rng::stream_rng;
use crate::scalar::Scalar;

/// Disjoint train/test partition of a source dataset.
#[derive(Debug, Clone)]
pub struct SplitPair<T> {
    pub train: Dataset<T>,
    pub test: Dataset<T>,
    pub seed: u64,
    pub train_fraction: f64,
}

/// Per-class (stratified) holdout split.
///
/// Each class contributes `round(train_fraction * n_c)` rows to train, never
/// fewer than one, the rest to test. Deterministic for a fixed seed. Errors
/// when the test side ends up empty.
pub fn stratified_split<T: Scalar>(
    data: &Dataset<T>,
    train_fraction: f64,
    seed: u64,
) -> Result<SplitPair<T>> {
    check_fraction(train_fraction)?;
    let mut rng = stream_rng(seed, 0);

    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); data.k()];
    for (i, &l) in data.labels().iter().enumerate() {
        by_class[l].push(i);
    }

    let mut train_idx = Vec::new();
    let mut test_idx = Vec::new();
    for indices in by_class.iter_mut() {
        if indices.is_empty() {
            continue;
        }
        indices.shuffle(&mut rng);
        let want = (train_fraction * indices.len() as f64).round() as usize;
        let take = want.clamp(1, indices.len());
        train_idx.extend_from_slice(&indices[..take]);
        test_idx.extend_from_slice(&indices[take..]);
    }
    finish_split(data, train_idx, test_idx, seed, train_fraction)
}

/// Literal random split without stratification.
pub fn random_split<T: Scalar>(
    data: &Dataset<T>,
    train_fraction: f64,
    seed: u64,
) -> Result<SplitPair<T>> {
    check_fraction(train_fraction)?;
    let mut rng = stream_rng(seed, 0);
    let mut indices: Vec<usize> = (0..data.n()).collect();
    indices.shuffle(&mut rng);
    let want = (train_fraction * data.n() as f64).round() as usize;
    let take = want.clamp(1, data.n());
    let train_idx = indices[..take].to_vec();
    let test_idx = indices[take..].to_vec();
    finish_split(data, train_idx, test_idx, seed, train_fraction)
}

fn check_fraction(f: f64) -> Result<()> {
    if !(f > 0.0 && f < 1.0) {
        return Err(CdfError::InvalidConfig(format!(
            "train fraction must lie in (0,1), got {f}"
        )));
    }
    Ok(())
}

fn finish_split<T: Scalar>(
    data: &Dataset<T>,
    mut train_idx: Vec<usize>,
    mut test_idx: Vec<usize>,
    seed: u64,
    train_fraction: f64,
) -> Result<SplitPair<T>> {
    if test_idx.is_empty() {
        return Err(CdfError::EmptyTestSplit);
    }
    // stable row order within each side
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    Ok(SplitPair {
        train: data.subset(&train_idx),
        test: data.subset(&test_idx),
        seed,
        train_fraction,
    })
}
