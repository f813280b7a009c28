//! Class separability scoring and top-m feature selection.
//!
//! A feature's score averages, over all pairs of present classes, the
//! absolute gap between class means divided by the summed class standard
//! deviations (plus a small epsilon). Large mean gaps with tight classes
//! score high.

use crate::error::{CdfError, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Per-class, per-column means and population standard deviations.
///
/// Entries for classes with zero rows are NaN; `counts` is the presence
/// flag. Columns are in the order of the `cols` slice passed to
/// [`class_stats`].
#[derive(Debug, Clone)]
pub struct ClassStats<T> {
    /// Flattened class-major means, `n_classes * n_cols`.
    pub means: Vec<T>,
    /// Flattened class-major population standard deviations.
    pub stds: Vec<T>,
    /// Rows per class.
    pub counts: Vec<usize>,
    /// Number of scored columns.
    pub n_cols: usize,
}

impl<T: Scalar> ClassStats<T> {
    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    /// Mean row for a class, `None` when the class has no rows.
    pub fn means_of(&self, class: usize) -> Option<&[T]> {
        (self.counts[class] > 0)
            .then(|| &self.means[class * self.n_cols..(class + 1) * self.n_cols])
    }

    pub fn stds_of(&self, class: usize) -> Option<&[T]> {
        (self.counts[class] > 0)
            .then(|| &self.stds[class * self.n_cols..(class + 1) * self.n_cols])
    }
}

/// Per-feature separability scores for one candidate column set.
#[derive(Debug, Clone)]
pub struct CssScore<T> {
    /// Score per scored column, aligned with the candidate column order.
    pub scores: Vec<T>,
    /// Epsilon used in the denominators.
    pub epsilon: T,
}

/// Per-class means and population standard deviations of the given columns
/// over the given rows.
///
/// Rows are visited in slice order, so results are bitwise-reproducible; a
/// class with a single row gets standard deviation zero.
pub fn class_stats<T: Scalar>(
    features: &Matrix<T>,
    rows: &[usize],
    cols: &[usize],
    labels: &[usize],
    n_classes: usize,
) -> ClassStats<T> {
    let n_cols = cols.len();
    let mut counts = vec![0usize; n_classes];
    let mut means = vec![T::zero(); n_classes * n_cols];
    let mut stds = vec![T::zero(); n_classes * n_cols];

    for &r in rows {
        let c = labels[r];
        counts[c] += 1;
        let row = features.row(r);
        let acc = &mut means[c * n_cols..(c + 1) * n_cols];
        for (a, &j) in acc.iter_mut().zip(cols) {
            *a += row[j];
        }
    }
    for (c, &count) in counts.iter().enumerate() {
        let acc = &mut means[c * n_cols..(c + 1) * n_cols];
        if count == 0 {
            acc.fill(T::nan());
            continue;
        }
        let n = T::from_usize(count).unwrap();
        for a in acc.iter_mut() {
            *a /= n;
        }
    }

    for &r in rows {
        let c = labels[r];
        let row = features.row(r);
        let mu = &means[c * n_cols..(c + 1) * n_cols];
        let acc = &mut stds[c * n_cols..(c + 1) * n_cols];
        for ((a, &m), &j) in acc.iter_mut().zip(mu).zip(cols) {
            let d = row[j] - m;
            *a += d * d;
        }
    }
    for (c, &count) in counts.iter().enumerate() {
        let acc = &mut stds[c * n_cols..(c + 1) * n_cols];
        if count == 0 {
            acc.fill(T::nan());
            continue;
        }
        let n = T::from_usize(count).unwrap();
        for a in acc.iter_mut() {
            *a = (*a / n).sqrt();
        }
    }

    ClassStats {
        means,
        stds,
        counts,
        n_cols,
    }
}

/// Separability score per column: mean over present-class pairs of
/// `|mu' - mu''| / (sigma' + sigma'' + epsilon)`.
///
/// Pairs run over classes actually present in the stats; fewer than two
/// present classes is an error.
pub fn css_scores<T: Scalar>(stats: &ClassStats<T>, epsilon: T) -> Result<CssScore<T>> {
    let present: Vec<usize> = (0..stats.n_classes())
        .filter(|&c| stats.counts[c] > 0)
        .collect();
    if present.len() < 2 {
        return Err(CdfError::SingleClass);
    }
    let n_pairs = present.len() * (present.len() - 1) / 2;
    let pair_norm = T::from_usize(n_pairs).unwrap();

    let n_cols = stats.n_cols;
    let mut scores = vec![T::zero(); n_cols];
    for (i, &a) in present.iter().enumerate() {
        for &b in &present[i + 1..] {
            let mu_a = &stats.means[a * n_cols..(a + 1) * n_cols];
            let mu_b = &stats.means[b * n_cols..(b + 1) * n_cols];
            let sd_a = &stats.stds[a * n_cols..(a + 1) * n_cols];
            let sd_b = &stats.stds[b * n_cols..(b + 1) * n_cols];
            for j in 0..n_cols {
                scores[j] += (mu_a[j] - mu_b[j]).abs() / (sd_a[j] + sd_b[j] + epsilon);
            }
        }
    }
    for s in &mut scores {
        *s /= pair_norm;
    }
    Ok(CssScore { scores, epsilon })
}

/// Indices of the `m` highest-scoring candidates, in descending score
/// order; ties break toward the smaller feature index. `m` is clamped to
/// the candidate count.
pub fn select_top_m<T: Scalar>(
    scores: &CssScore<T>,
    candidate_indices: &[usize],
    m: usize,
) -> Vec<usize> {
    debug_assert_eq!(scores.scores.len(), candidate_indices.len());
    let mut order: Vec<usize> = (0..candidate_indices.len()).collect();
    order.sort_by(|&a, &b| {
        scores.scores[b]
            .partial_cmp(&scores.scores[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(candidate_indices[a].cmp(&candidate_indices[b]))
    });
    order
        .into_iter()
        .take(m.min(candidate_indices.len()))
        .map(|i| candidate_indices[i])
        .collect()
}

/// Scores for every column of a dataset (used by the `score` subcommand).
pub fn dataset_css<T: Scalar>(
    data: &crate::dataset::Dataset<T>,
    epsilon: T,
) -> Result<CssScore<T>> {
    let rows: Vec<usize> = (0..data.n()).collect();
    let cols: Vec<usize> = (0..data.p()).collect();
    let stats = class_stats(data.features(), &rows, &cols, data.labels(), data.k());
    css_scores(&stats, epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use approx::assert_relative_eq;
    use rand_distr::{Distribution, Normal};

    fn stats_of(rows: &[(usize, Vec<f64>)], k: usize) -> ClassStats<f64> {
        let data: Vec<Vec<f64>> = rows.iter().map(|(_, r)| r.clone()).collect();
        let labels: Vec<usize> = rows.iter().map(|(l, _)| *l).collect();
        let m = Matrix::from_rows(&data).unwrap();
        let all_rows: Vec<usize> = (0..m.rows()).collect();
        let all_cols: Vec<usize> = (0..m.cols()).collect();
        class_stats(&m, &all_rows, &all_cols, &labels, k)
    }

    #[test]
    fn two_symmetric_points() {
        let s = stats_of(&[(0, vec![0.0]), (0, vec![2.0])], 1);
        assert_eq!(s.means_of(0).unwrap(), &[1.0]);
        assert_eq!(s.stds_of(0).unwrap(), &[1.0]);
    }

    #[test]
    fn single_row_class_has_zero_std() {
        let s = stats_of(&[(0, vec![5.0]), (1, vec![1.0]), (1, vec![3.0])], 2);
        assert_eq!(s.stds_of(0).unwrap(), &[0.0]);
        assert_eq!(s.means_of(1).unwrap(), &[2.0]);
    }

    #[test]
    fn constant_feature_across_classes() {
        let s = stats_of(&[(0, vec![4.0]), (0, vec![4.0]), (1, vec![4.0])], 2);
        assert_eq!(s.means_of(0).unwrap(), s.means_of(1).unwrap());
        assert_eq!(s.stds_of(0).unwrap(), &[0.0]);
        assert_eq!(s.stds_of(1).unwrap(), &[0.0]);
    }

    #[test]
    fn absent_class_is_flagged_not_zeroed() {
        let s = stats_of(&[(0, vec![1.0]), (2, vec![3.0])], 3);
        assert_eq!(s.counts, vec![1, 0, 1]);
        assert!(s.means_of(1).is_none());
        assert!(s.means[s.n_cols..2 * s.n_cols].iter().all(|v| v.is_nan()));
    }

    #[test]
    fn zero_std_pair_hits_epsilon_denominator() {
        // means 1 and 3, both stds 0: CSS = 2 / 1e-7 = 2e7
        let s = stats_of(&[(0, vec![1.0]), (1, vec![3.0])], 2);
        let css = css_scores(&s, 1e-7).unwrap();
        assert_relative_eq!(css.scores[0], 2e7, max_relative = 1e-9);
    }

    #[test]
    fn identical_distributions_score_zero() {
        let s = stats_of(
            &[(0, vec![1.0]), (0, vec![3.0]), (1, vec![1.0]), (1, vec![3.0])],
            2,
        );
        let css = css_scores(&s, 1e-7).unwrap();
        assert_eq!(css.scores[0], 0.0);
    }

    #[test]
    fn three_class_hand_example() {
        // A={0,2}, B={2,4}, C={4,6}: means 1,3,5, stds all 1;
        // pair terms 2/2, 4/2, 2/2 -> mean 4/3
        let s = stats_of(
            &[
                (0, vec![0.0]),
                (0, vec![2.0]),
                (1, vec![2.0]),
                (1, vec![4.0]),
                (2, vec![4.0]),
                (2, vec![6.0]),
            ],
            3,
        );
        let css = css_scores(&s, 1e-7).unwrap();
        assert!((css.scores[0] - 4.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn single_present_class_is_an_error() {
        let s = stats_of(&[(0, vec![1.0]), (0, vec![2.0])], 2);
        match css_scores(&s, 1e-7) {
            Err(CdfError::SingleClass) => {}
            other => panic!("expected SingleClass, got {other:?}"),
        }
    }

    #[test]
    fn pairs_run_over_present_classes_only() {
        // class 1 absent: normalization is over the single (0,2) pair
        let s = stats_of(&[(0, vec![0.0]), (0, vec![2.0]), (2, vec![4.0]), (2, vec![6.0])], 3);
        let css = css_scores(&s, 1e-7).unwrap();
        assert!((css.scores[0] - 4.0 / (2.0 + 1e-7)).abs() < 1e-9);
    }

    #[test]
    fn top_m_ordering_ties_and_clamping() {
        let scores = CssScore {
            scores: vec![0.5, 2.0, 1.0],
            epsilon: 1e-7,
        };
        assert_eq!(select_top_m(&scores, &[0, 1, 2], 2), vec![1, 2]);

        let equal = CssScore {
            scores: vec![1.0, 1.0, 1.0],
            epsilon: 1e-7,
        };
        assert_eq!(select_top_m(&equal, &[5, 3, 9], 2), vec![3, 5]);
        assert_eq!(select_top_m(&scores, &[0, 1, 2], 10), vec![1, 2, 0]);
    }

    #[test]
    fn shift_leaves_css_unchanged_on_dyadic_data() {
        // integer-valued data and power-of-two arithmetic keep float sums
        // exact, so equality is exact here
        let base = [
            (0, vec![0.0]),
            (0, vec![2.0]),
            (1, vec![6.0]),
            (1, vec![10.0]),
        ];
        let shifted: Vec<(usize, Vec<f64>)> = base
            .iter()
            .map(|(l, r)| (*l, r.iter().map(|v| v + 128.0).collect()))
            .collect();
        let scaled: Vec<(usize, Vec<f64>)> = base
            .iter()
            .map(|(l, r)| (*l, r.iter().map(|v| v * 2.0).collect()))
            .collect();
        let s0 = css_scores(&stats_of(&base, 2), 0.0).unwrap();
        let s1 = css_scores(&stats_of(&shifted, 2), 0.0).unwrap();
        let s2 = css_scores(&stats_of(&scaled, 2), 0.0).unwrap();
        assert_eq!(s0.scores, s1.scores);
        assert_eq!(s0.scores, s2.scores);
    }

    #[test]
    fn widening_one_pair_gap_raises_css() {
        let narrow = stats_of(
            &[(0, vec![0.0]), (0, vec![2.0]), (1, vec![2.0]), (1, vec![4.0])],
            2,
        );
        let wide = stats_of(
            &[(0, vec![0.0]), (0, vec![2.0]), (1, vec![3.0]), (1, vec![5.0])],
            2,
        );
        // same stds, larger gap
        assert_eq!(narrow.stds_of(1).unwrap(), wide.stds_of(1).unwrap());
        let a = css_scores(&narrow, 1e-7).unwrap().scores[0];
        let b = css_scores(&wide, 1e-7).unwrap().scores[0];
        assert!(b > a);
    }

    fn gaussian_css_error(n_per_class: usize, seed: u64) -> f64 {
        // two unit-variance Gaussians 2 apart; analytic CSS = 2/(1+1) = 1
        let mut rng = stream_rng(seed, 0);
        let normal = Normal::new(0.0f64, 1.0).unwrap();
        let mut rows = Vec::with_capacity(2 * n_per_class);
        let mut labels = Vec::with_capacity(2 * n_per_class);
        for class in 0..2usize {
            let shift = 2.0 * class as f64;
            for _ in 0..n_per_class {
                rows.push(vec![shift + normal.sample(&mut rng)]);
                labels.push(class);
            }
        }
        let m = Matrix::from_rows(&rows).unwrap();
        let all_rows: Vec<usize> = (0..m.rows()).collect();
        let stats = class_stats(&m, &all_rows, &[0], &labels, 2);
        let css = css_scores(&stats, 1e-7).unwrap();
        (css.scores[0] - 1.0).abs()
    }

    #[test]
    fn empirical_css_converges_to_analytic_value() {
        let seeds = 0..20u64;
        let coarse: f64 =
            seeds.clone().map(|s| gaussian_css_error(50, s)).sum::<f64>() / 20.0;
        let fine: f64 =
            seeds.map(|s| gaussian_css_error(5000, s)).sum::<f64>() / 20.0;
        assert!(
            fine < coarse,
            "error did not shrink: n=50 -> {coarse}, n=5000 -> {fine}"
        );
        assert!(fine < 0.05, "error at n=5000 is {fine}, expected < 5%");
    }
}
