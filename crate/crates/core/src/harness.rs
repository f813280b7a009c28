//! Evaluation harness: repeated stratified holdout, hyper-parameter sweeps
//! and a synthetic blob generator for ground-truth tests.

use std::fmt::Write as _;
use std::time::Instant;

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dataset::{random_split, stratified_split, Dataset, SplitPair, Standardizer};
use crate::error::{CdfError, Result};
use crate::forest::{train_forest, ForestConfig};
use crate::matrix::Matrix;
use crate::metrics::{accuracy, cohens_kappa};
use crate::rng::{derive_seed, stream_rng};
use crate::scalar::Scalar;

/// Repeated-holdout evaluation settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalProtocol {
    /// Independent train/test repetitions.
    pub repetitions: usize,
    pub train_fraction: f64,
    pub master_seed: u64,
    pub forest: ForestConfig,
    /// Z-score features with train-split statistics each repetition.
    pub standardize: bool,
    /// Per-class splitting (disable for literal random splits).
    pub stratified: bool,
}

impl Default for EvalProtocol {
    fn default() -> Self {
        Self {
            repetitions: 50,
            train_fraction: 0.7,
            master_seed: 0,
            forest: ForestConfig::default(),
            standardize: false,
            stratified: true,
        }
    }
}

impl EvalProtocol {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions < 1 {
            return Err(CdfError::InvalidConfig("repetitions must be >= 1".into()));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(CdfError::InvalidConfig(format!(
                "train fraction must lie in (0,1), got {}",
                self.train_fraction
            )));
        }
        self.forest.validate()
    }
}

/// Metrics for one completed repetition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepMetrics {
    pub accuracy: f64,
    pub kappa: f64,
}

/// Aggregated evaluation result.
///
/// Wall time is informational and excluded from serialization so report
/// files stay byte-identical across runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub protocol: EvalProtocol,
    pub per_rep: Vec<RepMetrics>,
    /// Repetitions skipped because their split was degenerate.
    pub skipped: usize,
    pub mean_accuracy: f64,
    pub sd_accuracy: f64,
    pub mean_kappa: f64,
    pub sd_kappa: f64,
    #[serde(skip)]
    pub wall_time_seconds: f64,
}

fn mean_sd(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Train and score one split according to the protocol.
fn run_split<T: Scalar>(split: &SplitPair<T>, protocol: &EvalProtocol, forest_seed: u64) -> Result<RepMetrics> {
    let mut config = protocol.forest.clone();
    config.seed = forest_seed;

    let (train, test) = if protocol.standardize {
        let std = Standardizer::fit(&split.train);
        (std.transform(&split.train)?, std.transform(&split.test)?)
    } else {
        (split.train.clone(), split.test.clone())
    };

    let forest = train_forest(&train, &config)?;
    let predicted = forest.predict_batch(&test)?;
    Ok(RepMetrics {
        accuracy: accuracy(test.labels(), &predicted)?,
        kappa: cohens_kappa(test.labels(), &predicted)?,
    })
}

/// Repeat holdout evaluation; repetition `r` derives its split and forest
/// seeds from `(master_seed, r)`, so results are fully deterministic.
///
/// Repetitions whose split is degenerate (empty test side, single-class
/// train side) are skipped with a warning and counted in `skipped`.
pub fn repeated_holdout<T: Scalar>(
    data: &Dataset<T>,
    protocol: &EvalProtocol,
) -> Result<EvalReport> {
    protocol.validate()?;
    if data.present_classes() < 2 {
        return Err(CdfError::InvalidData(
            "need >= 2 classes for evaluation".into(),
        ));
    }
    let start = Instant::now();
    let mut per_rep = Vec::with_capacity(protocol.repetitions);
    let mut skipped = 0usize;

    for r in 0..protocol.repetitions as u64 {
        let rep_seed = derive_seed(protocol.master_seed, r);
        let split_seed = derive_seed(rep_seed, 0);
        let forest_seed = derive_seed(rep_seed, 1);
        let split = if protocol.stratified {
            stratified_split(data, protocol.train_fraction, split_seed)
        } else {
            random_split(data, protocol.train_fraction, split_seed)
        };
        let outcome = split.and_then(|s| run_split(&s, protocol, forest_seed));
        match outcome {
            Ok(metrics) => per_rep.push(metrics),
            Err(e) => {
                log::warn!("repetition {r} skipped: {e}");
                skipped += 1;
            }
        }
    }
    if per_rep.is_empty() {
        return Err(CdfError::InvalidData(
            "every repetition was skipped; dataset too degenerate for the protocol".into(),
        ));
    }

    let (mean_accuracy, sd_accuracy) = mean_sd(per_rep.iter().map(|m| m.accuracy));
    let (mean_kappa, sd_kappa) = mean_sd(per_rep.iter().map(|m| m.kappa));
    Ok(EvalReport {
        protocol: protocol.clone(),
        per_rep,
        skipped,
        mean_accuracy,
        sd_accuracy,
        mean_kappa,
        sd_kappa,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Hyper-parameter axis for [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    NTrees,
    MTryFraction,
    M,
}

impl std::fmt::Display for SweepParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SweepParam::NTrees => write!(f, "n_trees"),
            SweepParam::MTryFraction => write!(f, "m_try_fraction"),
            SweepParam::M => write!(f, "m"),
        }
    }
}

impl std::str::FromStr for SweepParam {
    type Err = CdfError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n_trees" => Ok(SweepParam::NTrees),
            "m_try_fraction" => Ok(SweepParam::MTryFraction),
            "m" => Ok(SweepParam::M),
            other => Err(CdfError::InvalidConfig(format!(
                "unknown sweep parameter {other:?} (expected n_trees, m_try_fraction or m)"
            ))),
        }
    }
}

fn positive_integer(v: f64, what: &str) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 && v <= usize::MAX as f64 {
        Ok(v as usize)
    } else {
        Err(CdfError::InvalidConfig(format!(
            "{what} grid value must be a positive integer, got {v}"
        )))
    }
}

fn apply_param(protocol: &EvalProtocol, param: SweepParam, value: f64) -> Result<EvalProtocol> {
    let mut p = protocol.clone();
    match param {
        SweepParam::NTrees => p.forest.n_trees = positive_integer(value, "n_trees")?,
        SweepParam::MTryFraction => {
            if !(value > 0.0 && value <= 1.0) {
                return Err(CdfError::InvalidConfig(format!(
                    "m_try_fraction grid value must lie in (0,1], got {value}"
                )));
            }
            p.forest.tree.m_try_fraction = value;
        }
        SweepParam::M => {
            p.forest.tree.m_selector =
                crate::cdt::MSelector::Fixed(positive_integer(value, "m")?);
        }
    }
    Ok(p)
}

/// Evaluate the protocol once per grid value, everything else fixed.
pub fn sweep<T: Scalar>(
    data: &Dataset<T>,
    protocol: &EvalProtocol,
    param: SweepParam,
    grid: &[f64],
) -> Result<Vec<(f64, EvalReport)>> {
    if grid.is_empty() {
        return Err(CdfError::InvalidConfig("empty sweep grid".into()));
    }
    let mut out = Vec::with_capacity(grid.len());
    for &value in grid {
        let p = apply_param(protocol, param, value)?;
        out.push((value, repeated_holdout(data, &p)?));
    }
    Ok(out)
}

/// Sweep results as `param,value,mean_acc,sd_acc` CSV.
pub fn sweep_csv(param: SweepParam, results: &[(f64, EvalReport)]) -> String {
    let mut out = String::from("param,value,mean_acc,sd_acc\n");
    for (value, report) in results {
        let _ = writeln!(
            out,
            "{param},{value},{},{}",
            report.mean_accuracy, report.sd_accuracy
        );
    }
    out
}

/// One-line summary CSV used by the evaluate subcommand.
pub fn summary_csv(dataset_name: &str, report: &EvalReport) -> String {
    format!(
        "dataset,method,mean_acc,sd_acc,mean_kappa,sd_kappa,reps\n{},cdf,{},{},{},{},{}\n",
        dataset_name,
        report.mean_accuracy,
        report.sd_accuracy,
        report.mean_kappa,
        report.sd_kappa,
        report.protocol.repetitions
    )
}

/// Gaussian blob generator.
///
/// Class `c` centers its first `informative` coordinates at `c * gap`; all
/// coordinates carry `N(0, noise_sd)` noise. Rows are grouped by class,
/// labels named `class_<c>`, features `f<j>`.
pub fn make_blobs<T: Scalar>(
    n_per_class: usize,
    k: usize,
    p: usize,
    informative: usize,
    gap: f64,
    noise_sd: f64,
    seed: u64,
) -> Result<Dataset<T>> {
    if k < 2 {
        return Err(CdfError::InvalidConfig("blobs need k >= 2".into()));
    }
    if n_per_class < 1 || p < 1 {
        return Err(CdfError::InvalidConfig(
            "blobs need n_per_class >= 1 and p >= 1".into(),
        ));
    }
    if informative > p {
        return Err(CdfError::InvalidConfig(format!(
            "informative ({informative}) exceeds p ({p})"
        )));
    }
    if !noise_sd.is_finite() || noise_sd < 0.0 || !gap.is_finite() {
        return Err(CdfError::InvalidConfig(
            "noise_sd must be >= 0 and gap finite".into(),
        ));
    }
    let mut rng = stream_rng(seed, 0);
    let noise = Normal::new(0.0f64, noise_sd)
        .map_err(|e| CdfError::InvalidConfig(format!("bad noise_sd: {e}")))?;

    let n = n_per_class * k;
    let mut rows: Vec<Vec<T>> = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for class in 0..k {
        let center = gap * class as f64;
        for _ in 0..n_per_class {
            let row: Vec<T> = (0..p)
                .map(|j| {
                    let base = if j < informative { center } else { 0.0 };
                    T::from_f64_lossy(base + noise.sample(&mut rng))
                })
                .collect();
            rows.push(row);
            labels.push(class);
        }
    }
    Dataset::new(
        Matrix::from_rows(&rows)?,
        labels,
        (0..k).map(|c| format!("class_{c}")).collect(),
        (0..p).map(|j| format!("f{j}")).collect(),
    )
}
