//! Subcommand implementations.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, ValueEnum};

use cdf_core::cdt::MSelector;
use cdf_core::css::{dataset_css, select_top_m};
use cdf_core::dataset::{
    load_arff, load_csv, load_csv_matrix, Dataset, LabelColumn, MissingPolicy, Standardizer,
};
use cdf_core::error::{CdfError, Result};
use cdf_core::forest::{train_forest, ForestConfig};
use cdf_core::harness::{repeated_holdout, summary_csv, sweep, sweep_csv, EvalProtocol, SweepParam};
use cdf_core::model::{load_model, save_model};
use cdf_core::{Matrix, TreeConfig};

use crate::openml::fetch_openml;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MissingArg {
    /// Abort on any unusable numeric cell.
    Reject,
    /// Skip rows containing unusable cells.
    DropRows,
}

impl From<MissingArg> for MissingPolicy {
    fn from(m: MissingArg) -> Self {
        match m {
            MissingArg::Reject => MissingPolicy::Reject,
            MissingArg::DropRows => MissingPolicy::DropRows,
        }
    }
}

/// Input dataset location and parsing options.
#[derive(Debug, Args)]
pub struct DataFlags {
    /// Dataset file (.csv with header row, or .arff).
    #[arg(long)]
    pub data: PathBuf,
    /// Label column name or 0-based index (CSV only; ARFF declares its own
    /// class attribute).
    #[arg(long)]
    pub label: Option<String>,
    /// Treatment of unusable numeric cells in CSV input.
    #[arg(long, value_enum, default_value_t = MissingArg::Reject)]
    pub missing: MissingArg,
}

impl DataFlags {
    pub fn load(&self) -> Result<Dataset<f64>> {
        if is_arff(&self.data) {
            if self.label.is_some() {
                log::info!("ARFF input: --label is ignored, class attribute comes from the file");
            }
            return load_arff(&self.data);
        }
        let label = self.label.as_ref().ok_or_else(|| {
            CdfError::InvalidConfig("--label is required for CSV input".into())
        })?;
        load_csv(&self.data, &LabelColumn::Name(label.clone()), self.missing.into())
    }

    fn stem(&self) -> String {
        self.data
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into())
    }
}

fn is_arff(path: &Path) -> bool {
    path.extension()
        .map(|e| e.eq_ignore_ascii_case("arff"))
        .unwrap_or(false)
}

/// Forest hyper-parameters shared by train, evaluate and sweep.
#[derive(Debug, Args)]
pub struct ModelFlags {
    /// Number of trees in the forest.
    #[arg(long = "trees", default_value_t = 500)]
    pub trees: usize,
    /// Maximum split levels per tree (root at depth 0).
    #[arg(long = "max-depth", default_value_t = 3)]
    pub max_depth: usize,
    /// Nodes with at most this many samples become leaves.
    #[arg(long = "n-min", default_value_t = 3)]
    pub n_min: usize,
    /// Fraction of features sampled as candidates per node, in (0,1].
    #[arg(long = "mtry-frac", default_value_t = 0.2)]
    pub mtry_frac: f64,
    /// Features kept per node: 2ln, 2log2 or int:<k>.
    #[arg(long = "m-rule", default_value = "2ln")]
    pub m_rule: String,
    /// Separability denominator epsilon.
    #[arg(long, default_value_t = 1e-7)]
    pub epsilon: f64,
    /// Master seed for all randomness.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl ModelFlags {
    pub fn forest_config(&self) -> Result<ForestConfig> {
        let m_selector: MSelector = self.m_rule.parse()?;
        let config = ForestConfig {
            n_trees: self.trees,
            tree: TreeConfig {
                max_depth: self.max_depth,
                min_samples: self.n_min,
                m_try_fraction: self.mtry_frac,
                m_selector,
                epsilon: self.epsilon,
                seed: self.seed,
            },
            seed: self.seed,
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataFlags,
    #[command(flatten)]
    pub model: ModelFlags,
    /// Z-score features (statistics stored in the model file).
    #[arg(long)]
    pub standardize: bool,
    /// Output model file (JSON).
    #[arg(long)]
    pub out: PathBuf,
}

pub fn cmd_train(args: &TrainArgs) -> Result<()> {
    let start = Instant::now();
    let data = args.data.load()?;
    let config = args.model.forest_config()?;

    let (train_data, standardizer) = if args.standardize {
        let std = Standardizer::fit(&data);
        (std.transform(&data)?, Some(std))
    } else {
        (data.clone(), None)
    };
    let forest = train_forest(&train_data, &config)?;
    save_model(&forest, standardizer.as_ref(), &args.out)?;
    println!(
        "trained: n={} p={} K={} B={} wall={:.2}s model={}",
        data.n(),
        data.p(),
        data.k(),
        config.n_trees,
        start.elapsed().as_secs_f64(),
        args.out.display()
    );
    Ok(())
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Model file produced by `cdf train`.
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub data: DataFlags,
    /// Append one vote-fraction column per class.
    #[arg(long)]
    pub votes: bool,
    /// Output predictions CSV.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn cmd_predict(args: &PredictArgs) -> Result<()> {
    let (forest, standardizer) = load_model::<f64>(&args.model)?;

    let features: Matrix<f64> = if is_arff(&args.data.data) {
        load_arff::<f64>(&args.data.data)?.features().clone()
    } else if let Some(label) = &args.data.label {
        load_csv::<f64>(
            &args.data.data,
            &LabelColumn::Name(label.clone()),
            args.data.missing.into(),
        )?
        .features()
        .clone()
    } else {
        load_csv_matrix::<f64>(&args.data.data, args.data.missing.into())?.0
    };

    if features.cols() != forest.p() {
        return Err(CdfError::DimensionMismatch {
            expected: forest.p(),
            actual: features.cols(),
        });
    }

    let mut out = String::from("row,predicted_label");
    if args.votes {
        for name in forest.label_names() {
            let _ = write!(out, ",vote_{name}");
        }
    }
    out.push('\n');

    let mut buf = Vec::new();
    for (i, row) in features.iter_rows().enumerate() {
        let x: &[f64] = match &standardizer {
            Some(s) => {
                s.transform_row(row, &mut buf);
                &buf
            }
            None => row,
        };
        let label = forest.predict(x)?;
        let _ = write!(out, "{i},{}", forest.label_names()[label]);
        if args.votes {
            for v in forest.predict_votes(x)? {
                let _ = write!(out, ",{v}");
            }
        }
        out.push('\n');
    }
    fs::write(&args.out, out)?;
    println!("predicted {} rows -> {}", features.rows(), args.out.display());
    Ok(())
}

/// Protocol flags shared by evaluate and sweep.
#[derive(Debug, Args)]
pub struct ProtocolFlags {
    /// Independent train/test repetitions.
    #[arg(long, default_value_t = 500)]
    pub reps: usize,
    /// Training fraction of each split.
    #[arg(long = "train-frac", default_value_t = 0.7)]
    pub train_frac: f64,
    /// Z-score features with train-split statistics each repetition.
    #[arg(long)]
    pub standardize: bool,
    /// Use literal random splits instead of per-class stratification.
    #[arg(long = "no-stratify")]
    pub no_stratify: bool,
}

impl ProtocolFlags {
    fn protocol(&self, model: &ModelFlags) -> Result<EvalProtocol> {
        let protocol = EvalProtocol {
            repetitions: self.reps,
            train_fraction: self.train_frac,
            master_seed: model.seed,
            forest: model.forest_config()?,
            standardize: self.standardize,
            stratified: !self.no_stratify,
        };
        protocol.validate()?;
        Ok(protocol)
    }
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub data: DataFlags,
    #[command(flatten)]
    pub model: ModelFlags,
    #[command(flatten)]
    pub protocol: ProtocolFlags,
    /// Output base path; writes <base>.json and <base>.csv.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<()> {
    let data = args.data.load()?;
    let protocol = args.protocol.protocol(&args.model)?;
    let report = repeated_holdout(&data, &protocol)?;

    let base = strip_report_extension(&args.out);
    let json_path = base.with_extension("json");
    let csv_path = base.with_extension("csv");
    fs::write(&json_path, serde_json::to_string_pretty(&report)?)?;
    fs::write(&csv_path, summary_csv(&args.data.stem(), &report))?;
    println!(
        "evaluated {} reps ({} skipped): acc {:.4} +/- {:.4}, kappa {:.4} +/- {:.4}, wall {:.2}s",
        report.per_rep.len(),
        report.skipped,
        report.mean_accuracy,
        report.sd_accuracy,
        report.mean_kappa,
        report.sd_kappa,
        report.wall_time_seconds
    );
    println!("reports: {} {}", json_path.display(), csv_path.display());
    Ok(())
}

fn strip_report_extension(path: &Path) -> PathBuf {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") | Some("csv") => path.with_extension(""),
        _ => path.to_path_buf(),
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub data: DataFlags,
    #[command(flatten)]
    pub model: ModelFlags,
    #[command(flatten)]
    pub protocol: ProtocolFlags,
    /// Swept hyper-parameter: n_trees, m_try_fraction or m.
    #[arg(long)]
    pub param: String,
    /// Comma-separated grid values, e.g. 1,10,50.
    #[arg(long)]
    pub grid: String,
    /// Output sweep CSV.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let param: SweepParam = args.param.parse()?;
    let grid: Vec<f64> = args
        .grid
        .split(',')
        .map(|v| {
            v.trim().parse::<f64>().map_err(|_| {
                CdfError::InvalidConfig(format!("bad grid value {v:?}"))
            })
        })
        .collect::<Result<_>>()?;

    let data = args.data.load()?;
    let protocol = args.protocol.protocol(&args.model)?;
    let results = sweep(&data, &protocol, param, &grid)?;
    fs::write(&args.out, sweep_csv(param, &results))?;
    println!(
        "swept {param} over {} values -> {}",
        results.len(),
        args.out.display()
    );
    Ok(())
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub data: DataFlags,
    /// Separability denominator epsilon.
    #[arg(long, default_value_t = 1e-7)]
    pub epsilon: f64,
    /// Output CSV (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn cmd_score(args: &ScoreArgs) -> Result<()> {
    let data = args.data.load()?;
    let scores = dataset_css(&data, args.epsilon)?;
    let all: Vec<usize> = (0..data.p()).collect();
    let ranked = select_top_m(&scores, &all, data.p());

    let mut out = String::from("feature,css\n");
    for j in ranked {
        let name = &data.feature_names()[j];
        let score = scores.scores[j];
        let _ = writeln!(out, "{name},{score}");
    }
    match &args.out {
        Some(path) => {
            fs::write(path, out)?;
            println!("scored {} features -> {}", data.p(), path.display());
        }
        None => print!("{out}"),
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct FetchArgs {
    /// OpenML dataset id.
    #[arg(long)]
    pub openml: u64,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn cmd_fetch(args: &FetchArgs) -> Result<()> {
    let summary = fetch_openml(args.openml, &args.out)?;
    println!(
        "fetched openml {}: n={} p={} K={} label_column={} ({}) -> {}",
        args.openml,
        summary.n,
        summary.p,
        summary.k,
        summary.label_column,
        if summary.from_cache { "cache" } else { "network" },
        args.out.display()
    );
    Ok(())
}
