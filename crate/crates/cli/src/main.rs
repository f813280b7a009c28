//! `cdf` — train, inspect and benchmark centroid decision forests.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 network error.

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use cdf_cli::commands::{
    cmd_evaluate, cmd_fetch, cmd_predict, cmd_score, cmd_sweep, cmd_train, EvaluateArgs,
    FetchArgs, PredictArgs, ScoreArgs, SweepArgs, TrainArgs,
};
use cdf_core::error::CdfError;

#[derive(Parser)]
#[command(name = "cdf", version, about = "Centroid decision forest toolkit")]
struct Cli {
    /// Verbose logging (cache hits, skipped repetitions, ...).
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a forest and write a model file.
    Train(TrainArgs),
    /// Predict labels for new rows with a trained model.
    Predict(PredictArgs),
    /// Repeated holdout evaluation with accuracy and Cohen's kappa.
    Evaluate(EvaluateArgs),
    /// Evaluate across a hyper-parameter grid.
    Sweep(SweepArgs),
    /// Rank all features by class separability score.
    Score(ScoreArgs),
    /// Download an OpenML dataset as CSV (cached by id).
    Fetch(FetchArgs),
}

fn exit_code(e: &CdfError) -> i32 {
    match e {
        CdfError::Network(_) => 3,
        CdfError::InvalidConfig(_) => 1,
        _ => 2,
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };

    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(
        if cli.verbose { "info" } else { "warn" },
    ))
    .init();

    let result = match &cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Score(args) => cmd_score(args),
        Command::Fetch(args) => cmd_fetch(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}
