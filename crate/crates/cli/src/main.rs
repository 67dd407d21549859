//! `esdgait` command-line interface.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "esdgait", version, about = "Synthesize, featurize, train and evaluate ESD gait experiments")]
pub struct Cli {
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Synthesize the configured cohort into OUT/dataset.json and record files.
    Simulate,
    /// Trim and featurize a dataset into OUT/features.csv.
    Featurize {
        /// Defaults to OUT/dataset.json.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Cross-validate, fit on all rows and write OUT/model.rfj and OUT/eval.json.
    Train {
        /// Defaults to OUT/features.csv.
        #[arg(long)]
        features: Option<PathBuf>,
    },
    /// Cross-validate into OUT/eval.json; with --model, also score a saved model.
    Eval {
        #[arg(long)]
        features: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Accuracy-vs-k sweep and importance chart data into OUT.
    Report {
        #[arg(long)]
        features: Option<PathBuf>,
        /// Skip the per-k sweep.
        #[arg(long)]
        no_sweep: bool,
    },
    /// Stream samples through the leg-shake detector, printing events as JSON lines.
    Detect {
        /// A `.sig.csv` file; reads standard input when absent or `-`.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Score every record of a manifest instead, writing OUT/detection.json.
        #[arg(long, conflicts_with = "input")]
        manifest: Option<PathBuf>,
        /// Samples per chunk fed to the detector.
        #[arg(long, default_value_t = 1000)]
        chunk: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = if cli.quiet { "error" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be >= 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let validation = e.downcast_ref::<esdgait::Error>().is_some_and(esdgait::Error::is_validation);
            ExitCode::from(if validation { 1 } else { 2 })
        }
    }
}
