//! `stochds`: DS computation and subject classification from the shell.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

mod artifact;
mod config;
mod ds;
mod ml;
mod report;
mod synth;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stochds::mlharness::ModelKind;

use config::{RunConfig, Settings, CONFIG_ENV};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("the paired-ROI view was requested but the catalog has no pairs")]
    MissingPairing,
    #[error("{0}")]
    Runtime(String),
    #[error("{} ({})", .0, .0.code())]
    Core(#[from] stochds::Error),
}

impl CliError {
    pub fn from_config(e: stochds::Error) -> Self {
        CliError::Config(e.to_string())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::MissingPairing => 2,
            CliError::Core(
                stochds::Error::InvalidConfig(_)
                | stochds::Error::InvalidParameter(_)
                | stochds::Error::PerplexityTooLarge { .. },
            ) => 2,
            CliError::Runtime(_) | CliError::Core(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "stochds", version, about = "Deviation-from-stochasticity features and classifiers")]
struct Cli {
    /// Flat `key = value` config file (default: $STOCHDS_CONFIG)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Global seed; every stage seed is derived from it
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override one config key, e.g. `--set ae.epochs=100`
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic series or a labeled cohort
    Synth(synth::SynthArgs),
    /// Compute DS for every ROI series of one subject or a cohort
    Ds(ds::DsArgs),
    /// Assemble the subject-by-ROI feature matrix from DS results
    Features(ml::FeaturesArgs),
    /// Train a classifier on a feature matrix
    Train(ml::TrainArgs),
    /// Cross-validate a classifier and score a trained one
    Eval(ml::EvalArgs),
    /// Permutation importance of each feature
    Importance(ml::ImportanceArgs),
    /// Two-dimensional embedding of the subjects
    Project(ml::ProjectArgs),
    /// Within-cohort, between-cohort and paired-ROI DS summaries
    Report(report::ReportArgs),
}

impl Command {
    fn model_override(&self) -> Option<ModelKind> {
        match self {
            Command::Train(a) => a.model,
            Command::Eval(a) => a.model,
            Command::Importance(a) => a.model,
            _ => None,
        }
    }
}

fn effective_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut settings = Settings::default();
    let file = cli.config.clone().or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    if let Some(path) = file {
        settings.apply_file(&path)?;
    }
    if let Some(seed) = cli.seed {
        settings.seed = seed;
    }
    for kv in &cli.set {
        settings.apply_override(kv)?;
    }
    if let Some(kind) = cli.command.model_override() {
        settings.model_kind = kind;
    }
    RunConfig::resolve(&settings)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = effective_config(cli)?;
    match &cli.command {
        Command::Synth(a) => synth::run(a, &cfg),
        Command::Ds(a) => ds::run(a, &cfg),
        Command::Features(a) => ml::features(a),
        Command::Train(a) => ml::train_cmd(a, &cfg),
        Command::Eval(a) => ml::eval_cmd(a, &cfg),
        Command::Importance(a) => ml::importance_cmd(a, &cfg),
        Command::Project(a) => ml::project_cmd(a, &cfg),
        Command::Report(a) => report::run(a, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
