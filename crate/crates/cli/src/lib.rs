//! Batch front end: `podreliab ingest|classify|evaluate|demo`.
//!
//! Every command writes its artifacts below the output directory together
//! with a `manifest.json` holding sha256 hashes of the config, the inputs and
//! each output file.

mod artifacts;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use podreliab_core::Error;

pub use artifacts::{slug, Artifacts};
pub use commands::{classify, demo, evaluate, ingest};
pub use config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    /// Bad or missing input; exit code 2.
    Input(String),
    /// Anything else; exit code 1.
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Input(_) => 2,
            Self::Internal(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Input(m) | Self::Internal(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NonPsdCovariance => Self::Internal(e.to_string()),
            _ => Self::Input(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "podreliab", version, about = "Reliability evaluation of vessel trajectory predictors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Overrides {
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Decision threshold in metres.
    #[arg(long = "threshold-m")]
    pub threshold_m: Option<f64>,
    /// Largest evaluated horizon in minutes.
    #[arg(long = "h-max")]
    pub h_max: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ingest AIS CSV, split and resample trajectories.
    Ingest(Overrides),
    /// Window trajectories (or a scenario) and label traffic situations.
    Classify(Overrides),
    /// Error statistics, POAP curves and report tables for predictions.
    Evaluate(Overrides),
    /// Synthetic end-to-end run with the baseline predictors.
    Demo(Overrides),
}

/// Config as loaded from disk plus the raw bytes for hashing.
pub struct LoadedConfig {
    pub config: RunConfig,
    pub bytes: Vec<u8>,
}

pub fn load_config(o: &Overrides, required: bool) -> Result<LoadedConfig, CliError> {
    let (mut config, bytes) = match &o.config {
        Some(path) => {
            let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            let base = path.parent().map(PathBuf::from).unwrap_or_default();
            (RunConfig::from_json(&bytes, &base)?, bytes)
        }
        None if required => return Err(CliError::Input("--config <path> is required".into())),
        None => (RunConfig::default(), Vec::new()),
    };
    if let Some(v) = o.threshold_m {
        config.threshold_m = v;
    }
    if let Some(v) = o.h_max {
        config.h_max = v;
    }
    if let Some(v) = &o.out {
        config.out_dir = v.clone();
    }
    if let Some(v) = o.seed {
        config.seed = v;
    }
    config.validate()?;
    Ok(LoadedConfig { config, bytes })
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Ingest(o) => ingest(&load_config(&o, true)?),
        Command::Classify(o) => classify(&load_config(&o, true)?, o.seed),
        Command::Evaluate(o) => evaluate(&load_config(&o, true)?),
        Command::Demo(o) => demo(&load_config(&o, false)?),
    }
}

pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
