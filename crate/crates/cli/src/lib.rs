//! Experiment runner: parses a flat TOML config, runs one command, and
//! writes CSV/JSON artifacts.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::num::NonZeroUsize;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::Serialize;

pub use config::{parse_config, parse_config_str, Config};
pub use error::{CliError, Result};
pub use output::{fmt_f64, Emitter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Draw one sample and write `sample.csv`.
    Simulate,
    /// Fit one sample and write `coeffs.csv`.
    Estimate,
    /// Monte Carlo risk over `n_grid`; writes `risk.csv`.
    RiskStudy,
    /// Monte Carlo variance of one coefficient; writes `variance.csv`.
    VarianceStudy,
    /// Autocovariance and eigenvalue diagnostics; writes `autocov.csv`.
    NoiseCheck,
    /// Gram-matrix and boundedness diagnostics of the basis.
    BasisCheck,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "laguerre-thresh", version, about = "Laguerre hard-thresholding experiments")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// TOML configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created if absent.
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the `seed` key.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub threads: Option<NonZeroUsize>,
    /// Replace existing output files.
    #[arg(long)]
    pub overwrite: bool,
}

/// Runs `cli` and returns the paths written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    let mut cfg = parse_config(&cli.config)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(k) = cli.threads {
        pool = pool.num_threads(k.get());
    }
    let pool = pool.build().map_err(|e| CliError::Threads(e.to_string()))?;
    let files = pool.install(|| match cli.command {
        Command::Simulate => commands::simulate_cmd(&cfg),
        Command::Estimate => commands::estimate_cmd(&cfg),
        Command::RiskStudy => commands::risk_study_cmd(&cfg),
        Command::VarianceStudy => commands::variance_study_cmd(&cfg),
        Command::NoiseCheck => commands::noise_check_cmd(&cfg),
        Command::BasisCheck => commands::basis_check_cmd(&cfg),
    })?;
    Emitter::new(&cli.out, cli.overwrite).write_all(&files)
}
