//! `cvlbi`: state construction, Fisher information, scheme comparison and
//! Cramér–Rao experiments from the command line.
//!
//! Exit codes: 0 on success, 2 for invalid input, 3 for numerical failure.

mod commands;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numerical(String),
}

impl From<cvlbi::Error> for CliError {
    fn from(e: cvlbi::Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Parser)]
#[command(name = "cvlbi", version, about = "Entanglement-assisted long-baseline interferometry toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the source, resource, output and measured covariance matrices.
    State(StateArgs),
    /// Fisher information of (g1, g2): analytic, limits, optional Monte Carlo.
    Fisher(FisherArgs),
    /// Cumulative Fisher bounds of every scheme over an epsilon grid.
    Compare(CompareArgs),
    /// Maximum-likelihood replications compared with the Cramér–Rao bound.
    Estimate(EstimateArgs),
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
pub struct Common {
    /// Flat key = value file; flags take precedence over its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Output format [default: json].
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Source and resource parameters.
#[derive(Debug, Args)]
pub struct Physics {
    /// Mean photon flux per coherence time [default: 0.1].
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    /// Real part of the mutual coherence [default: 0].
    #[arg(long, allow_negative_numbers = true)]
    pub g1: Option<f64>,
    /// Imaginary part of the mutual coherence [default: 0].
    #[arg(long, allow_negative_numbers = true)]
    pub g2: Option<f64>,
    /// Mean photon number of each squeezed mode [default: 1].
    #[arg(long, allow_negative_numbers = true)]
    pub n_bar: Option<f64>,
    /// Squeezing phase in radians [default: 0].
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    #[command(flatten)]
    pub physics: Physics,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct FisherArgs {
    #[command(flatten)]
    pub physics: Physics,
    /// Add a Monte Carlo estimate with standard errors.
    #[arg(long)]
    pub mc: bool,
    /// Monte Carlo sample count [default: 1000000].
    #[arg(long)]
    pub samples: Option<usize>,
    /// Random seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Coherence used by --exact.
    #[command(flatten)]
    pub physics: Physics,
    /// Bandwidth multiplying every bound [default: 1].
    #[arg(long, allow_negative_numbers = true)]
    pub delta_nu: Option<f64>,
    /// Smallest epsilon of the logarithmic grid [default: 1e-4].
    #[arg(long, allow_negative_numbers = true)]
    pub eps_min: Option<f64>,
    /// Largest epsilon of the logarithmic grid [default: 1].
    #[arg(long, allow_negative_numbers = true)]
    pub eps_max: Option<f64>,
    /// Number of grid points [default: 200].
    #[arg(long)]
    pub eps_points: Option<usize>,
    /// Use exact finite-epsilon trace norms for the CV schemes.
    #[arg(long)]
    pub exact: bool,
    /// Also write the ordering report as JSON to this file.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub physics: Physics,
    /// Shots per replication [default: 10000].
    #[arg(long)]
    pub shots: Option<usize>,
    /// Number of replications [default: 100].
    #[arg(long)]
    pub replications: Option<usize>,
    /// Master seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::State(a) => commands::state(a),
        Command::Fisher(a) => commands::fisher(a),
        Command::Compare(a) => commands::compare(a),
        Command::Estimate(a) => commands::estimate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}
