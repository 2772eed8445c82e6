//! `evosis`: command-line front end.
//!
//! Exit codes: 0 success, 1 configuration or I/O error, 2 solver
//! non-convergence, 3 a strict-mode check failed.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use evosis::presets::{LambdaStarConvention, Preset};

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "evosis",
    version,
    about = "SIS epidemics on periodically evolving domains"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct Common {
    /// TOML model configuration.
    #[arg(long, global = true, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Built-in preset (see `evosis export --list`).
    #[arg(long, global = true, value_parser = parse_preset)]
    #[serde(serialize_with = "ser_display")]
    pub preset: Option<Preset>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Exit with status 3 when a check fails.
    #[arg(long, global = true)]
    pub strict: bool,
    /// How λ* is obtained for presets with separable γ.
    #[arg(long, global = true, value_enum, default_value_t = Convention::PaperExample)]
    pub lambda_star_convention: Convention,
    /// Grid intervals N (overrides the configuration).
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Time steps per period M (overrides the configuration).
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Periods to simulate.
    #[arg(long, global = true)]
    pub periods: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    Neumann,
    PaperExample,
}

impl From<Convention> for LambdaStarConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Neumann => LambdaStarConvention::Neumann,
            Convention::PaperExample => LambdaStarConvention::PaperExample,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parameter {
    #[value(name = "d-i")]
    DI,
    Length,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Basic reproduction number, closed form, bounds and eigenfunction.
    R0,
    /// Simulate the SIS system; writes trajectory tables and plot scripts.
    Simulate {
        /// Store a snapshot every this many steps (default M/10).
        #[arg(long)]
        snapshot_every: Option<usize>,
    },
    /// Periodic disease-free state S*.
    Dfe {
        #[arg(long, default_value_t = evosis::dfe::DEFAULT_DFE_TOL)]
        tol: f64,
    },
    /// R0 over a list of d_I or L values.
    Sweep {
        #[arg(long, value_enum)]
        parameter: Parameter,
        /// Strictly increasing, comma-separated.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// R0 along sequences tending to the four limits.
    Limits {
        /// One of small-diffusion, large-diffusion, small-length, large-length;
        /// all four by default.
        #[arg(long, value_parser = parse_limit)]
        #[serde(serialize_with = "ser_opt_display")]
        kind: Option<evosis::analysis::LimitKind>,
        /// Sequence for a single kind, comma-separated.
        #[arg(long, value_delimiter = ',', requires = "kind")]
        values: Option<Vec<f64>>,
    },
    /// Space-time bounds on R0.
    Bounds,
    /// Threshold classification by long-time simulation.
    Stability,
    /// Published example values against computed ones.
    Reproduce {
        /// Absolute tolerance for a pass.
        #[arg(long, default_value_t = 1e-3)]
        tolerance: f64,
    },
    /// Print a preset as a TOML configuration.
    Export {
        /// List preset names instead.
        #[arg(long)]
        list: bool,
    },
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse()
}

fn parse_limit(s: &str) -> Result<evosis::analysis::LimitKind, String> {
    s.parse()
}

fn ser_display<S: serde::Serializer, T: std::fmt::Display>(
    v: &Option<T>,
    s: S,
) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_some(&v.to_string()),
        None => s.serialize_none(),
    }
}

fn ser_opt_display<S: serde::Serializer, T: std::fmt::Display>(
    v: &Option<T>,
    s: S,
) -> Result<S::Ok, S::Error> {
    ser_display(v, s)
}

/// Failures that map to exit codes.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Solver(String),
    Check(String),
}

impl From<evosis::Error> for Failure {
    fn from(e: evosis::Error) -> Self {
        use evosis::Error as E;
        match e {
            E::Config(_) | E::Parse(_) | E::NotApplicable(_) => Failure::Config(e.to_string()),
            _ => Failure::Solver(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(format!("i/o: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Solver(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Check(m)) => {
            eprintln!("check failed: {m}");
            ExitCode::from(3)
        }
    }
}
