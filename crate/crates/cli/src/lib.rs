//! Command-line front end for the `langford-mrf` library: verification and
//! discovery of admissible perturbations, trajectory export, Lyapunov
//! spectra, shift-operator comparison and periodic-orbit checks.
//!
//! Every command reads an optional JSON config (`--config`), applies flag
//! overrides, prints a short summary and writes a JSON report to the
//! output directory. Reports are deterministic for a fixed config and seed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use langford_mrf::dynamics::DynamicsError;
use langford_mrf::ode::IntegrationError;

pub mod commands;
pub mod config;
pub mod output;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input: unreadable or malformed config, violated constraint,
    /// unmet hypothesis. Exit code 2.
    #[error("{0}")]
    Validation(String),
    /// Integration failure such as blow-up. Exit code 3.
    #[error("{0}")]
    Numeric(String),
    /// The computation succeeded but a pass/fail threshold was missed.
    /// Exit code 4.
    #[error("{0}")]
    Threshold(String),
    /// Output could not be written. Exit code 1.
    #[error("cannot write output: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Threshold(_) => 4,
        }
    }
}

impl From<IntegrationError> for CliError {
    fn from(e: IntegrationError) -> Self {
        match e {
            IntegrationError::InvalidConfig(_) | IntegrationError::NonFiniteInput => {
                CliError::Validation(e.to_string())
            }
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::Integration(inner) => inner.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

/// Parses `x,y,z`.
fn parse_point(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("`{p}` is not a number")))
        .collect::<Result<_, _>>()?;
    parts.try_into().map_err(|v: Vec<f64>| format!("expected three comma-separated values, got {}", v.len()))
}

#[derive(Debug, Parser)]
#[command(name = "langford-mrf", version, about = "Admissible perturbations of the generalized Langford system")]
pub struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory for reports, CSV and SVG files (default `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check every perturbation term of a system for exact admissibility.
    Verify {
        /// System description file; overrides `system` in the config.
        system: Option<PathBuf>,
    },
    /// Compute a basis of admissible polynomial perturbations.
    Find {
        /// Parameters or system description file; overrides the config.
        params: Option<PathBuf>,
        #[arg(long)]
        degree: Option<u32>,
    },
    /// Integrate a system and export the trajectory as CSV (and SVG).
    Simulate {
        system: Option<PathBuf>,
        #[arg(long)]
        t0: Option<f64>,
        #[arg(long)]
        t1: Option<f64>,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        x0: Option<[f64; 3]>,
        #[arg(long)]
        samples: Option<usize>,
        /// Skip the SVG projections.
        #[arg(long)]
        no_svg: bool,
    },
    /// Lyapunov spectrum along a trajectory.
    Lyapunov {
        system: Option<PathBuf>,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        x0: Option<[f64; 3]>,
        #[arg(long)]
        transient: Option<f64>,
        #[arg(long)]
        total: Option<f64>,
        #[arg(long)]
        renorm: Option<f64>,
    },
    /// Compare the shift operators of two systems on seeded random points.
    Compare {
        system_a: Option<PathBuf>,
        system_b: Option<PathBuf>,
        /// Half-width of the interval `[-T, T]`.
        #[arg(long = "T")]
        half_width: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Periodicity condition, closed-form orbit and return map.
    Periodic {
        system: Option<PathBuf>,
        #[arg(long)]
        theorem: Option<String>,
        #[arg(long)]
        omega: Option<f64>,
        /// Also compute Floquet multipliers.
        #[arg(long)]
        floquet: bool,
    },
}

/// Runs the parsed command line, prints the summary or the error, and
/// returns the process exit code.
pub fn run(cli: Cli) -> ExitCode {
    match commands::execute(cli) {
        Ok(summary) => {
            for line in summary {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
        Err((summary, e)) => {
            for line in summary {
                println!("{line}");
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
