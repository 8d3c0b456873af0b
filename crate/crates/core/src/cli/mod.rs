//! Command front end: run configurations, reports and the `steer` binary's
//! subcommands.
//!
//! Every command reads a JSON [`RunConfig`], writes machine artifacts as
//! JSON files under `--out`, and prints a short human summary. Exit codes
//! follow [`exit_code`].

mod commands;
mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;

pub use commands::{analytic_line, run_scan, run_solve, SolveReport, Timings};
pub use config::{
    build_scenario, relabel_alice, RunConfig, ScenarioSpec, StringSetSpec, CONFIG_SCHEMA_VERSION,
};

/// Steering detection with moment-matrix hierarchies.
#[derive(Debug, Parser)]
#[command(name = "steer", version, about)]
pub struct Cli {
    /// Seed for randomized scenarios (overrides the configuration).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Solver tolerance (overrides the configuration).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Directory for report files.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads for scans.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

/// Subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full detection pipeline on one configuration.
    Solve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Locate the parameter value where the decision flips.
    Scan {
        #[arg(long)]
        config: PathBuf,
        /// Scenario parameter to scan (`w`, `eta`, `r`, `a`, `b`, `c1`, `c2`).
        #[arg(long)]
        param: String,
        #[arg(long)]
        min: f64,
        #[arg(long)]
        max: f64,
        /// Target bracket width.
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
    /// Extract or evaluate linear witnesses.
    #[command(subcommand)]
    Witness(WitnessCommand),
    /// Evaluate a closed-form criterion and print one JSON line.
    Analytic(AnalyticArgs),
}

/// Witness subcommands.
#[derive(Debug, Subcommand)]
pub enum WitnessCommand {
    /// Run the pipeline and write the witness document.
    Extract {
        #[arg(long)]
        config: PathBuf,
        /// Output path (default `<out>/witness.json`).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Evaluate a witness on the data of a configuration.
    Eval {
        /// Witness document, or `builtin:fixture` for the bundled
        /// single-photon witness.
        #[arg(long)]
        witness: String,
        #[arg(long)]
        config: PathBuf,
    },
}

/// Arguments of `analytic`.
#[derive(Debug, Args)]
pub struct AnalyticArgs {
    /// `pauli-linear`, `pauli-nonlinear`, `pauli-two-setting`,
    /// `gaussian-det`, `gaussian-wiseman` or `gaussian-exists-r`.
    pub name: String,
    /// Werner visibility (Pauli criteria).
    #[arg(long)]
    pub w: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub cxx: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub cyy: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub czz: Option<f64>,
    /// Two-mode squeezing (Gaussian criteria).
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c2: Option<f64>,
}

/// Exit code for an error: 2 for configuration and input problems, 3 for
/// numerical or certificate failures, 4 for bracketing failures.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Numerical(_) | Error::Certificate(_) => 3,
        Error::Bracketing(_) => 4,
        Error::Dimension(_)
        | Error::InvalidParameter(_)
        | Error::NotHermitian(_)
        | Error::Config(_)
        | Error::UnresolvedLabel(_)
        | Error::Schema(_)
        | Error::Io(_)
        | Error::Json(_) => 2,
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> u8 {
    match commands::dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), 2);
        assert_eq!(exit_code(&Error::Schema("x".into())), 2);
        assert_eq!(exit_code(&Error::UnresolvedLabel("x".into())), 2);
        assert_eq!(exit_code(&Error::Numerical("x".into())), 3);
        assert_eq!(exit_code(&Error::Certificate("x".into())), 3);
        assert_eq!(exit_code(&Error::Bracketing("x".into())), 4);
    }

    #[test]
    fn command_line_parses() {
        let cli = Cli::try_parse_from([
            "steer", "--tol", "1e-7", "scan", "--config", "c.json", "--param", "w", "--min", "0.3",
            "--max", "0.9", "--tol", "1e-3",
        ])
        .unwrap();
        assert_eq!(cli.tol, Some(1e-7));
        assert!(matches!(cli.command, Command::Scan { tol, .. } if tol == 1e-3));
        assert!(Cli::try_parse_from([
            "steer",
            "analytic",
            "pauli-linear",
            "--cxx",
            "-1",
            "--cyy",
            "-1",
            "--czz",
            "-1"
        ])
        .is_ok());
    }
}
