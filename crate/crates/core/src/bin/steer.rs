use std::process::ExitCode;

use clap::Parser;
use steering_moments::cli::{run, Cli};

fn main() -> ExitCode {
    ExitCode::from(run(Cli::parse()))
}
