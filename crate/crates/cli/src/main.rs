//! `lorenz-jel`: test equality of generalized Lorenz curves, tabulate
//! curves, and run Monte Carlo size/power studies.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Failures after argument parsing. Usage problems map to exit code 2,
/// everything else (unreadable files, bad data, I/O) to 1.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Data(#[from] lorenz_jel::Error),
    #[error("writing output: {0}")]
    Io(#[from] std::io::Error),
    #[error("encoding output: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Test(a) => commands::test(a),
        Command::Curve(a) => commands::curve(a),
        Command::Simulate(a) => commands::simulate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lorenz-jel: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
