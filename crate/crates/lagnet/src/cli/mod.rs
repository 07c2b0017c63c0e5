//! Command-line driver: ingestion -> training -> search -> forecasting ->
//! comparison, with reproducible file outputs.
//!
//! Exit codes: 0 success, 1 runtime/fit failure, 2 usage/validation error.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

pub use args::{Cli, Command};

/// Errors split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or config values: exit 2.
    Usage(String),
    /// Fit, i/o or data failures: exit 1.
    Runtime(lagnet::Error),
}

impl From<lagnet::Error> for CliError {
    fn from(e: lagnet::Error) -> Self {
        CliError::Runtime(e)
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => commands::simulate(args),
        Command::FitNn(args) => commands::fit_nn(args),
        Command::FitArima(args) => commands::fit_arima(args),
        Command::Search(args) => commands::search(args),
        Command::Forecast(args) => commands::forecast(args),
        Command::Compare(args) => commands::compare(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
