//! `assay`: prevalence-aware evaluation of diagnostic assays.
//!
//! Exit codes: 0 success, 1 domain or data error, 2 usage error.

mod args;
mod commands;

use std::process::ExitCode;

use clap::{CommandFactory, Parser};

use args::{Cli, Command};
use commands::CliError;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Metrics(a) => commands::metrics(a),
        Command::Sweep(a) => commands::sweep_cmd(a),
        Command::Roc(a) => commands::roc(a),
        Command::Report(a) => commands::report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            // clap prints the usage line and exits with status 2
            Cli::command()
                .error(clap::error::ErrorKind::ArgumentConflict, msg)
                .exit()
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
