//! `morrey`: command-line driver for the morrey-core library.
//!
//! Exit status: 0 on success, 2 on a parameter error, 3 on a data error,
//! 4 when a verification experiment ran but its pass criterion failed.

mod args;
mod commands;
mod error;
mod output;
mod verify;

use std::process::ExitCode;

use clap::Parser;
use serde_json::Value;

use args::{AbelCommand, Cli, Command, FdeCommand, OpsCommand};
use error::{CliError, CliResult};

fn dispatch(cli: &Cli) -> CliResult<(Value, Option<CliError>)> {
    let g = &cli.global;
    let resolved = match &cli.command {
        Command::Norm(a) => commands::norm(g, a)?,
        Command::Ops(OpsCommand::Apply(a)) => commands::ops_apply(g, a)?,
        Command::Weights(a) => commands::weights(g, a)?,
        Command::Abel(AbelCommand::Solve(a)) => commands::abel_solve(g, a)?,
        Command::Fde(FdeCommand::Solve(a)) => commands::fde_solve(g, a)?,
        Command::Fde(FdeCommand::Exact(a)) => commands::fde_exact(g, a)?,
        Command::Fde(FdeCommand::Delta(a)) => commands::fde_delta(g, a)?,
        Command::Verify(a) => return verify::run(g, a),
    };
    Ok((resolved, None))
}

fn run(cli: &Cli) -> CliResult<()> {
    let (resolved, failure) = dispatch(cli)?;
    output::write_manifest(cli, &resolved)?;
    failure.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
