mod args;
mod cmd;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use output::CliError;

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Flood(a) => cmd::flood::run(a),
        Command::Ic(a) => cmd::ic::run(a),
        Command::Fit(a) => cmd::fit::run(a),
        Command::Bounds(a) => cmd::bounds::run(a),
        Command::Verify(a) => cmd::verify::run(a),
        Command::Couple(a) => cmd::couple::run(a),
    }
}

fn main() -> ExitCode {
    let argv = match config::expand_args(std::env::args_os().collect()) {
        Ok(argv) => argv,
        Err(e) => return e.report(),
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version to stdout and usage errors to stderr
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(),
    }
}
