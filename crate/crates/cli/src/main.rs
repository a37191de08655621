mod cli;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use cli::{Cli, Command};
use commands::{region, simulate, verify, wave};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.as_path();
    let result = match &cli.command {
        Command::Wave(args) => wave::run(out, args),
        Command::Region(args) => region::run(out, args),
        Command::Atlas(args) => region::atlas(out, args),
        Command::Simulate(args) => simulate::simulate(out, args),
        Command::Sweep(args) => simulate::sweep(out, args),
        Command::Verify(args) => verify::run(out, args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
