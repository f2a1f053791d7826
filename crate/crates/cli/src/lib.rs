//! The `ecplan` command-line tool.
//!
//! Each subcommand maps its arguments onto operations of `ecplan-core` and
//! prints the results; no numbers are computed here.

pub mod args;
pub mod commands;
pub mod compare;
pub mod error;
pub mod output;

use std::io::Write;

use args::{Cli, Command};
use error::CliError;

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let global = &cli.global;
    match &cli.command {
        Command::Plan(args) => commands::plan(global, args, out),
        Command::Compare(args) => commands::compare(global, args, out),
        Command::Simulate(args) => commands::simulate_cmd(global, args, out),
        Command::Codec(command) => commands::codec(global, command, out),
        Command::Curve(args) => commands::curve(global, args, out),
    }
}
