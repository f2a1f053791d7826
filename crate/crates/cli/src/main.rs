use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use ecplan_cli::args::Cli;
use ecplan_cli::error::CliError;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = ecplan_cli::run(&cli, &mut out).and_then(|()| out.flush().map_err(CliError::from));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            drop(out);
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
