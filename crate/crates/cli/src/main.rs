//! Batch front end: every subcommand runs one verification or solver
//! pipeline and writes a deterministic JSON (or CSV) report.
//!
//! Exit codes: 0 on success with all tolerances met, 1 on usage or I/O
//! errors, 2 when any checked residual or tolerance fails.

mod commands;
mod config;

use clap::error::ErrorKind;
use clap::Parser;

fn main() {
    let cli = match commands::Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // keep clap's help/version on stdout with success, everything
            // else is a usage error (exit 1)
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let code = match commands::run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    };
    std::process::exit(code);
}
