//! `gperiods`: compute and render Gaussian periods, supercharacters, Laurent
//! images, Weyl sums and ray class field periods.
//!
//! Exit codes: 0 ok, 2 usage, 3 budget, 4 numeric failure, 5 IO.
//! `GPERIODS_THREADS` sets the worker count.

mod args;
mod commands;
mod error;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;
use crate::error::CliError;

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("GPERIODS_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("GPERIODS_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match init_threads().and_then(|()| commands::run(&cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
