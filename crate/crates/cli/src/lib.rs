//! The `kolmo` command line: JSON in, JSON or CSV out.
//!
//! Exit codes: 0 on success, 1 on invalid input (a JSON error object is
//! written to stderr), 2 when a computed defect exceeds its tolerance, 64 on
//! usage errors.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod io;

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use error::{CliResult, EXIT_USAGE};

/// Caps the global thread pool at `KOLMO_THREADS` when it is set.
fn configure_threads() {
    if let Some(n) = std::env::var("KOLMO_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
    {
        if n > 0 {
            // Fails only when the pool was already built, e.g. by an earlier call in-process.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Kernel(c) => commands::kernels::kernel(c),
        Command::Gns(a) => commands::kernels::gns(a),
        Command::Group(c) => commands::kernels::group(c),
        Command::Gabor(c) => commands::kernels::gabor(c),
        Command::Frames(c) => commands::kernels::frames(c),
        Command::Filter(c) => commands::filters::filter(c),
        Command::Dilate(c) => commands::filters::dilate(c),
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
        }
    };
    configure_threads();
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}
