//! Command-line front end for the `fif` decomposition library.

pub mod commands;
pub mod error;
pub mod io;
pub mod manifest;
pub mod plot;

use std::ffi::OsString;

use clap::Parser;

pub use commands::Cli;
pub use error::{CliError, CliResult};

/// Parses `args` (program name first), runs the command, and returns the
/// process exit status, printing a one-line diagnostic on failure.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let recorded = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match commands::run(cli, recorded) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("fif: error: {e}");
            e.exit_code()
        }
    }
}
