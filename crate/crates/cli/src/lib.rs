//! The `coinvest` command-line tool. `main.rs` only forwards to [`run`].

mod args;
mod battery;
mod commands;
mod config;
mod manifest;
mod output;

use std::ffi::OsString;

use clap::{CommandFactory, FromArgMatches};
use thiserror::Error;

pub use args::Cli;
pub use config::{FileConfig, RunConfig};
pub use manifest::{RunManifest, MANIFEST_FILE};

/// Exit status for bad inputs, flags or config files.
pub const EXIT_INPUT: i32 = 2;
/// Exit status when the data cannot support the analysis.
pub const EXIT_DEGENERATE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("insufficient co-investment structure: {0}")]
    Degenerate(String),
    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Config(_) => EXIT_INPUT,
            CliError::Degenerate(_) => EXIT_DEGENERATE,
            CliError::Output(_) => 1,
        }
    }
}

/// `--version` output: the version followed by the default configuration.
pub fn long_version() -> String {
    format!(
        "{}\n\ndefault configuration:\n{}",
        env!("CARGO_PKG_VERSION"),
        RunConfig::default().to_toml()
    )
}

/// Parses `args` (program name first) and runs the command; returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let version: &'static str = Box::leak(long_version().into_boxed_str());
    let matches = match Cli::command()
        .long_version(version)
        .try_get_matches_from(args)
    {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { 0 };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return EXIT_INPUT;
        }
    };
    match commands::dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
