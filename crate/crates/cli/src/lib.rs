//! Command-line front end: every command writes CSV/JSON artifacts plus a
//! `manifest.json` into its output directory.

pub mod args;
mod commands;
pub mod output;

use std::ffi::OsString;
use std::fmt;
use std::process::ExitCode;

use clap::Parser;

pub use args::Cli;
pub use output::RunManifest;

use thirring_core::{Error, Tolerances};

/// Bad arguments that clap cannot catch on its own.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

fn exit_code_for(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return EXIT_USAGE;
    }
    match err.downcast_ref::<Error>() {
        Some(
            Error::InvalidMass(_)
            | Error::InvalidParameter(_)
            | Error::TrivialInteraction(_)
            | Error::SupportOverflow(_)
            | Error::LocalizedCondition { .. }
            | Error::DegenerateMomentum(_)
            | Error::Resonance(_),
        ) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn main_with<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::parse_from(argv);
    let (tol, overrides) = Tolerances::from_env();
    for (name, value) in &overrides {
        eprintln!("tolerance override: {name}={value:e}");
    }
    match commands::run(&cli, tol, &overrides) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
