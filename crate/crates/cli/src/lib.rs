//! Library side of `kms-lab`. The binary and the tests drive the same code.

pub mod commands;
pub mod config;
pub mod report;

use std::time::Instant;

use kmslab_core::{KmsError, LatticeError, MeasureError, ModelError, ParseError};
use thiserror::Error;

pub use config::Settings;
pub use report::{Record, Report, Status};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("unknown {kind} {name:?}; expected one of {expected}")]
    Unknown {
        kind: &'static str,
        name: String,
        expected: &'static str,
    },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Kms(#[from] KmsError),
}

/// Output of a command: its report and, for `ratio`, the histogram CSV.
pub struct Outcome {
    pub report: Report,
    pub csv: Option<String>,
}

/// Runs `command` with the effective settings.
pub fn execute(command: &str, settings: &Settings) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let (records, csv) = commands::run(command, settings)?;
    let report = Report::new(
        command,
        settings.entries().clone(),
        settings.hash(command),
        records,
        start.elapsed().as_millis(),
    );
    Ok(Outcome { report, csv })
}
