//! Library backing the `matskew` binary: dataset file formats, compiled-in
//! simulation presets, the replicate-sweep driver, and report rendering.
//!
//! Everything here is deterministic given its inputs: fixed seeds map to fixed
//! datasets, fits are seed-free, and both report artifacts are assembled
//! single-threaded from order-stable intermediates, so repeated runs produce
//! byte-identical files regardless of thread count.

pub mod commands;
pub mod config;
pub mod dataset;
pub mod presets;
pub mod report;

use std::fmt;

/// CLI-level failures, split by exit code: input/validation problems exit
/// with 2, fit aborts with 1.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable, malformed, or invalid input (also bad flags and I/O).
    Invalid(String),
    /// The fitter aborted (ascent violation, degenerate weights, boundary).
    Fit(String),
}

impl CliError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CliError::Invalid(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Fit(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(msg) => write!(f, "{msg}"),
            CliError::Fit(msg) => write!(f, "fit failed: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = std::result::Result<T, CliError>;
