use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("time truncation did not converge: {0}")]
    TruncationNonConvergence(String),

    #[error("quadrature did not reach tolerance: {0}")]
    QuadratureNonConvergence(String),

    #[error("grid resolution inadequate: {0}")]
    GridResolution(String),

    #[error("insufficient points for fit: need {needed}, have {available}")]
    InsufficientPoints { needed: usize, available: usize },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("i/o failure at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("report failure: {0}")]
    Report(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
