//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by simulators, diagnostics and bound evaluators.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates a documented precondition (shape, range, sign).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A state is too degenerate for the requested computation
    /// (e.g. the tail probability mass has collapsed to 0 or 1 in floats).
    #[error("degenerate state: {0}")]
    DegenerateState(String),
    /// Input lies outside a function's mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A configuration object is internally inconsistent.
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
