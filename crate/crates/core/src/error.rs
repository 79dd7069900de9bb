use std::io;

use thiserror::Error;

/// Errors produced by generation, analysis and enumeration.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or configuration value violates its invariant.
    #[error("configuration error: {0}")]
    Config(String),

    /// An argument lies outside the domain of the operation (odd k for pairings, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// An exhaustive enumeration was refused because it exceeds its size guard.
    #[error("enumeration guard exceeded: {0}")]
    Guard(String),

    /// An exact oracle was asked to handle a process it does not support.
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    /// An iterative numerical method failed.
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}
