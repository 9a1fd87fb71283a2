//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by ranking construction, file ingestion, privacy
/// arithmetic, and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an operation's arguments was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A profile or config file could not be parsed; `line` is 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Exhaustive search refused to run above its size guard.
    #[error("unsupported size: m = {m} exceeds the maximum of {max}")]
    UnsupportedSize { m: usize, max: usize },

    /// An experiment configuration field is missing or inconsistent.
    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn config(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
