use thiserror::Error;

/// Errors produced by the estimators, mechanisms and experiment engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("empty input: {0}")]
    EmptyInput(String),
    /// The Sample mechanism kept no points, so the pooled mean is 0/0.
    #[error("degenerate sample: no points survived inclusion sampling")]
    DegenerateSample,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("config error on line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("malformed results file on line {line}: {message}")]
    Results { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn empty(msg: impl Into<String>) -> Error {
    Error::EmptyInput(msg.into())
}
