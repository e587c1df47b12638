use thiserror::Error;

/// Errors surfaced by every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-range input (bad dimension, symbol out of range, singular generator, ...).
    #[error("input error: {0}")]
    Input(String),
    /// An enumeration would exceed the configured word budget. Partial results are never returned.
    #[error("resource cap exceeded: {what} needs {needed:.3e} words, cap is {cap}")]
    Resource { what: String, needed: f64, cap: u64 },
    /// An operation was called outside its contract (e.g. diagnosing a spannable system).
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
