use thiserror::Error;

/// Errors raised by the library. Each variant carries a human-readable witness.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed or inconsistent input data (dangling ids, mismatched quivers, bad maps).
    #[error("structural error: {0}")]
    Structural(String),
    /// An operation was called outside its documented domain.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// Input rejected by a mathematical validity check.
    #[error("rejected: {0}")]
    Rejected(String),
    /// A search exceeded its configured budget.
    #[error("resource limit: {0}")]
    Resource(String),
    /// An oracle could not certify its answer.
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    /// The request is outside the supported scope.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
