use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid matching: {0}")]
    InvalidMatching(String),
    #[error("preferences contain ties: {0}")]
    TiesPresent(String),
    #[error("instance is not bipartite: {0}")]
    NotBipartite(String),
    #[error("linear program error: {0}")]
    Lp(String),
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
