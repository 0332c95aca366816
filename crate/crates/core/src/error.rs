use thiserror::Error;

/// Errors raised by constructors and precondition checks throughout the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidPmf(String),
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("support condition violated: {0}")]
    SupportViolation(String),
    #[error("type class too large: |T| = {cardinality} exceeds limit {limit}")]
    TypeClassTooLarge { cardinality: u128, limit: u128 },
    #[error("infeasible size: {0}")]
    Infeasible(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
