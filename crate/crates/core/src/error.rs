use thiserror::Error;

/// Failures reported by the numerical layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },
    #[error("not invertible: {0}")]
    NotInvertible(&'static str),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("input must be negative definite: {0}")]
    NotNegativeDefinite(&'static str),
    #[error("GMI undefined: {0}")]
    GmiUndefined(&'static str),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("K = {k} is too large for exhaustive search (limit {limit}); use the energy based mode")]
    TooLarge { k: usize, limit: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
