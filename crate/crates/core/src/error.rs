use thiserror::Error;

/// Errors raised by state construction, channel construction and the checks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("parameter out of range: {0}")]
    Domain(String),

    #[error("map is not trace preserving (residual {0:e})")]
    NotTracePreserving(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("singular decomposition weight: {0}")]
    SingularWeight(String),

    #[error("not a stochastic matrix: {0}")]
    NotStochastic(String),

    #[error("reference state lacks support: {0}")]
    Support(String),

    #[error("independent computations disagree: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
