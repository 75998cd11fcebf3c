use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("geometry failure: {0}")]
    Geometry(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
