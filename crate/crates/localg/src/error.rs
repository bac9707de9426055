use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("input is not a locality space")]
    NotLocality,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("operation requires characteristic zero (or characteristic above {0})")]
    CharacteristicNotZero(u32),
    #[error("arguments are not locality independent: {0}")]
    NotIndependent(String),
    #[error("forest is not properly decorated")]
    NonProperDecoration,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("instance too large for exhaustive enumeration: {0}")]
    TooLarge(String),
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
