use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension {0}: need N >= 2")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (residual {0:e})")]
    NotHermitian(f64),

    #[error("non-finite entry in input")]
    NonFinite,

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid probability weights: {0}")]
    InvalidWeights(String),

    #[error("measurement basis is not orthonormal (residual {0:e})")]
    NotOrthonormal(f64),

    #[error("singular chart: {0}")]
    SingularChart(String),

    #[error("invalid step: {0}")]
    InvalidStep(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
