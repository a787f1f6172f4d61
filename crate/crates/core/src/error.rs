use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("unsupported tensor order {0}")]
    UnsupportedOrder(usize),
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("not a density matrix: {0}")]
    InvalidState(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("numeric integrity failure: {0}")]
    NumericIntegrity(String),
    #[error("criterion unavailable: {0}")]
    Unavailable(String),
    #[error("no threshold in [0, 1]: {0}")]
    NoThreshold(String),
}

pub type Result<T> = std::result::Result<T, Error>;
