use thiserror::Error;

/// Errors raised by the numeric routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is numerically singular (smallest singular value {sigma_min:e}, threshold {threshold:e})")]
    Singular { sigma_min: f64, threshold: f64 },

    #[error("matrix is not strictly positive definite (smallest eigenvalue {lambda_min:e}, threshold {threshold:e})")]
    NotStrictlyPositive { lambda_min: f64, threshold: f64 },

    #[error("matrix is not positive semidefinite within tolerance")]
    NotPsd,

    #[error("matrix is not unitary within tolerance")]
    NotUnitary,

    #[error("{what} too large: {size} exceeds limit {limit}")]
    TooLarge {
        what: &'static str,
        size: u128,
        limit: u128,
    },

    #[error("non-finite entry encountered")]
    NonFinite,

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_err(msg: impl Into<String>) -> Error {
    Error::Dimension(msg.into())
}
