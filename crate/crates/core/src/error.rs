use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid sector: {0}")]
    InvalidSector(String),
    #[error("basis mismatch: state lives in {found}, operation expects {expected}")]
    BasisMismatch { expected: String, found: String },
    #[error("empty target sector: {0}")]
    EmptySector(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("unattainable tolerance {0:e}")]
    Tolerance(f64),
    #[error("schedule error: {0}")]
    Schedule(String),
    #[error("partition violated: one-particle-per-side probability {0:.6}")]
    Partition(f64),
    #[error("invalid density matrix: {0}")]
    DensityMatrix(String),
    #[error("numeric contract violated: {0}")]
    NumericContract(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
