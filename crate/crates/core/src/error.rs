use thiserror::Error;

/// Errors produced by kernel evaluation and spectral routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Arguments outside the documented domain of an operation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Operation not defined for the requested configuration.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Elementary-function argument left its open domain during jet
    /// propagation (e.g. arcsin center at |c| >= 1).
    #[error("domain error: {0}")]
    Domain(String),

    /// Two independent computation routes disagreed beyond tolerance.
    #[error("numerical inconsistency: {0}")]
    NumericalInconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
