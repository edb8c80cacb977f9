use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// Invalid optimizer or sweep settings.
    #[error("configuration error: {0}")]
    Config(String),

    /// Every benchmark evaluation in a search range was singular.
    #[error("singular benchmark: {0}")]
    Singular(String),

    #[error("Fock truncation not converged: top-level population {population:e}; increase the cutoff")]
    Truncation { population: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
