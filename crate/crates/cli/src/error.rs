use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] gsq_core::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_SINGULAR: u8 = 3;

impl CliError {
    /// Process exit status: 2 for bad input, 3 for a singular benchmark.
    pub fn exit_code(&self) -> u8 {
        use gsq_core::Error as E;
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Core(E::Config(_) | E::Domain(_) | E::DimensionMismatch { .. }) => EXIT_CONFIG,
            CliError::Core(E::Singular(_)) => EXIT_SINGULAR,
            _ => EXIT_FAILURE,
        }
    }
}
