use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A matrix failed the density-matrix checks (Hermiticity, trace, positivity).
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("dimension {dim} exceeds the configured cap of {cap}")]
    SizeLimit { dim: usize, cap: usize },

    #[error("numerical failure: {0}")]
    Numeric(String),

    /// Randomized construction could not meet its certificate within the retry budget.
    #[error("generation failed: {0}")]
    Generation(String),

    /// Mutually exclusive criteria both reported true. Never a valid outcome.
    #[error("inconsistent classification: {0}")]
    Inconsistent(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
