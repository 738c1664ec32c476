use thiserror::Error;

/// Malformed input: unknown family, unreadable file, bad cut, missing labels.
pub const EXIT_USAGE: i32 = 2;
/// Generation failure or size cap exceeded.
pub const EXIT_FAILURE: i32 = 3;
/// Classification criteria contradict each other.
pub const EXIT_INCONSISTENT: i32 = 4;

/// An error carrying the process exit code it maps to.
#[derive(Debug, Error)]
#[error("{message}")]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn failure(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_FAILURE,
            message: message.into(),
        }
    }
}

impl From<pptmerge::Error> for CliError {
    fn from(e: pptmerge::Error) -> Self {
        use pptmerge::Error as E;
        let code = match e {
            E::InvalidArgument(_) | E::InvalidState(_) => EXIT_USAGE,
            E::SizeLimit { .. } | E::Numeric(_) | E::Generation(_) => EXIT_FAILURE,
            E::Inconsistent(_) => EXIT_INCONSISTENT,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
