use thiserror::Error;

/// Errors produced by graph construction, codecs, counters and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Input graph does not have the required structure (e.g. not a tree).
    #[error("invalid structure: {0}")]
    Structure(String),

    /// A constraint on the input is violated (e.g. prefix not independent).
    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown verification suite: {0}")]
    UnknownSuite(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
