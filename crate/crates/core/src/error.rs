use thiserror::Error;

/// Errors surfaced by the library. The CLI maps these onto exit codes.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("internal assertion failed (seed {seed}, sample {index}): {msg}")]
    Assertion { seed: u64, index: u64, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
