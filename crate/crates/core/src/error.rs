use thiserror::Error;

/// Errors raised by the discord/distortion toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("division of nonzero {numerator} by zero at flat index {index}")]
    Division { index: usize, numerator: f64 },

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("message size {0} exceeds the factorial guard (at most 8, i.e. 8! = 40320 permutations)")]
    Capacity(usize),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
