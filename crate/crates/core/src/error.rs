use thiserror::Error;

/// Errors raised by series construction, evaluation and the numerical drivers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("value out of range: {0}")]
    Range(String),

    #[error("argument {x} outside the exact range 1..={n}")]
    OutOfRange { x: f64, n: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("no saddle point for x = {x}: {reason}")]
    NoSaddle { x: f64, reason: String },

    #[error("no convergence: {0}")]
    Convergence(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
