use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A full-column-rank precondition failed.
    #[error("matrix is numerically rank deficient: sigma_min = {sigma_min:e}, sigma_max = {sigma_max:e}")]
    RankDeficient { sigma_min: f64, sigma_max: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Enumeration would exceed the configured cap.
    #[error("enumeration of {requested} items exceeds the cap of {cap}; opt in to lift the guard")]
    TooLarge { requested: u128, cap: u128 },

    #[error("integer overflow computing {0}")]
    Overflow(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
