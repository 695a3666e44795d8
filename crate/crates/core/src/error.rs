use thiserror::Error;

/// Errors raised by the verification, statistics and experiment layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A point, rectangle or function value fell outside the unit square.
    #[error("domain error: {0}")]
    Domain(String),
    /// Malformed arguments (empty input, NaN, unordered probes, mismatched sizes).
    #[error("argument error: {0}")]
    Argument(String),
    /// A coordinate has zero variance, so a correlation is undefined.
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    /// A family parameter is outside its admissible range.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// A transform cannot carry the claimed invariance (e.g. zero slope).
    #[error("degenerate transform: {0}")]
    DegenerateTransform(String),
    /// An experiment configuration violates its invariants.
    #[error("config error: {0}")]
    Config(String),
    /// Input file could not be parsed; `line` is 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
