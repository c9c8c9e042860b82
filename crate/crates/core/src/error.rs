use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown {kind} id `{id}`")]
    UnknownId { kind: &'static str, id: String },
    #[error("no path between endpoints of flow `{0}`")]
    UnreachablePair(String),
    #[error("flow `{0}` has no path; run compute_paths first")]
    MissingPath(String),
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("invalid instance: {0}")]
    Validation(String),
    #[error("invalid demand range [{lo}, {hi}]")]
    InvalidRange { lo: f64, hi: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("index {index} out of range for sequence of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("rates vector invalid: {0}")]
    InvalidRates(String),
    #[error("LP numerical failure: {0}")]
    NumericalFailure(String),
    #[error("LP unexpectedly {0}")]
    UnexpectedLpStatus(&'static str),
    #[error("degenerate instance: {0}")]
    DegenerateInstance(String),
    #[error("resource stretch Z = {0} is too small (must exceed 1)")]
    ZTooSmall(f64),
    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
