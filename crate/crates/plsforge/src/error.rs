use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("{0} and {1} are not adjacent")]
    NotAnEdge(usize, usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionError { expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("circuit contains a cycle through gate {0}")]
    NotADag(usize),
    #[error("solution is not canonical: {0}")]
    NotCanonical(String),
    #[error("step cap of {steps} exceeded")]
    StepCapExceeded {
        steps: usize,
        /// Paths (as edge ids) of the last profile reached.
        last: Vec<Vec<usize>>,
    },
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("scale N={n} is below the minimum {n_min}")]
    ScaleTooSmall { n: u32, n_min: u32 },
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
