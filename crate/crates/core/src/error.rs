use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown sky cover category {0:?}")]
    UnknownCategory(String),
    #[error("{what} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("{}:{line}: {message}", file.display())]
    Parse {
        file: PathBuf,
        line: u64,
        message: String,
    },
    #[error("empty sample")]
    EmptySample,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("actual value at index {index} is zero; MAPE is undefined")]
    ZeroActual { index: usize },
    #[error("series has zero variance")]
    ConstantSeries,
    #[error("series of length {n} is too short for max lag {max_lag}")]
    TooShort { n: usize, max_lag: usize },
    #[error("{n} rows available, at least {min} required")]
    TooFewRows { n: usize, min: usize },
    #[error("vector has zero variance")]
    ConstantVector,
    #[error("degenerate normalization range: min = max = {0}")]
    DegenerateRange(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("damped normal equations could not be solved at lambda = {lambda:e}")]
    SingularSystem { lambda: f64 },
    #[error("no day with positive generation")]
    NoGeneration,
    #[error("lead day {lead_day} has no complete rows")]
    NoUsableRows { lead_day: u8 },
    #[error("unknown weather variable {0:?}")]
    UnknownVariable(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by malformed or insufficient input data, as
    /// opposed to numerical failures during computation.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::SingularSystem { .. })
    }
}
