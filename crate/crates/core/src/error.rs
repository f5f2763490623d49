use thiserror::Error;

/// Errors raised by the depth, testing and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty reference sample")]
    EmptyReference,
    #[error("empty data sample")]
    EmptyData,
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("ragged matrix: row {row} has {found} columns, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("dimension mismatch: expected d={expected}, found d={found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid depth configuration: {0}")]
    InvalidDepth(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("value {value} outside the unit interval at position {index}")]
    OutsideUnitInterval { index: usize, value: f64 },
    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("invalid distribution spec: {0}")]
    InvalidSpec(String),
    #[error("reference smaller than data (N={reference} < n={data})")]
    ReferenceTooSmall { reference: usize, data: usize },
    #[error("linear program basis is numerically singular (condition estimate {condition:.3e})")]
    SingularBasis { condition: f64 },
    #[error("linear program did not converge within {iterations} iterations")]
    NotConverged { iterations: usize },
    #[error("exact enumeration needs {count} splits (limit {limit}); use a permutation p-value instead")]
    EnumerationTooLarge { count: u128, limit: u128 },
    #[error("unsupported analytic oracle: {0}")]
    UnsupportedOracle(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("invalid experiment config: {0}")]
    Config(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
