use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized: norm = {norm}")]
    NotNormalized { norm: f64 },

    #[error("invalid qubit count {n}: {reason}")]
    InvalidQubitCount { n: usize, reason: &'static str },

    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite objective value {value} (kernel bug)")]
    NonFinite { value: f64 },

    #[error("invalid covariance matrix: {0}")]
    InvalidCovariance(String),

    #[error("matrix exponential failed: {0}")]
    Exponential(String),

    #[error("infeasible constraint: {0}")]
    Infeasible(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
