use thiserror::Error;

/// Errors produced by the optimizer, the solvers and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    /// The relaxation at v = 0 could not be solved, so the rank-one
    /// tightening loop has nothing to start from.
    #[error("initial relaxation infeasible")]
    InitialInfeasible,

    /// Every cluster has zero slot duration, leaving nothing to optimize.
    #[error("subproblem objective is empty: all cluster durations are zero")]
    EmptyObjective,

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
