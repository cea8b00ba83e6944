use thiserror::Error;

/// Errors raised anywhere in the inversion pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: need at least 2 parameters, got {0}")]
    InvalidDimension(usize),

    #[error("invalid parametrization: {0}")]
    InvalidParametrization(String),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("reference vector has zero norm")]
    ZeroNorm,

    #[error("time step {tau} exceeds the stability bound {tau_max}")]
    Unstable { tau: f64, tau_max: f64 },

    #[error("non-finite value at time level {level} (t = {time})")]
    Divergence { level: usize, time: f64 },

    #[error("{axis} = {value} is not a grid node")]
    Alignment { axis: &'static str, value: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: u64, msg: String },

    #[error("submatrix selection failed: {0}")]
    Selection(String),

    #[error("objective failed at q = {q:?}: {source}")]
    Objective {
        q: Vec<f64>,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
