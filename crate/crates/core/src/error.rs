use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("hypothesis violated: {}", .0.join("; "))]
    Hypothesis(Vec<String>),

    #[error("kernel is singular at the origin")]
    Singular,

    #[error("divergent kernel norm: {0}")]
    Divergent(String),

    #[error("support radius {support} exceeds grid extent {extent}")]
    SupportExceedsGrid { support: f64, extent: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("growth function not certified: {0}")]
    Uncertified(String),

    #[error("malformed grid data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
