use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("lattice is degenerate")]
    Degenerate,
    #[error("lattice is not even")]
    NotEven,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("unknown name: {0}")]
    Unknown(String),
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
