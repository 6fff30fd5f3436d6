use thiserror::Error;

/// Errors raised by state construction, monotone evaluation and the roof optimizer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
