use thiserror::Error;

/// Errors raised by channel synthesis, precoding and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid cluster layout: {0}")]
    InvalidLayout(String),

    /// A matrix that must be inverted is singular or numerically singular.
    #[error("singular matrix in {context} (condition number {condition:.3e})")]
    Singular { context: String, condition: f64 },

    /// A quantity that must be nonzero collapsed to zero (e.g. a precoder with no energy).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("geometry: {0}")]
    Geometry(String),

    #[error("config: {0}")]
    Config(String),

    #[error("data format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
