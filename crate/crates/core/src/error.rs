use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid platform: {0}")]
    Platform(String),

    #[error("invalid application set: {0}")]
    Application(String),

    #[error("invalid model input: {0}")]
    Model(String),

    #[error("coefficient overflow: {0}")]
    Overflow(String),

    #[error("oracle refused: {0}")]
    OracleRefused(String),

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
