use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),
    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("invalid parameters for `{experiment}`: {message}")]
    InvalidParams { experiment: String, message: String },
    #[error(transparent)]
    Core(#[from] mallows_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;
