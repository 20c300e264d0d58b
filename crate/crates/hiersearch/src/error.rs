use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// Bad configuration or arguments; maps to exit code 1.
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Search(#[from] hiersearch_core::Error),
    #[error("trial {trial} of `{method}` failed: {source}")]
    Trial {
        method: String,
        trial: usize,
        #[source]
        source: hiersearch_core::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 1,
            _ => 2,
        }
    }
}
