use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("{what} has size {size}, above the dense limit of {limit}")]
    Capacity { what: &'static str, size: usize, limit: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("training diverged in epoch {epoch}: |entry| exceeded {limit:e}")]
    Diverged { epoch: usize, limit: f64 },

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
