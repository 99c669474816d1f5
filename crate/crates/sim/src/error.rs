use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: row {row}: {message}")]
    Row {
        path: PathBuf,
        row: u64,
        message: String,
    },
    #[error("{path}: {message}")]
    Snapshot { path: PathBuf, message: String },
    #[error("pool snapshot for {pool_id:?} not found at {path}")]
    MissingPool { pool_id: String, path: PathBuf },
    #[error("event {event_id}: {source}")]
    Event {
        event_id: String,
        source: clmm_jit_core::Error,
    },
    #[error("{0}")]
    InvalidInput(String),
    #[error(transparent)]
    Core(#[from] clmm_jit_core::Error),
    #[error("no records to summarize")]
    EmptyInput,
}

impl SimError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SimError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
