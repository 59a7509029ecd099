use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("feature kind mismatch: {0}")]
    KindMismatch(String),

    #[error("row {row} has zero norm; chord distance is undefined")]
    DegenerateRow { row: usize },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("silhouette is undefined for a single-cluster partition")]
    UndefinedSilhouette,

    #[error("cluster {cluster} has no members other than individual {individual}")]
    DegenerateCluster { individual: usize, cluster: usize },

    #[error("cluster/group mismatch: {0}")]
    Mismatch(String),

    #[error("solver failed: {0}")]
    Solver(String),

    #[error("tuning failed: {0}")]
    Tuning(String),

    #[error("{path}:{line}: {message}")]
    Ingestion {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Coarse error classes, used by the CLI to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorFamily {
    Ingestion,
    Validation,
    Solver,
    Tuning,
}

impl Error {
    pub fn family(&self) -> ErrorFamily {
        match self {
            Error::Ingestion { .. } | Error::Io { .. } => ErrorFamily::Ingestion,
            Error::Solver(_) => ErrorFamily::Solver,
            Error::Tuning(_) => ErrorFamily::Tuning,
            _ => ErrorFamily::Validation,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn ingest(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Ingestion {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
