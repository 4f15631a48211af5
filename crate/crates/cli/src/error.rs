use std::path::PathBuf;

use serde_json::{json, Value};
use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },

    #[error("{path}:{line}: not a valid SPD matrix: {source}")]
    InvalidSpd {
        path: PathBuf,
        line: usize,
        min_eigenvalue: Option<f64>,
        #[source]
        source: mccm::Error,
    },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] mccm::Error),

    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Parse { .. } => "parse",
            CliError::InvalidSpd { .. } => "invalid_spd",
            CliError::Usage(_) => "usage",
            CliError::Core(mccm::Error::RankDeficient { .. }) => "rank_deficient",
            CliError::Core(_) => "numeric",
            CliError::ThreadPool(_) => "thread_pool",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    /// Machine-readable form written to stderr on failure.
    pub fn to_json(&self) -> Value {
        let mut body = json!({ "kind": self.kind(), "message": self.to_string() });
        match self {
            CliError::Parse { path, line, .. } => {
                body["path"] = json!(path);
                body["line"] = json!(line);
            }
            CliError::InvalidSpd {
                path,
                line,
                min_eigenvalue,
                ..
            } => {
                body["path"] = json!(path);
                body["line"] = json!(line);
                body["min_eigenvalue"] = json!(min_eigenvalue);
            }
            CliError::Core(mccm::Error::RankDeficient { suggested_ridge, .. }) => {
                body["suggested_ridge"] = json!(suggested_ridge);
            }
            _ => {}
        }
        json!({ "schema": 1, "error": body })
    }
}
