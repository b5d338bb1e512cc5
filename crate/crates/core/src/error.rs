use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed PGM: {0}")]
    Format(String),

    #[error("unsupported PGM max value {0} (only 255 is accepted)")]
    UnsupportedMaxValue(u32),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("solver diverged at iteration {iteration}: {reason}")]
    SolverDiverged { iteration: usize, reason: String },

    #[error("experiment row (v1 = {v1}, v2 = {v2}) failed: {source}")]
    ExperimentRow {
        v1: usize,
        v2: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 2,
            Error::SolverDiverged { .. } => 4,
            Error::ExperimentRow { source, .. } => source.exit_code(),
            _ => 1,
        }
    }
}
