use thiserror::Error;

/// Errors surfaced by the clustering library.
#[derive(Debug, Error)]
pub enum MocaError {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("csv error at line {line}: {reason}")]
    Csv { line: usize, reason: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("internal failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, MocaError>;
