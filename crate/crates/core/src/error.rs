use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("field mismatch: {0}")]
    Field(String),
    #[error("invalid shape: {0}")]
    Shape(String),
    #[error("index out of range: {0}")]
    Index(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("input is not symmetric: {0}")]
    Symmetry(String),
    #[error("outside the domain of validity: {0}")]
    Domain(String),
    #[error("zero input: {0}")]
    ZeroInput(String),
    #[error("search budget exceeded: {0}")]
    Budget(String),
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
