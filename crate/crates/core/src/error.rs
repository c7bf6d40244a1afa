use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("format error: {0}")]
    Format(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("unknown id `{0}`")]
    UnknownId(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("concept pool is empty after filtering")]
    EmptyPool,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("item `{0}` has an empty sparse vector")]
    EmptyVector(String),
    #[error("item `{id}`: {source}")]
    Item {
        id: String,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn for_item(self, id: &str) -> Self {
        Error::Item {
            id: id.to_string(),
            source: Box::new(self),
        }
    }

    /// The innermost error, looking through per-item wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Item { source, .. } => source.root(),
            other => other,
        }
    }
}
