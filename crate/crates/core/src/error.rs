use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// Two or more classes share the maximal count.
    #[error("tied mode between classes {0:?}")]
    Tie(Vec<u8>),

    #[error("cannot balance: class {0} has no authors")]
    Balance(u8),

    #[error("class {class} has {count} documents, need at least {needed}")]
    ClassTooSmall { class: u8, count: usize, needed: usize },

    #[error("score undefined: {0}")]
    UndefinedScore(&'static str),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("inconsistent data: {0}")]
    Consistency(String),

    #[error("non-finite loss at epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("missing artifact {artifact}; run `{stage}` first")]
    MissingUpstream { artifact: String, stage: String },

    #[error("stale artifact {artifact}: changed since `{stage}` recorded it; rerun `{stage}`")]
    StaleUpstream { artifact: String, stage: String },

    #[error("vocabulary hash mismatch: checkpoint has {expected}, found {found}")]
    VocabMismatch { expected: String, found: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
