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

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("malformed row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },

    #[error("unknown label: {0:?}")]
    UnknownLabel(String),

    #[error("duplicate document id: {0}")]
    DuplicateId(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("class {0} has no documents")]
    EmptyClass(String),

    #[error("empty vocabulary after filtering")]
    EmptyVocabulary,

    #[error("embedding file line {line}: {reason}")]
    EmbeddingFormat { line: usize, reason: String },

    #[error("missing embeddings for {} document(s): {}", .0.len(), .0.join(", "))]
    MissingEmbeddings(Vec<String>),

    #[error("row ids of feature blocks do not match ({0})")]
    RowMismatch(String),

    #[error("feature width mismatch: expected {expected} columns, got {actual}")]
    WidthMismatch { expected: usize, actual: usize },

    #[error("label count {labels} does not match row count {rows}")]
    LengthMismatch { labels: usize, rows: usize },

    #[error("training data needs at least two classes, found {0}")]
    SingleClass(usize),

    #[error("non-finite feature value in row {0}")]
    NonFinite(usize),

    #[error("gini impurity is undefined for an empty node")]
    EmptyNode,

    #[error("label {0:?} is not in the class list")]
    UnknownClass(String),

    #[error("model serialization: {0}")]
    Serialization(#[from] serde_json::Error),

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
