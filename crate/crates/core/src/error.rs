use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong while loading inputs or running an engine operation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{file}:{line}:{col}: {msg}")]
    Syntax {
        file: String,
        line: usize,
        col: usize,
        msg: String,
    },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("relation {relation}, row {row}: expected {expected} values, found {found}")]
    Arity {
        relation: String,
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("relation {relation}, row {row}: duplicate tuple id {tid}")]
    DuplicateTid {
        relation: String,
        row: usize,
        tid: u64,
    },

    #[error("relation {relation}, row {row}: {msg}")]
    Domain {
        relation: String,
        row: usize,
        msg: String,
    },

    #[error("unknown relation {0}")]
    UnknownRelation(String),

    #[error("unknown attribute {0}")]
    UnknownAttribute(String),

    #[error("unknown similarity {0}")]
    UnknownSimilarity(String),

    #[error("unknown matching dependency {0}")]
    UnknownMd(String),

    #[error("instances are not correlated: {0}")]
    NotCorrelated(String),

    #[error("invalid matching dependency: {0}")]
    InvalidMd(String),

    #[error("not a linear pair: {0}")]
    NotLinearPair(String),

    #[error("fast path not applicable: MD set is classified {0}")]
    NotFastEligible(String),

    #[error("query is not an unchangeable-join conjunctive query: {0}")]
    NotUjcq(String),

    #[error("invalid query: {0}")]
    Query(String),

    #[error("oracle bounds exceeded: {0}")]
    BoundsExceeded(String),

    #[error("key and non-key attributes overlap: {0}")]
    KeyOverlap(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotFastEligible(_) | Error::NotUjcq(_) | Error::NotLinearPair(_) => 2,
            Error::BoundsExceeded(_) => 3,
            _ => 1,
        }
    }

    pub(crate) fn syntax(file: &str, line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Syntax {
            file: file.to_string(),
            line,
            col,
            msg: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
