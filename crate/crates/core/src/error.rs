//! Error types shared across the crate.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("index {index} out of range for {dimension} of size {size}")]
    IndexOutOfRange {
        dimension: &'static str,
        index: usize,
        size: usize,
    },

    #[error("set universe {got} does not match context {dimension} count {expected}")]
    UniverseMismatch {
        dimension: &'static str,
        got: usize,
        expected: usize,
    },

    #[error("context is empty in the {0} dimension")]
    EmptyContext(&'static str),

    #[error("identifier {0:?} contains tab or newline")]
    InvalidIdentifier(String),

    #[error("duplicate {dimension} identifier {name:?}")]
    DuplicateIdentifier { dimension: &'static str, name: String },

    #[error("attribute set is not closed; next_closure requires a closed input")]
    NotClosed,

    #[error("concept index {0} does not belong to this lattice")]
    ForeignConcept(usize),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {message}")]
    Structural { path: PathBuf, message: String },

    #[error("polarity of an empty extent is undefined")]
    EmptyExtent,

    #[error("no lexicon word occurs in the WordNet context")]
    EmptyIntersection,

    #[error("lattice does not match the supplied sentiment context")]
    ContextMismatch,

    #[error("duplicate document id {0:?}")]
    DuplicateDocument(String),

    #[error("sample too small: {got} degrees >= xmin, at least {needed} required")]
    InsufficientSample { needed: usize, got: usize },

    #[error("partition violated: tagged {tagged} != specific {specific} + new {new} + ambiguous {ambiguous}")]
    PartitionViolation {
        tagged: u64,
        specific: u64,
        new: u64,
        ambiguous: u64,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub fn structural(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Structural {
            path: path.into(),
            message: message.into(),
        }
    }
}
