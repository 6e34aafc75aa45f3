use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong between reading bytes and emitting a result.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{source_name}: XML error at line {line}, column {column}: {message}")]
    Xml {
        source_name: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{source_name}: schema error: {message}")]
    Schema {
        source_name: String,
        message: String,
    },

    #[error("{source_name}: word {word:?} at (top={top}, left={left}) lies outside page {page} ({width}x{height})")]
    OutOfBounds {
        source_name: String,
        word: String,
        top: u32,
        left: u32,
        page: u32,
        width: u32,
        height: u32,
    },

    #[error("{source_name}: record {record}: {message}")]
    Csv {
        source_name: String,
        record: u64,
        message: String,
    },

    #[error("{source_name}: duplicate keyword {keyword:?} (record {record})")]
    DuplicateKeyword {
        source_name: String,
        keyword: String,
        record: u64,
    },

    #[error("keyword {keyword:?} of class {class_id:?} not found in its training sample")]
    KeywordNotFound { class_id: String, keyword: String },

    #[error("registry line {line}: {message}")]
    Registry { line: usize, message: String },

    #[error("corpus generation failed: {0}")]
    Generation(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn input(message: impl Into<String>) -> Self {
        Error::Input(message.into())
    }

    pub(crate) fn schema(source_name: &str, message: impl Into<String>) -> Self {
        Error::Schema {
            source_name: source_name.to_owned(),
            message: message.into(),
        }
    }
}
