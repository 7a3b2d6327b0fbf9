//! Error type shared across the crate.
//!
//! Two broad failure classes exist: malformed input or violated call
//! contracts (exit code 1 at the CLI boundary) and I/O failures
//! (exit code 2). Everything else in the library is defined to be total
//! once its inputs satisfy the documented invariants.

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A dataset file contained no data lines.
    #[error("{name}: empty dataset (no data lines)")]
    EmptyInput { name: String },

    /// A data line had a different field count than the first line.
    #[error("{name}: line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        name: String,
        line: usize,
        expected: usize,
        found: usize,
    },

    /// A field could not be parsed as a number.
    #[error("{name}: line {line}, field {column}: cannot parse {text:?} as a number")]
    BadField {
        name: String,
        line: usize,
        column: usize,
        text: String,
    },

    /// A caller violated a documented precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Reading or writing a file failed.
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A result file could not be parsed as JSON.
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI: 2 for I/O failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
