//! Error type shared across the crate.
//!
//! Errors are grouped by how the CLI reports them: input/format problems
//! (exit 2), domain problems such as out-of-vocabulary words or empty pools
//! (exit 3), and numerical failures (exit 4).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("format error in {path}: {message}")]
    Format { path: String, message: String },

    #[error("basis manifest hash mismatch: file references {expected}, manifest is {actual}")]
    ManifestMismatch { expected: String, actual: String },

    #[error("word not in vocabulary: {0}")]
    OutOfVocabulary(String),

    #[error("{0}")]
    Domain(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// Exit code the CLI uses for this error: 2 input/config, 3 domain, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. }
            | Error::Parse { .. }
            | Error::Config(_)
            | Error::Format { .. }
            | Error::ManifestMismatch { .. } => 2,
            Error::OutOfVocabulary(_) | Error::Domain(_) => 3,
            Error::Numerical(_) => 4,
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub(crate) fn parse(path: &std::path::Path, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.display().to_string(),
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
