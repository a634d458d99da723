use std::path::PathBuf;

use thiserror::Error;

use crate::params::ValidationReport;
use crate::query::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters:\n{0}")]
    Validation(ValidationReport),

    #[error("{0}")]
    Range(String),

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    /// The requested generation would exceed the configured row budget.
    #[error("refusing to generate {table}: expected {expected_rows:.0} rows exceeds the limit of {max_rows}")]
    Guard {
        table: String,
        expected_rows: f64,
        max_rows: u64,
    },

    #[error("generation order error: {0}")]
    GenerationOrder(String),

    #[error("structural error: {0}")]
    Structural(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("executor binding error: {0}")]
    Binding(String),

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

    /// Process exit code for the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 2,
            Error::Guard { .. } => 3,
            _ => 1,
        }
    }
}
