use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

/// A single violated parameter invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl Violation {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Every invariant violation found while validating a parameter bundle.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ValidationErrors(pub Vec<Violation>);

impl ValidationErrors {
    pub fn violations(&self) -> &[Violation] {
        &self.0
    }

    pub fn mentions(&self, field: &str) -> bool {
        self.0.iter().any(|v| v.field == field)
    }
}

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msgs: Vec<&str> = self.0.iter().map(|v| v.message.as_str()).collect();
        write!(f, "invalid parameters: {}", msgs.join("; "))
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Validation(#[from] ValidationErrors),

    #[error("invalid sampler argument: {0}")]
    Sampler(String),

    #[error("invalid time grid: {0}")]
    Grid(String),

    #[error("invalid exercise schedule: {0}")]
    Schedule(String),

    #[error("regression has no in-the-money paths")]
    EmptyRegression,

    #[error("experiment `{experiment}`: {message}")]
    Config { experiment: String, message: String },

    #[error("failed to parse config: {0}")]
    Parse(String),

    #[error("unknown table id `{id}`; valid ids: {valid}")]
    UnknownTable { id: String, valid: String },

    #[error("failed to write report: {0}")]
    Report(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
