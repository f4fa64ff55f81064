//! Crate-wide error type.
//!
//! Every fallible operation reports one of these variants; the CLI maps the
//! variant to a stable one-word category for exit messages.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error in {file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },
    #[error("consistency error: {0}")]
    Consistency(String),
    #[error("structure error: {0}")]
    Structure(String),
    #[error("connectivity error: {0}")]
    Connectivity(String),
    #[error("lookup error: {0}")]
    Lookup(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("value error: {0}")]
    Value(String),
    #[error("capacity error: requested {requested} but only {available} qualify")]
    Capacity { requested: usize, available: usize },
    #[error("size error: {0}")]
    Size(String),
    #[error("divergence error: {0}")]
    Divergence(String),
    #[error("eligibility error: {0}")]
    Eligibility(String),
    #[error("coverage error: {0}")]
    Coverage(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl Error {
    /// Stable category keyword, one per variant.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Consistency(_) => "consistency",
            Error::Structure(_) => "structure",
            Error::Connectivity(_) => "connectivity",
            Error::Lookup(_) => "lookup",
            Error::Shape(_) => "shape",
            Error::Value(_) => "value",
            Error::Capacity { .. } => "capacity",
            Error::Size(_) => "size",
            Error::Divergence(_) => "divergence",
            Error::Eligibility(_) => "eligibility",
            Error::Coverage(_) => "coverage",
            Error::Io { .. } => "io",
        }
    }

    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Prefixes the message of string-bodied variants, keeping the category.
    pub fn with_context(self, ctx: &str) -> Self {
        match self {
            Error::Consistency(m) => Error::Consistency(format!("{ctx}: {m}")),
            Error::Structure(m) => Error::Structure(format!("{ctx}: {m}")),
            Error::Connectivity(m) => Error::Connectivity(format!("{ctx}: {m}")),
            Error::Lookup(m) => Error::Lookup(format!("{ctx}: {m}")),
            Error::Shape(m) => Error::Shape(format!("{ctx}: {m}")),
            Error::Value(m) => Error::Value(format!("{ctx}: {m}")),
            Error::Size(m) => Error::Size(format!("{ctx}: {m}")),
            Error::Divergence(m) => Error::Divergence(format!("{ctx}: {m}")),
            Error::Eligibility(m) => Error::Eligibility(format!("{ctx}: {m}")),
            Error::Coverage(m) => Error::Coverage(format!("{ctx}: {m}")),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
