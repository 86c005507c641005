use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("length mismatch: {left} arrivals vs {right} service times")]
    LengthMismatch { left: usize, right: usize },

    #[error("service time at index {index} is not strictly positive ({value})")]
    NonPositiveService { index: usize, value: f64 },

    #[error("corrupted event stream: state went negative at event {index}")]
    NegativeState { index: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("degenerate regression: X values have zero variance")]
    DegenerateRegression,

    #[error("not enough reports to compare: {0} (need at least 2)")]
    TooFewReports(usize),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    /// Whether the error was raised while validating input, before any simulation work.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Domain(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
