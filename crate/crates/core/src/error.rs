use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// `y = 0` maps to `x = -inf` and `y = pi` to `x = +inf`.
    #[error("computational coordinate y = {y} is a domain endpoint (maps to {infinity}infinity)")]
    DomainEndpoint { y: f64, infinity: char },

    #[error("function evaluated to {value} at node y = {node}")]
    Evaluation { node: f64, value: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("numerically singular system (condition estimate {condition_estimate:.3e})")]
    Singular { condition_estimate: f64 },

    #[error("nothing to report: record list is empty")]
    EmptyReport,

    #[error("cannot write report to {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("report serialization failed: {0}")]
    Serialize(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
