//! Error type shared by every module.

use thiserror::Error;

/// Failures reported by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the admissible domain of an operation.
    #[error("validation error: {0}")]
    Validation(String),
    /// Parameters outside the window in which an estimate is claimed.
    #[error("parameter window violated: {0}")]
    Window(String),
    /// A computation produced non-finite values or failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// The solution reached the outer boundary of the computational domain.
    #[error("outer boundary reached at t = {time}")]
    BoundaryReached { time: f64 },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn window(msg: impl Into<String>) -> Self {
        Error::Window(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// True for errors caused by bad input rather than by the computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Validation(_) | Error::Window(_) | Error::Format(_)
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
