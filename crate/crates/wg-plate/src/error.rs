//! Error type shared by all solver stages.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported quadrature degree {requested} (max {max})")]
    UnsupportedDegree { requested: usize, max: usize },

    #[error("ill-conditioned {what} on cell {cell} (condition estimate {estimate:.3e})")]
    Conditioning {
        what: &'static str,
        cell: usize,
        estimate: f64,
    },

    #[error("solver failure: {0}")]
    SolverFailure(String),

    #[error("reduced system is not positive definite: {0}")]
    NotSpd(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
