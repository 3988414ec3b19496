use thiserror::Error;

/// Errors produced by the computational routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("computation failed: {0}")]
    ComputationFailed(String),

    /// Adaptive quadrature ran out of cells before reaching the requested
    /// tolerance. Carries the best value seen so far.
    #[error(
        "quadrature did not reach tolerance {tol:e} within {cells} cells \
         (best value {value}, error estimate {error_estimate:e})"
    )]
    QuadratureBudget {
        value: f64,
        error_estimate: f64,
        cells: usize,
        tol: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
