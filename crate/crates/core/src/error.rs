use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("overflow evaluating {what}; use the logarithmic form ({hint})")]
    Overflow { what: String, hint: String },

    #[error(
        "quadrature failed to converge: estimate {estimate:e}, error {error:e}, tolerance {tol:e}"
    )]
    Quadrature { estimate: f64, error: f64, tol: f64 },

    #[error("kernel table rejected: {0}")]
    TableRejected(String),

    #[error("grid/kernel mismatch: {0}")]
    Mismatch(String),

    #[error("maximization failed on bracket [{lo}, {hi}]: {reason}")]
    Maximization { lo: f64, hi: f64, reason: String },

    #[error("reduced kernel quadrature failed at (r1, r2) = ({r1}, {r2}): {reason}")]
    ReducedKernel { r1: f64, r2: f64, reason: String },

    #[error("threshold not met: sup J(ζu₀) = {sup_value} ≥ (1/N)·S^(N/2) = {threshold}")]
    Threshold { sup_value: f64, threshold: f64 },

    #[error("linear solve failed: {0}")]
    Singular(String),

    #[error("i/o error on {path}: {reason}")]
    Io { path: String, reason: String },

    #[error("malformed {what}: {reason}")]
    Format { what: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
