use thiserror::Error;

/// Errors produced by the backflow library.
#[derive(Debug, Error)]
pub enum BackflowError {
    /// Model parameters violate an invariant (tau > 0, hbar > 0, N >= 3, ...).
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// An operation that needs a ring was given an infinite chain, or vice versa.
    #[error("boundary mismatch: {0}")]
    BoundaryMismatch(String),

    /// Two-state operations require two distinct modes.
    #[error("same mode: m1 = m2 = {0}")]
    SameMode(i64),

    /// The positive-momentum window holds a single state; no superposition,
    /// hence no backflow bound.
    #[error("window too small: eta1 = eta2 = {0}")]
    WindowTooSmall(i64),

    /// A state failed its unit-norm check.
    #[error("norm violation: |sum - 1| = {0:.3e}")]
    NormViolation(f64),

    /// Matrix handed to the symmetric eigensolver is not symmetric.
    #[error("matrix not symmetric: max |A - A^T| = {0:.3e}")]
    NotSymmetric(f64),

    /// Eigensolver failed to meet its residual contract.
    #[error("eigensolver convergence failure: {0}")]
    ConvergenceFailure(String),

    /// The best point of a scan sits on the range edge; the range must be widened.
    #[error("no interior maximum in [{lo}, {hi}]; best point at {best}")]
    NoInteriorMax { lo: f64, hi: f64, best: f64 },

    /// Power-law fits need strictly positive data.
    #[error("non-positive data: {0}")]
    NonPositiveData(String),
}

pub type Result<T> = std::result::Result<T, BackflowError>;
