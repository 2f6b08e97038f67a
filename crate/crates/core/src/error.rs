//! Error type shared by every module in the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Dimensions of an input do not match what the operation requires.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A matrix that must be symmetric is not, within tolerance.
    #[error("matrix is not symmetric: max |a[i,j] - a[j,i]| = {max_delta:e} exceeds {tol:e}")]
    NotSymmetric { max_delta: f64, tol: f64 },

    /// The Jacobi eigensolver exhausted its sweep budget.
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    EigenNoConvergence { sweeps: usize, off_norm: f64 },

    /// A probability vector failed validation.
    #[error("invalid probability weights: {0}")]
    InvalidWeights(String),

    /// A value that must be finite is NaN or infinite.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// An IDX payload did not match its declared format.
    #[error("idx format error: {0}")]
    IdxFormat(String),

    /// An IDX payload was shorter than its header declares.
    #[error("idx length error: expected {expected} bytes, got {actual}")]
    IdxLength { expected: usize, actual: usize },

    /// A caller-supplied argument violated a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Training produced a non-finite loss or parameter.
    #[error("divergence{} at epoch {epoch}, batch {batch}: {what}",
            run.map(|r| format!(" in run {r}")).unwrap_or_default())]
    Divergence {
        run: Option<u32>,
        epoch: usize,
        batch: usize,
        what: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
