//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, ScaError>;

#[derive(Debug, Error)]
pub enum ScaError {
    /// Non-finite entries, dimension mismatches, or asymmetry beyond tolerance.
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    /// A matrix required to be positive semidefinite has a significantly
    /// negative eigenvalue.
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    /// The joint block matrix [[B, A], [A', C]] fails the PSD test, so the
    /// triple cannot be a covariance and CCA values would be meaningless.
    #[error("triple is not a covariance: joint PSD margin {margin:.3e}")]
    NotACovariance { margin: f64 },

    #[error("invalid population: {0}")]
    InvalidPopulation(String),

    #[error("parse error: {0}")]
    ParseError(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("enumeration too large: {required} support pairs exceed cap {cap}")]
    EnumerationTooLarge { required: u128, cap: u128 },

    #[error("sparsify failed: {0}")]
    SparsifyFailed(String),

    #[error("cut generation failed: {0}")]
    CutGenerationFailed(String),

    /// The range condition behind the closed-form subset quadratic value does
    /// not hold, so the formula would not equal the true subproblem optimum.
    #[error("inconsistent subproblem: range-condition residual {residual:.3e}")]
    InconsistentSubproblem { residual: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
