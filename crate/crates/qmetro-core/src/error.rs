use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

/// Errors for state validation, linear algebra, and measurement construction.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not antisymmetric (max |m + m^T| = {0:.3e})")]
    NotAntisymmetric(f64),

    #[error("vectors are not orthonormal (max deviation {0:.3e})")]
    NotOrthonormal(f64),

    #[error("state is not normalized (|norm - 1| = {0:.3e})")]
    NotNormalized(f64),

    #[error("density matrix invalid: {0}")]
    InvalidDensityMatrix(String),

    #[error("Fisher information matrix is singular (smallest eigenvalue {eigenvalue:.3e})")]
    SingularFisherMatrix {
        eigenvalue: f64,
        /// Unit vector along which no information is available.
        null_direction: Vec<f64>,
    },

    #[error("eigenvalue magnitude {0} exceeds 1 beyond tolerance")]
    EigenvalueOutOfRange(f64),

    #[error("outcome {outcome} has vanishing probability {probability:.3e} but derivative {derivative:.3e}; perturb the parameters or supply a limit rule")]
    SingularOutcome {
        outcome: usize,
        probability: f64,
        derivative: f64,
    },

    #[error("ancilla of dimension {available} cannot host {needed} orthogonal directions; request a larger ancilla")]
    AncillaTooSmall { needed: usize, available: usize },

    #[error("constructed measurement misses the bound by {gap:.3e}{}", block.map(|b| alloc::format!(" (block {b})")).unwrap_or_default())]
    SaturationGap { gap: f64, block: Option<usize> },

    #[error("iteration failed to converge after {0} steps")]
    NoConvergence(usize),

    #[error("numerical inconsistency: {0}")]
    NumericalInconsistency(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, Error>;
