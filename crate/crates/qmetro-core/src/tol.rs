//! Numerical tolerances used across the crate.
//!
//! All thresholds are collected here so that every check names its budget
//! instead of using ad-hoc constants.

/// Orthonormality of basis vectors and unitarity of matrices.
pub const ORTHONORMAL: f64 = 1e-10;

/// Residual of a skew-symmetric matrix against its canonical block layout.
pub const CANONICAL_RESIDUAL: f64 = 1e-9;

/// Gram-Schmidt drop threshold, relative to the largest input norm.
pub const GS_DROP: f64 = 1e-12;

/// Unit-norm validation for state vectors.
pub const STATE_NORM: f64 = 1e-10;

/// `Re <psi|d_j psi>` must vanish for a norm-preserving family.
pub const NORM_PRESERVATION: f64 = 1e-8;

/// Eigenvalue floor below which a Fisher matrix counts as singular.
pub const FISHER_EIGEN_FLOOR: f64 = 1e-12;

/// Outcome probabilities below this are treated as exactly zero.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

/// A probability derivative larger than this over a zero-probability outcome
/// is a genuine 0/0 limit and is surfaced as an error.
pub const DERIVATIVE_FLOOR: f64 = 1e-9;

/// `|lambda|` within this of 1 snaps to exactly 1; beyond `1 +` this is an
/// inconsistency. Keeps the bound and the degenerate-block construction on
/// the same branch.
pub const LAMBDA_SNAP: f64 = 1e-9;

/// Default tolerance on the saturation gap of a constructed measurement.
pub const SATURATION_GAP: f64 = 1e-8;

/// Default finite-difference step.
pub const FD_STEP: f64 = 1e-6;
