//! # qmetro-core
//!
//! Numerical machinery for multi-parameter quantum estimation with finite
//! projective measurements.
//!
//! The crate answers three questions about a parametrized pure state
//! `|psi(x)>` with parameters `x = (x_1, ..., x_n)`:
//!
//! 1. **How well can all parameters be estimated at once?** The quantum
//!    Fisher information matrix `F_Q` bounds each parameter separately, but
//!    incompatible optimal measurements force a tradeoff. The attainable
//!    limit is `Tr(F_Q^-1 F_C) <= n - 1/2 sum_q (1 - sqrt(1 - |lambda_q|^2))`
//!    where `lambda_q` are the eigenvalues of `F_Q^-1/2 F_Im F_Q^-1/2`
//!    ([`tradeoff`]).
//! 2. **Which measurement attains the limit?** A projective basis on the
//!    system (plus ancilla when needed) built from optimal commuting
//!    approximations of the symmetric logarithmic derivatives
//!    ([`measurement`]).
//! 3. **Does it work in practice?** A quantum-radar application estimating
//!    range and velocity from Gaussian single-photon and entangled bi-photon
//!    pulses, with a seeded Monte Carlo harness and Fisher-scoring maximum
//!    likelihood ([`radar`]).
//!
//! Supporting layers: dense complex linear algebra sized for small Hilbert
//! spaces ([`linalg`]), parametrized state families with derivative providers
//! ([`states`]), and Fisher information computation for pure and mixed states
//! ([`fisher`]).
//!
//! The crate is `no_std` (requires `alloc`); the default `std` feature only
//! switches the float backend from `libm` to the platform intrinsics.

#![no_std]
#![forbid(unsafe_code)]
#![warn(missing_debug_implementations)]

extern crate alloc;

#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod error;
pub mod fisher;
pub mod linalg;
pub mod measurement;
pub mod radar;
pub mod rng;
pub mod states;
pub mod tol;
pub mod tradeoff;

pub use error::{Error, Result};
pub use linalg::{BlockForm, CMatrix, CVector, RMatrix};
