//! Attainable-precision tradeoff bounds and comparison bounds.
//!
//! The central quantity is `Tr(F_Q^-1 F_C)`, invariant under
//! reparametrization and at most `n`. Incompatibility between the optimal
//! measurements of different parameters lowers the attainable value to
//!
//! ```text
//! Tr(F_Q^-1 F_C) <= n - 1/2 sum_q (1 - sqrt(1 - |lambda_q|^2))
//! ```
//!
//! with `lambda_q` the (purely imaginary) eigenvalues of
//! `F_Q^-1/2 F_Im F_Q^-1/2`. This module evaluates that bound together with
//! the Gill-Massar, Matsumoto, and norm-based comparison bounds, and packs
//! everything into a serializable report.

use alloc::vec::Vec;

use num_complex::Complex64 as C64;
#[allow(unused_imports)] // f64 float methods come from the trait in no_std builds
use num_traits::Float as _;

use crate::error::{Error, Result};
use crate::fisher::{inverse_sqrt, symmetric_inverse, FisherBundle};
use crate::linalg::{hermitian_eigen, CMatrix, RMatrix};
use crate::tol;

/// Bound values and saturation data for one estimation problem.
#[derive(Debug, Clone)]
pub struct TradeoffReport {
    /// Number of parameters.
    pub n: usize,
    /// Hilbert-space dimension of the system (drives Gill-Massar).
    pub dim: usize,
    /// `|lambda_q|` magnitudes with multiplicity, descending.
    pub lambdas: Vec<f64>,
    /// The attainable tradeoff bound on `Tr(F_Q^-1 F_C)`.
    pub tight_bound: f64,
    /// Gill-Massar bound `d - 1`.
    pub gill_massar: f64,
    /// Lower bound on `Tr(F_Q F_C^-1)`.
    pub matsumoto_lower: f64,
    /// Norm comparison bound with coefficient 1/4.
    pub chen_quarter: f64,
    /// Norm comparison bound with coefficient 1/5.
    pub chen_fifth: f64,
    /// `Tr(F_Q^-1 F_C)` of a supplied measurement.
    pub achieved: Option<f64>,
    /// `tight_bound - achieved`.
    pub gap: Option<f64>,
    /// `Tr(F_Q F_C^-1)` of the supplied measurement, when `F_C` is regular.
    pub trace_fq_fc_inv: Option<f64>,
    /// False for mixed states, where the bound holds but need not be
    /// attainable by measurements on the system alone.
    pub guaranteed_tight: bool,
}

/// `|lambda_q|` of `F_Q^-1/2 F_Im F_Q^-1/2`, descending, with magnitudes
/// snapped to 1 within [`tol::LAMBDA_SNAP`].
pub fn lambda_magnitudes(f_q: &RMatrix, f_im: &RMatrix) -> Result<Vec<f64>> {
    let n = f_q.rows();
    if f_im.rows() != n || f_im.cols() != n {
        return Err(Error::DimensionMismatch(n, f_im.rows()));
    }
    let s = inverse_sqrt(f_q)?;
    let normalized = s.mul(f_im).mul(&s);
    // Eigenvalues of the Hermitian lift i*M are the +-|lambda| pairs.
    let mut h = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] = C64::new(0.0, normalized[(i, j)]);
        }
    }
    let (values, _) = hermitian_eigen(&h)?;
    let mut magnitudes: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    for m in &mut magnitudes {
        *m = snap_lambda(*m)?;
    }
    magnitudes.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    Ok(magnitudes)
}

/// Snap a magnitude to exactly 1 within the branch tolerance; reject values
/// beyond it.
pub fn snap_lambda(magnitude: f64) -> Result<f64> {
    if magnitude > 1.0 + tol::LAMBDA_SNAP {
        return Err(Error::EigenvalueOutOfRange(magnitude));
    }
    if magnitude > 1.0 - tol::LAMBDA_SNAP {
        return Ok(1.0);
    }
    Ok(magnitude)
}

/// The attainable bound `n - 1/2 sum_q (1 - sqrt(1 - |lambda_q|^2))`.
pub fn tight_bound(f_q: &RMatrix, f_im: &RMatrix) -> Result<f64> {
    Ok(tight_bound_from_lambdas(&lambda_magnitudes(f_q, f_im)?))
}

pub fn tight_bound_from_lambdas(lambdas: &[f64]) -> f64 {
    let n = lambdas.len() as f64;
    let deficit: f64 = lambdas
        .iter()
        .map(|&l| 1.0 - (1.0 - l * l).max(0.0).sqrt())
        .sum();
    n - 0.5 * deficit
}

/// Gill-Massar bound `d - 1` for a `d`-dimensional system, `d >= 2`.
pub fn gill_massar_bound(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidArgument(alloc::format!(
            "Gill-Massar bound needs dimension >= 2, got {d}"
        )));
    }
    Ok((d - 1) as f64)
}

/// Lower bound `sum_q 2 / (1 + sqrt(1 - |lambda_q|^2))` on `Tr(F_Q F_C^-1)`.
pub fn matsumoto_lower(lambdas: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for &l in lambdas {
        let l = snap_lambda(l)?;
        total += 2.0 / (1.0 + (1.0 - l * l).max(0.0).sqrt());
    }
    Ok(total)
}

/// Norm comparison bound `n - c * sum_{jk} |(F_Q^-1/2 F_Im F_Q^-1/2)_{jk}|^2`
/// with `c` either 1/4 (tightened) or 1/5.
pub fn chen_bound(f_q: &RMatrix, f_im: &RMatrix, coefficient: f64) -> Result<f64> {
    if (coefficient - 0.25).abs() > 1e-12 && (coefficient - 0.2).abs() > 1e-12 {
        return Err(Error::InvalidArgument(alloc::format!(
            "coefficient must be 1/4 or 1/5, got {coefficient}"
        )));
    }
    let s = inverse_sqrt(f_q)?;
    let normalized = s.mul(f_im).mul(&s);
    Ok(f_q.rows() as f64 - coefficient * normalized.frobenius_sqr())
}

/// `Tr(F_Q^-1 F_C)`.
pub fn trace_metric(f_q: &RMatrix, f_c: &RMatrix) -> Result<f64> {
    Ok(symmetric_inverse(f_q)?.mul(f_c).trace())
}

/// Full report for a bundle, optionally scoring a measured `F_C` against
/// the bound.
pub fn report(
    bundle: &FisherBundle,
    dim: usize,
    cfim: Option<&RMatrix>,
    guaranteed_tight: bool,
) -> Result<TradeoffReport> {
    let lambdas = lambda_magnitudes(&bundle.f_q, &bundle.f_im)?;
    let bound = tight_bound_from_lambdas(&lambdas);
    let achieved = match cfim {
        Some(fc) => Some(trace_metric(&bundle.f_q, fc)?),
        None => None,
    };
    let trace_fq_fc_inv = match cfim {
        Some(fc) => symmetric_inverse(fc)
            .ok()
            .map(|inv| bundle.f_q.mul(&inv).trace()),
        None => None,
    };
    Ok(TradeoffReport {
        n: bundle.num_params(),
        dim,
        tight_bound: bound,
        gill_massar: gill_massar_bound(dim.max(2))?,
        matsumoto_lower: matsumoto_lower(&lambdas)?,
        chen_quarter: chen_bound(&bundle.f_q, &bundle.f_im, 0.25)?,
        chen_fifth: chen_bound(&bundle.f_q, &bundle.f_im, 0.2)?,
        achieved,
        gap: achieved.map(|a| bound - a),
        trace_fq_fc_inv,
        lambdas,
        guaranteed_tight,
    })
}
