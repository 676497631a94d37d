//! Jacobi eigendecomposition for Hermitian (and real symmetric) matrices.
//!
//! Cyclic sweeps with complex plane rotations. Quadratic convergence sets in
//! after a few sweeps; for the matrix sizes in this crate the full spectrum
//! is obtained to near machine precision.

use alloc::vec::Vec;

#[allow(unused_imports)] // f64 float methods come from the trait in no_std builds
use num_traits::Float as _;

use super::{CMatrix, RMatrix, C64};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition `A = V diag(values) V^dag` of a Hermitian matrix.
///
/// Eigenvalues ascend; `vectors` holds the corresponding eigenvectors as
/// columns.
pub fn hermitian_eigen(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    if !a.is_square() {
        return Err(Error::NotSquare(a.rows(), a.cols()));
    }
    let n = a.rows();
    let scale = a.max_abs().max(1.0);
    let defect = a.hermiticity_defect();
    if defect > 1e-8 * scale {
        return Err(Error::NotHermitian(defect));
    }

    let mut m = a.clone();
    // Symmetrize so roundoff in the input cannot bias the iteration.
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in i + 1..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * C64::new(0.5, 0.0);
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
    let mut v = CMatrix::identity(n);
    let stop = 1e-15 * scale;

    for _sweep in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(m[(p, q)].norm());
            }
        }
        if off <= stop {
            let mut values: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
            sort_ascending(&mut values, &mut v);
            return Ok((values, v));
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    Err(Error::NoConvergence(MAX_SWEEPS))
}

fn rotate(m: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let mag = apq.norm();
    if mag < f64::MIN_POSITIVE {
        m[(p, q)] = super::ZERO;
        m[(q, p)] = super::ZERO;
        return;
    }
    let n = m.rows();
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let u = apq / C64::new(mag, 0.0);
    let tau = (aqq - app) / (2.0 * mag);
    // Smaller-magnitude root of t^2 - 2 tau t - 1 = 0 zeroes the entry.
    let t = if tau >= 0.0 {
        -1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let cs = C64::new(c, 0.0);
    let su = u * s;
    let su_conj = u.conj() * s;

    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = cs * mkp + su_conj * mkq;
        m[(k, q)] = cs * mkq - su * mkp;
    }
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = cs * mpk + su * mqk;
        m[(q, k)] = cs * mqk - su_conj * mpk;
    }
    m[(p, q)] = super::ZERO;
    m[(q, p)] = super::ZERO;
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = C64::new(m[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = cs * vkp + su_conj * vkq;
        v[(k, q)] = cs * vkq - su * vkp;
    }
}

fn sort_ascending(values: &mut [f64], v: &mut CMatrix) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).expect("finite eigenvalues"));
    let old_values: Vec<f64> = values.to_vec();
    let old_v = v.clone();
    for (new_col, &old_col) in order.iter().enumerate() {
        values[new_col] = old_values[old_col];
        for row in 0..n {
            v[(row, new_col)] = old_v[(row, old_col)];
        }
    }
}

/// Eigendecomposition of a real symmetric matrix; `vectors` columns are real.
pub fn symmetric_eigen(a: &RMatrix) -> Result<(Vec<f64>, RMatrix)> {
    let (values, v) = hermitian_eigen(&a.to_complex())?;
    // Real input and real rotations keep the iteration real throughout.
    Ok((values, v.real_part()))
}
