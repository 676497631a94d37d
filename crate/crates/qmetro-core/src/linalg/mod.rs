//! Dense complex linear algebra sized for small Hilbert spaces.
//!
//! Everything here operates on heap-allocated row-major storage and is tuned
//! for dimensions in the tens, which is all the estimation machinery needs:
//! Gram-Schmidt orthonormalization with drop reporting, deterministic basis
//! completion, Jacobi eigendecomposition, canonical block-diagonalization of
//! skew-symmetric matrices, and the dense-first-column orthogonal matrix used
//! to realize measurement bases.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
#[allow(unused_imports)] // f64 float methods come from the trait in no_std builds
use num_traits::Float as _;

use crate::error::{Error, Result};
use crate::tol;

mod eigen;
mod skew;

pub use eigen::{hermitian_eigen, symmetric_eigen};
pub use skew::{skew_block_diagonalize, BlockForm};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Column vector of complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct CVector {
    entries: Vec<C64>,
}

impl CVector {
    pub fn from_entries(entries: Vec<C64>) -> Self {
        CVector { entries }
    }

    pub fn zeros(dim: usize) -> Self {
        CVector {
            entries: vec![ZERO; dim],
        }
    }

    /// `k`-th standard basis vector.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v.entries[k] = ONE;
        v
    }

    /// Real entries promoted to complex.
    pub fn from_real(entries: &[f64]) -> Self {
        CVector {
            entries: entries.iter().map(|&re| C64::new(re, 0.0)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    /// Inner product `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &CVector) -> C64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .fold(ZERO, |acc, z| acc + z)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, factor: C64) -> CVector {
        CVector {
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &CVector) -> CVector {
        debug_assert_eq!(self.dim(), other.dim());
        CVector {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &CVector) -> CVector {
        debug_assert_eq!(self.dim(), other.dim());
        CVector {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// `self += factor * other` in place.
    pub fn axpy(&mut self, factor: C64, other: &CVector) {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += factor * b;
        }
    }

    pub fn normalized(&self) -> Option<CVector> {
        let n = self.norm();
        if n <= 0.0 || !n.is_finite() {
            return None;
        }
        Some(self.scale(C64::new(1.0 / n, 0.0)))
    }

    /// Tensor product `self (x) other`.
    pub fn kron(&self, other: &CVector) -> CVector {
        let mut entries = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.entries {
            for b in &other.entries {
                entries.push(a * b);
            }
        }
        CVector { entries }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Index<usize> for CVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.entries[i]
    }
}

impl IndexMut<usize> for CVector {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.entries[i]
    }
}

/// Row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_rows(rows: &[CVector]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, CVector::dim);
        let mut m = CMatrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            for j in 0..c {
                m[(i, j)] = row[j];
            }
        }
        m
    }

    pub fn from_columns(cols: &[CVector]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, CVector::dim);
        let mut m = CMatrix::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for i in 0..r {
                m[(i, j)] = col[i];
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> CVector {
        CVector::from_entries(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn column(&self, j: usize) -> CVector {
        CVector::from_entries((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        debug_assert_eq!(self.cols, other.rows);
        let mut m = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    m[(i, j)] += a * other[(k, j)];
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &CVector) -> CVector {
        debug_assert_eq!(self.cols, v.dim());
        let mut out = CVector::zeros(self.rows);
        for i in 0..self.rows {
            let mut acc = ZERO;
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn scale(&self, factor: C64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .fold(ZERO, |acc, z| acc + z)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `max |M^dag M - I|`; zero for a unitary matrix.
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint().mul(self).max_abs_diff(&CMatrix::identity(self.cols))
    }

    pub fn real_part(&self) -> RMatrix {
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.re).collect(),
        }
    }

    pub fn imag_part(&self) -> RMatrix {
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.im).collect(),
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Row-major real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows_slice(rows: usize, cols: usize, data: &[f64]) -> Self {
        assert_eq!(rows * cols, data.len());
        RMatrix {
            rows,
            cols,
            data: data.to_vec(),
        }
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = RMatrix::zeros(n, n);
        for (i, &x) in entries.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn transpose(&self) -> RMatrix {
        let mut m = RMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn mul(&self, other: &RMatrix) -> RMatrix {
        debug_assert_eq!(self.cols, other.rows);
        let mut m = RMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    m[(i, j)] += a * other[(k, j)];
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn add(&self, other: &RMatrix) -> RMatrix {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &RMatrix) -> RMatrix {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, factor: f64) -> RMatrix {
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &RMatrix) -> f64 {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Frobenius norm squared.
    pub fn frobenius_sqr(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn antisymmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] + self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn to_complex(&self) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&re| C64::new(re, 0.0)).collect(),
        }
    }

    /// `max |M^T M - I|`; zero for an orthogonal matrix.
    pub fn orthogonality_defect(&self) -> f64 {
        self.transpose()
            .mul(self)
            .max_abs_diff(&RMatrix::identity(self.cols))
    }
}

impl Index<(usize, usize)> for RMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Result of a Gram-Schmidt pass: the orthonormal vectors that survived and
/// the input indices that were dropped as linearly dependent.
#[derive(Debug, Clone)]
pub struct GramSchmidt {
    pub vectors: Vec<CVector>,
    pub dropped: Vec<usize>,
}

/// Orthonormalize `vectors` in order, dropping inputs whose residual after
/// projection falls below `tol` relative to the largest input norm.
///
/// Projection is applied twice per vector, which keeps the output orthonormal
/// to machine precision even for nearly dependent inputs.
pub fn gram_schmidt(vectors: &[CVector], tol: f64) -> Result<GramSchmidt> {
    if tol <= 0.0 {
        return Err(Error::InvalidArgument(alloc::format!(
            "gram_schmidt tolerance must be positive, got {tol}"
        )));
    }
    let dim = match vectors.first() {
        Some(v) => v.dim(),
        None => {
            return Ok(GramSchmidt {
                vectors: Vec::new(),
                dropped: Vec::new(),
            })
        }
    };
    for v in vectors {
        if v.dim() != dim {
            return Err(Error::DimensionMismatch(dim, v.dim()));
        }
    }
    let max_norm = vectors.iter().map(CVector::norm).fold(0.0, f64::max);
    let drop_at = tol * max_norm.max(f64::MIN_POSITIVE);

    let mut kept: Vec<CVector> = Vec::with_capacity(vectors.len());
    let mut dropped = Vec::new();
    for (idx, v) in vectors.iter().enumerate() {
        let mut w = v.clone();
        for _ in 0..2 {
            for k in &kept {
                let overlap = k.inner(&w);
                w.axpy(-overlap, k);
            }
        }
        match w.normalized() {
            Some(unit) if w.norm() >= drop_at => kept.push(unit),
            _ => dropped.push(idx),
        }
    }
    Ok(GramSchmidt {
        vectors: kept,
        dropped,
    })
}

/// Extend an orthonormal set to a full orthonormal basis of dimension `dim`.
///
/// The first `orthonormal.len()` output vectors equal the input. Completion
/// is deterministic: at each step the standard basis vector with the largest
/// residual outside the current span is orthonormalized and appended (ties
/// resolved by lowest index).
pub fn complete_basis(orthonormal: &[CVector], dim: usize) -> Result<Vec<CVector>> {
    if orthonormal.len() > dim {
        return Err(Error::DimensionMismatch(orthonormal.len(), dim));
    }
    let mut worst = 0.0f64;
    for (i, a) in orthonormal.iter().enumerate() {
        if a.dim() != dim {
            return Err(Error::DimensionMismatch(a.dim(), dim));
        }
        for (j, b) in orthonormal.iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((a.inner(b).norm() - expected).abs());
        }
    }
    if worst > tol::ORTHONORMAL {
        return Err(Error::NotOrthonormal(worst));
    }

    let mut basis = orthonormal.to_vec();
    while basis.len() < dim {
        let mut best: Option<(f64, usize)> = None;
        for k in 0..dim {
            let mut w = CVector::basis(dim, k);
            for b in &basis {
                let overlap = b.inner(&w);
                w.axpy(-overlap, b);
            }
            let r = w.norm();
            if best.is_none_or(|(br, _)| r > br + 1e-15) {
                best = Some((r, k));
            }
        }
        let (_, k) = best.expect("dim > 0");
        let mut w = CVector::basis(dim, k);
        for _ in 0..2 {
            for b in &basis {
                let overlap = b.inner(&w);
                w.axpy(-overlap, b);
            }
        }
        let unit = w
            .normalized()
            .ok_or_else(|| Error::NumericalInconsistency("basis completion stalled".into()))?;
        basis.push(unit);
    }
    Ok(basis)
}

/// Real orthogonal matrix whose first column has no small entries.
///
/// Householder reflection mapping the first standard basis vector onto the
/// all-ones unit vector: symmetric, orthogonal, and its first column is
/// `(1/sqrt(d), ..., 1/sqrt(d))`, so every entry has magnitude
/// `1/sqrt(d) >= 1/(2 sqrt(d))`.
pub fn dense_first_column_orthogonal(dim: usize) -> RMatrix {
    assert!(dim >= 1, "dimension must be at least 1");
    if dim == 1 {
        return RMatrix::identity(1);
    }
    let inv_sqrt = 1.0 / (dim as f64).sqrt();
    // v = e_0 - u with u the all-ones unit vector; H = I - 2 v v^T / (v^T v).
    let mut v = vec![-inv_sqrt; dim];
    v[0] = 1.0 - inv_sqrt;
    let vtv: f64 = v.iter().map(|x| x * x).sum();
    let mut h = RMatrix::identity(dim);
    for i in 0..dim {
        for j in 0..dim {
            h[(i, j)] -= 2.0 * v[i] * v[j] / vtv;
        }
    }
    h
}
