//! Fisher information: SLD-applied vectors, the bundle `F = F_Q + i F_Im`,
//! and classical Fisher information of projective measurements.
//!
//! For a pure state the symmetric logarithmic derivative acts as
//! `L_j |psi> = 2 |d_j psi> + 2 <d_j psi|psi> |psi>`, so on the extended
//! space the working objects are the vectors `|l_j> = (L_j (x) I)|psi>|xi>`.
//! Their Gram matrix `F_jk = <l_j|l_k>` splits into the quantum Fisher
//! information matrix `F_Q = Re F` and the antisymmetric `F_Im = Im F` that
//! drives the measurement-incompatibility tradeoff.

use alloc::vec::Vec;

use num_complex::Complex64 as C64;
#[allow(unused_imports)] // f64 float methods come from the trait in no_std builds
use num_traits::Float as _;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, symmetric_eigen, CMatrix, CVector, RMatrix};
use crate::states::{project_derivative, MixedState, PureState};
use crate::tol;

/// SLD-applied vectors and their Gram matrix.
#[derive(Debug, Clone)]
pub struct FisherBundle {
    /// `|l_j>` on the extended space; empty for mixed-state bundles.
    pub l_vectors: Vec<CVector>,
    /// `F_jk = <l_j|l_k>` (Hermitian).
    pub f: CMatrix,
    /// Quantum Fisher information matrix, `Re F` (symmetric PSD).
    pub f_q: RMatrix,
    /// `Im F` (antisymmetric).
    pub f_im: RMatrix,
}

impl FisherBundle {
    pub fn num_params(&self) -> usize {
        self.f.rows()
    }

    /// Extended-space dimension of the stored vectors (0 when absent).
    pub fn vector_dim(&self) -> usize {
        self.l_vectors.first().map_or(0, CVector::dim)
    }
}

/// `|l_j> = (2 |d_j psi> + 2 <d_j psi|psi> |psi>) (x) |xi>` with `|xi>` the
/// first ancilla basis vector.
pub fn sld_vectors(state: &PureState, ancilla_dim: usize) -> Result<Vec<CVector>> {
    if ancilla_dim < 1 {
        return Err(Error::InvalidArgument(
            "ancilla dimension must be at least 1".into(),
        ));
    }
    let psi = state.state();
    let norm_defect = (psi.norm() - 1.0).abs();
    if norm_defect > tol::STATE_NORM {
        return Err(Error::NotNormalized(norm_defect));
    }
    let xi = CVector::basis(ancilla_dim, 0);
    let psi_ext = psi.kron(&xi);

    let mut out = Vec::with_capacity(state.num_params());
    for j in 0..state.num_params() {
        let d = state.derivative(j)?;
        let l_sys = project_derivative(&psi, &d).scale(C64::new(2.0, 0.0));
        let l = l_sys.kron(&xi);
        let overlap = psi_ext.inner(&l).norm();
        if overlap > 1e-9 {
            return Err(Error::NumericalInconsistency(alloc::format!(
                "<psi,xi|l_{j}> = {overlap:.3e}, SLD vector not orthogonal to the state"
            )));
        }
        out.push(l);
    }
    Ok(out)
}

/// Assemble the bundle `F_jk = <l_j|l_k>` from SLD-applied vectors.
pub fn fisher_bundle(l_vectors: Vec<CVector>) -> Result<FisherBundle> {
    let n = l_vectors.len();
    let dim = l_vectors.first().map_or(0, CVector::dim);
    for l in &l_vectors {
        if l.dim() != dim {
            return Err(Error::DimensionMismatch(dim, l.dim()));
        }
    }
    let mut f = CMatrix::zeros(n, n);
    for j in 0..n {
        for k in j..n {
            let entry = l_vectors[j].inner(&l_vectors[k]);
            f[(j, k)] = entry;
            f[(k, j)] = entry.conj();
        }
    }
    bundle_from_gram(l_vectors, f)
}

fn bundle_from_gram(l_vectors: Vec<CVector>, f: CMatrix) -> Result<FisherBundle> {
    let herm = f.hermiticity_defect();
    if herm > tol::STATE_NORM * (1.0 + f.max_abs()) {
        return Err(Error::NotHermitian(herm));
    }
    let f_q = f.real_part();
    let f_im = f.imag_part();
    Ok(FisherBundle {
        l_vectors,
        f,
        f_q,
        f_im,
    })
}

/// SLD vectors and bundle in one step.
pub fn pure_bundle(state: &PureState, ancilla_dim: usize) -> Result<FisherBundle> {
    fisher_bundle(sld_vectors(state, ancilla_dim)?)
}

/// Map a bundle through a linear reparametrization: `l'_j = sum_k J_jk l_k`,
/// `F' = J F J^T`.
pub fn reparametrize_bundle(bundle: &FisherBundle, j_map: &RMatrix) -> Result<FisherBundle> {
    let n = bundle.num_params();
    if j_map.rows() != n || j_map.cols() != n {
        return Err(Error::DimensionMismatch(n, j_map.rows()));
    }
    let dim = bundle.vector_dim();
    let mut l_new = Vec::with_capacity(n);
    for row in 0..n {
        let mut v = CVector::zeros(dim);
        for k in 0..n {
            v.axpy(C64::new(j_map[(row, k)], 0.0), &bundle.l_vectors[k]);
        }
        l_new.push(v);
    }
    fisher_bundle(l_new)
}

/// `F_Q^{-1/2}` by symmetric eigendecomposition.
///
/// Fails with the offending null direction when an eigenvalue sits below the
/// identifiability floor.
pub fn inverse_sqrt(f_q: &RMatrix) -> Result<RMatrix> {
    let (values, vectors) = symmetric_eigen(f_q)?;
    let n = f_q.rows();
    for (k, &v) in values.iter().enumerate() {
        if v < tol::FISHER_EIGEN_FLOOR {
            let null_direction: Vec<f64> = (0..n).map(|i| vectors[(i, k)]).collect();
            return Err(Error::SingularFisherMatrix {
                eigenvalue: v,
                null_direction,
            });
        }
    }
    let mut out = RMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                acc += vectors[(i, k)] * vectors[(j, k)] / values[k].sqrt();
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Inverse of a symmetric positive definite matrix via its spectrum.
pub fn symmetric_inverse(m: &RMatrix) -> Result<RMatrix> {
    let (values, vectors) = symmetric_eigen(m)?;
    let n = m.rows();
    for (k, &v) in values.iter().enumerate() {
        if v < tol::FISHER_EIGEN_FLOOR {
            let null_direction: Vec<f64> = (0..n).map(|i| vectors[(i, k)]).collect();
            return Err(Error::SingularFisherMatrix {
                eigenvalue: v,
                null_direction,
            });
        }
    }
    let mut out = RMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                acc += vectors[(i, k)] * vectors[(j, k)] / values[k];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Classical Fisher information matrix of a projective measurement.
///
/// With real outcome amplitudes arranged by the measurement construction,
/// `d_j p_m = Re(<psi|xi|m><m|l_j>)` and
/// `(F_C)_{jk} = sum_m d_j p_m d_k p_m / p_m`. Outcomes with probability
/// below the floor are skipped when their derivatives also vanish; a
/// vanishing probability with a live derivative is a genuine 0/0 limit and
/// is surfaced as an error.
pub fn cfim(state_ext: &CVector, l_vectors: &[CVector], basis: &[CVector]) -> Result<RMatrix> {
    let dim = state_ext.dim();
    let n = l_vectors.len();
    for l in l_vectors {
        if l.dim() != dim {
            return Err(Error::DimensionMismatch(dim, l.dim()));
        }
    }
    let mut worst = 0.0f64;
    for (i, a) in basis.iter().enumerate() {
        if a.dim() != dim {
            return Err(Error::DimensionMismatch(dim, a.dim()));
        }
        for (j, b) in basis.iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((a.inner(b).norm() - expected).abs());
        }
    }
    if worst > tol::ORTHONORMAL {
        return Err(Error::NotOrthonormal(worst));
    }

    let mut matrix = RMatrix::zeros(n, n);
    for (m_idx, m) in basis.iter().enumerate() {
        let amp = m.inner(state_ext); // <m|psi_ext>
        let p = amp.norm_sqr();
        let mut dp = Vec::with_capacity(n);
        for l in l_vectors {
            dp.push((amp.conj() * m.inner(l)).re);
        }
        if p < tol::PROBABILITY_FLOOR {
            let live = dp.iter().map(|d| d.abs()).fold(0.0, f64::max);
            if live >= tol::DERIVATIVE_FLOOR {
                return Err(Error::SingularOutcome {
                    outcome: m_idx,
                    probability: p,
                    derivative: live,
                });
            }
            continue;
        }
        for j in 0..n {
            for k in 0..n {
                matrix[(j, k)] += dp[j] * dp[k] / p;
            }
        }
    }
    Ok(matrix)
}

/// Outcome probabilities `p_m = |<m|psi_ext>|^2`.
pub fn outcome_probabilities(state_ext: &CVector, basis: &[CVector]) -> Vec<f64> {
    basis
        .iter()
        .map(|m| m.inner(state_ext).norm_sqr())
        .collect()
}

/// Probability derivatives `d_j p_m = Re(<psi_ext|m><m|l_j>)`.
pub fn outcome_derivatives(
    state_ext: &CVector,
    l_vectors: &[CVector],
    basis: &[CVector],
) -> Vec<Vec<f64>> {
    basis
        .iter()
        .map(|m| {
            let amp = m.inner(state_ext);
            l_vectors
                .iter()
                .map(|l| (amp.conj() * m.inner(l)).re)
                .collect()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Mixed states
// ---------------------------------------------------------------------------

/// Hermitian SLD operators solving `d_j rho = (rho L_j + L_j rho) / 2`.
///
/// In the eigenbasis of `rho`, `(L_j)_{ab} = 2 (d_j rho)_{ab} / (p_a + p_b)`;
/// elements over eigenvalue pairs summing below the floor are set to zero.
pub fn mixed_sld_matrices(state: &MixedState) -> Result<Vec<CMatrix>> {
    let rho = state.rho();
    let (values, vectors) = hermitian_eigen(&rho)?;
    let d = state.dim();
    let v_dag = vectors.adjoint();

    let mut out = Vec::with_capacity(state.num_params());
    for j in 0..state.num_params() {
        let drho = state.drho(j)?;
        let in_eig = v_dag.mul(&drho).mul(&vectors);
        let mut l_eig = CMatrix::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                let denom = values[a] + values[b];
                if denom >= tol::FISHER_EIGEN_FLOOR {
                    l_eig[(a, b)] = in_eig[(a, b)] * (2.0 / denom);
                }
            }
        }
        out.push(vectors.mul(&l_eig).mul(&v_dag));
    }
    Ok(out)
}

/// Bundle with `F_jk = Tr(rho L_j L_k)`; carries no `l_vectors`.
pub fn mixed_bundle(state: &MixedState) -> Result<FisherBundle> {
    let rho = state.rho();
    let slds = mixed_sld_matrices(state)?;
    let n = slds.len();
    let mut f = CMatrix::zeros(n, n);
    for j in 0..n {
        for k in j..n {
            let entry = rho.mul(&slds[j]).mul(&slds[k]).trace();
            f[(j, k)] = entry;
            f[(k, j)] = entry.conj();
        }
    }
    bundle_from_gram(Vec::new(), f)
}
