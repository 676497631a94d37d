//! Parametrized pure and mixed states with derivative access.
//!
//! A state is a family evaluator plus the parameter point it is anchored at.
//! Derivatives come from the family when it provides them analytically and
//! from phase-aligned central differences otherwise.
//!
//! Continuous-variable states enter only through finite orthonormal subspace
//! embeddings: the family reports amplitudes in a labeled orthonormal basis
//! that co-moves with the parameters, and supplies the derivative expansions
//! in that basis analytically. For such families the raw evaluator is
//! constant in `x` and finite differencing does not apply.

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;
#[allow(unused_imports)] // f64 float methods come from the trait in no_std builds
use num_traits::Float as _;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, CMatrix, CVector};
use crate::tol;

/// Evaluator for a family of unit vectors `psi(x)`.
///
/// `dpsi` may return `None` to request the finite-difference fallback.
pub trait StateFamily: Send + Sync {
    fn dim(&self) -> usize;
    fn num_params(&self) -> usize;
    fn psi(&self, x: &[f64]) -> CVector;
    fn dpsi(&self, _j: usize, _x: &[f64]) -> Option<CVector> {
        None
    }
}

/// A pure state anchored at a parameter point.
#[derive(Clone)]
pub struct PureState {
    family: Arc<dyn StateFamily>,
    params: Vec<f64>,
}

impl core::fmt::Debug for PureState {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("PureState")
            .field("dim", &self.dim())
            .field("params", &self.params)
            .finish()
    }
}

impl PureState {
    /// Validates normalization and, when derivatives are analytic, the
    /// norm-preservation condition `Re <psi|d_j psi> = 0`.
    pub fn new(family: Arc<dyn StateFamily>, params: Vec<f64>) -> Result<Self> {
        if params.len() != family.num_params() {
            return Err(Error::DimensionMismatch(family.num_params(), params.len()));
        }
        let psi = family.psi(&params);
        if psi.dim() != family.dim() {
            return Err(Error::DimensionMismatch(family.dim(), psi.dim()));
        }
        let defect = (psi.norm() - 1.0).abs();
        if defect > tol::STATE_NORM {
            return Err(Error::NotNormalized(defect));
        }
        let state = PureState { family, params };
        for j in 0..state.num_params() {
            if let Some(d) = state.family.dpsi(j, &state.params) {
                let re = psi.inner(&d).re;
                if re.abs() > tol::NORM_PRESERVATION {
                    return Err(Error::NumericalInconsistency(alloc::format!(
                        "Re <psi|d_{j} psi> = {re:.3e}; family does not preserve the norm"
                    )));
                }
            }
        }
        Ok(state)
    }

    pub fn dim(&self) -> usize {
        self.family.dim()
    }

    pub fn num_params(&self) -> usize {
        self.family.num_params()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn family(&self) -> &Arc<dyn StateFamily> {
        &self.family
    }

    /// The state vector at the anchor point.
    pub fn state(&self) -> CVector {
        self.family.psi(&self.params)
    }

    /// Derivative along parameter `j`: analytic if the family provides it,
    /// otherwise a phase-aligned central difference.
    pub fn derivative(&self, j: usize) -> Result<CVector> {
        if let Some(d) = self.family.dpsi(j, &self.params) {
            return Ok(d);
        }
        finite_difference_derivative(self, j, tol::FD_STEP)
    }

    /// Re-anchor the same family at a different parameter point.
    pub fn at(&self, params: Vec<f64>) -> Result<PureState> {
        PureState::new(self.family.clone(), params)
    }
}

/// Phase-aligned central difference `(psi(x + h e_j) - psi(x - h e_j)) / 2h`.
///
/// Each endpoint is rotated by the global phase that makes its overlap with
/// `psi(x)` real positive, so families with an arbitrary phase convention
/// still produce a usable derivative. The alignment gauges away the
/// imaginary part of `<psi|d_j psi>`: the result converges to the projected
/// derivative `d_j psi - <psi|d_j psi> psi`, which is the only content that
/// enters Fisher information. The step is taken relative to the parameter
/// magnitude when it exceeds 1.
pub fn finite_difference_derivative(state: &PureState, j: usize, h: f64) -> Result<CVector> {
    if h <= 0.0 {
        return Err(Error::InvalidArgument(alloc::format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    if j >= state.num_params() {
        return Err(Error::InvalidArgument(alloc::format!(
            "parameter index {j} out of range for {} parameters",
            state.num_params()
        )));
    }
    let x = state.params();
    let step = h * x[j].abs().max(1.0);
    let psi0 = state.state();

    let eval = |offset: f64| -> Result<CVector> {
        let mut shifted = x.to_vec();
        shifted[j] += offset;
        let psi = state.family.psi(&shifted);
        let overlap = psi0.inner(&psi);
        let mag = overlap.norm();
        if mag < 1e-12 {
            return Err(Error::NumericalInconsistency(
                "state moved orthogonally within one finite-difference step".into(),
            ));
        }
        Ok(psi.scale(overlap.conj() / C64::new(mag, 0.0)))
    };

    let plus = eval(step)?;
    let minus = eval(-step)?;
    Ok(plus.sub(&minus).scale(C64::new(1.0 / (2.0 * step), 0.0)))
}

/// Projection `d - <psi|d> psi`, the gauge-invariant part of a derivative.
pub fn project_derivative(psi: &CVector, d: &CVector) -> CVector {
    let overlap = psi.inner(d);
    let mut out = d.clone();
    out.axpy(-overlap, psi);
    out
}

// ---------------------------------------------------------------------------
// Fixtures
// ---------------------------------------------------------------------------

/// Qubit family `(e^{i alpha} sin(theta), cos(theta))` with parameters
/// `(alpha, theta)`.
#[derive(Debug)]
struct QubitFamily;

impl StateFamily for QubitFamily {
    fn dim(&self) -> usize {
        2
    }
    fn num_params(&self) -> usize {
        2
    }
    fn psi(&self, x: &[f64]) -> CVector {
        let (alpha, theta) = (x[0], x[1]);
        let phase = C64::new(0.0, alpha).exp();
        CVector::from_entries(alloc::vec![
            phase * theta.sin(),
            C64::new(theta.cos(), 0.0),
        ])
    }
    fn dpsi(&self, j: usize, x: &[f64]) -> Option<CVector> {
        let (alpha, theta) = (x[0], x[1]);
        let phase = C64::new(0.0, alpha).exp();
        Some(match j {
            0 => CVector::from_entries(alloc::vec![
                C64::new(0.0, 1.0) * phase * theta.sin(),
                C64::new(0.0, 0.0),
            ]),
            _ => CVector::from_entries(alloc::vec![
                phase * theta.cos(),
                C64::new(-theta.sin(), 0.0),
            ]),
        })
    }
}

pub fn qubit_fixture(alpha: f64, theta: f64) -> PureState {
    PureState::new(Arc::new(QubitFamily), alloc::vec![alpha, theta])
        .expect("qubit family is normalized for all parameters")
}

/// Three-level family
/// `((sqrt2/2) e^{i alpha1} sin(theta1), (sqrt2/2) sin(theta1), cos(theta1))`
/// with parameters `(alpha1, theta1)`; the remaining angles are fixed at
/// `alpha2 = 0`, `theta2 = pi/4`.
#[derive(Debug)]
struct QutritFamily;

impl StateFamily for QutritFamily {
    fn dim(&self) -> usize {
        3
    }
    fn num_params(&self) -> usize {
        2
    }
    fn psi(&self, x: &[f64]) -> CVector {
        let (alpha1, theta1) = (x[0], x[1]);
        let half_sqrt2 = core::f64::consts::FRAC_1_SQRT_2;
        let phase = C64::new(0.0, alpha1).exp();
        CVector::from_entries(alloc::vec![
            phase * (half_sqrt2 * theta1.sin()),
            C64::new(half_sqrt2 * theta1.sin(), 0.0),
            C64::new(theta1.cos(), 0.0),
        ])
    }
    fn dpsi(&self, j: usize, x: &[f64]) -> Option<CVector> {
        let (alpha1, theta1) = (x[0], x[1]);
        let half_sqrt2 = core::f64::consts::FRAC_1_SQRT_2;
        let phase = C64::new(0.0, alpha1).exp();
        Some(match j {
            0 => CVector::from_entries(alloc::vec![
                C64::new(0.0, 1.0) * phase * (half_sqrt2 * theta1.sin()),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
            ]),
            _ => CVector::from_entries(alloc::vec![
                phase * (half_sqrt2 * theta1.cos()),
                C64::new(half_sqrt2 * theta1.cos(), 0.0),
                C64::new(-theta1.sin(), 0.0),
            ]),
        })
    }
}

pub fn qutrit_fixture(alpha1: f64, theta1: f64) -> PureState {
    PureState::new(Arc::new(QutritFamily), alloc::vec![alpha1, theta1])
        .expect("qutrit family is normalized for all parameters")
}

/// Squeezed coherent state over the four-dimensional embedded subspace
/// spanned by the displaced-squeezed number states labeled 0..3.
///
/// Parameters are `(x1, x2, x3) = (Re eta, Im eta, r)`. The basis co-moves
/// with the parameters, so the evaluator is the constant first label vector
/// while the derivative expansions carry the parameter dependence:
/// `d1 = -i x2 |0> + e^{x3} |1>`, `d2 = i x1 |0> + i e^{-x3} |1>`,
/// `d3 = -(sqrt2/2) |2>`.
#[derive(Debug)]
struct SqueezedFamily;

impl StateFamily for SqueezedFamily {
    fn dim(&self) -> usize {
        4
    }
    fn num_params(&self) -> usize {
        3
    }
    fn psi(&self, _x: &[f64]) -> CVector {
        CVector::basis(4, 0)
    }
    fn dpsi(&self, j: usize, x: &[f64]) -> Option<CVector> {
        let (x1, x2, x3) = (x[0], x[1], x[2]);
        let mut d = CVector::zeros(4);
        match j {
            0 => {
                d[0] = C64::new(0.0, -x2);
                d[1] = C64::new(x3.exp(), 0.0);
            }
            1 => {
                d[0] = C64::new(0.0, x1);
                d[1] = C64::new(0.0, (-x3).exp());
            }
            _ => {
                d[2] = C64::new(-core::f64::consts::FRAC_1_SQRT_2, 0.0);
            }
        }
        Some(d)
    }
}

pub fn squeezed_fixture(x1: f64, x2: f64, x3: f64) -> PureState {
    PureState::new(Arc::new(SqueezedFamily), alloc::vec![x1, x2, x3])
        .expect("embedded squeezed family is normalized by construction")
}

/// A state given by explicit amplitude and derivative vectors, valid only at
/// its anchor point. Used for custom inputs and randomized sweeps.
#[derive(Debug)]
struct ExplicitFamily {
    psi: CVector,
    dpsi: Vec<CVector>,
}

impl StateFamily for ExplicitFamily {
    fn dim(&self) -> usize {
        self.psi.dim()
    }
    fn num_params(&self) -> usize {
        self.dpsi.len()
    }
    fn psi(&self, _x: &[f64]) -> CVector {
        self.psi.clone()
    }
    fn dpsi(&self, j: usize, _x: &[f64]) -> Option<CVector> {
        Some(self.dpsi[j].clone())
    }
}

/// Build a state from explicit `psi` and per-parameter derivative vectors.
///
/// The derivatives must satisfy `Re <psi|d_j> = 0`; the anchor point is the
/// origin in parameter space.
pub fn state_from_vectors(psi: CVector, dpsi: Vec<CVector>) -> Result<PureState> {
    for d in &dpsi {
        if d.dim() != psi.dim() {
            return Err(Error::DimensionMismatch(psi.dim(), d.dim()));
        }
    }
    let n = dpsi.len();
    PureState::new(Arc::new(ExplicitFamily { psi, dpsi }), alloc::vec![0.0; n])
}

// ---------------------------------------------------------------------------
// Mixed states
// ---------------------------------------------------------------------------

/// Evaluator for a family of density matrices `rho(x)`.
pub trait MixedFamily: Send + Sync {
    fn dim(&self) -> usize;
    fn num_params(&self) -> usize;
    fn rho(&self, x: &[f64]) -> CMatrix;
    fn drho(&self, _j: usize, _x: &[f64]) -> Option<CMatrix> {
        None
    }
}

/// A mixed state anchored at a parameter point.
#[derive(Clone)]
pub struct MixedState {
    family: Arc<dyn MixedFamily>,
    params: Vec<f64>,
}

impl core::fmt::Debug for MixedState {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("MixedState")
            .field("dim", &self.dim())
            .field("params", &self.params)
            .finish()
    }
}

impl MixedState {
    pub fn new(family: Arc<dyn MixedFamily>, params: Vec<f64>) -> Result<Self> {
        if params.len() != family.num_params() {
            return Err(Error::DimensionMismatch(family.num_params(), params.len()));
        }
        let rho = family.rho(&params);
        validate_density_matrix(&rho)?;
        Ok(MixedState { family, params })
    }

    pub fn dim(&self) -> usize {
        self.family.dim()
    }

    pub fn num_params(&self) -> usize {
        self.family.num_params()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn rho(&self) -> CMatrix {
        self.family.rho(&self.params)
    }

    /// `d_j rho`: analytic if provided, otherwise entrywise central
    /// difference (density matrices carry no gauge, so no alignment needed).
    pub fn drho(&self, j: usize) -> Result<CMatrix> {
        if let Some(d) = self.family.drho(j, &self.params) {
            return Ok(d);
        }
        let x = &self.params;
        let step = tol::FD_STEP * x[j].abs().max(1.0);
        let mut plus = x.clone();
        plus[j] += step;
        let mut minus = x.clone();
        minus[j] -= step;
        let a = self.family.rho(&plus);
        let b = self.family.rho(&minus);
        Ok(a.sub(&b).scale(C64::new(1.0 / (2.0 * step), 0.0)))
    }
}

pub fn validate_density_matrix(rho: &CMatrix) -> Result<()> {
    if !rho.is_square() {
        return Err(Error::NotSquare(rho.rows(), rho.cols()));
    }
    let herm = rho.hermiticity_defect();
    if herm > tol::STATE_NORM {
        return Err(Error::InvalidDensityMatrix(alloc::format!(
            "hermiticity defect {herm:.3e}"
        )));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > tol::STATE_NORM || tr.im.abs() > tol::STATE_NORM {
        return Err(Error::InvalidDensityMatrix(alloc::format!(
            "trace {} + {}i",
            tr.re,
            tr.im
        )));
    }
    let (values, _) = hermitian_eigen(rho)?;
    if let Some(&min) = values.first() {
        if min < -tol::STATE_NORM {
            return Err(Error::InvalidDensityMatrix(alloc::format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
    }
    Ok(())
}

/// Spectral decomposition of a density matrix with a deterministic gauge:
/// eigenvalues descending, eigenvalues below the floor truncated to zero,
/// each eigenvector rotated so its largest-magnitude entry is real positive.
pub fn spectral_decomposition(rho: &CMatrix) -> Result<(Vec<f64>, Vec<CVector>)> {
    let (values, vectors) = hermitian_eigen(rho)?;
    let n = values.len();
    let mut weights = Vec::with_capacity(n);
    let mut modes = Vec::with_capacity(n);
    for k in (0..n).rev() {
        let lambda = if values[k] < tol::FISHER_EIGEN_FLOOR {
            0.0
        } else {
            values[k]
        };
        let mut v = vectors.column(k);
        let mut lead = 0;
        let mut lead_mag = 0.0;
        for (i, z) in v.entries().iter().enumerate() {
            if z.norm() > lead_mag + 1e-12 {
                lead_mag = z.norm();
                lead = i;
            }
        }
        if lead_mag > 0.0 {
            let phase = v[lead].conj() / C64::new(lead_mag, 0.0);
            v = v.scale(phase);
        }
        weights.push(lambda);
        modes.push(v);
    }
    Ok((weights, modes))
}

struct PurifiedFamily {
    inner: Arc<dyn MixedFamily>,
}

impl StateFamily for PurifiedFamily {
    fn dim(&self) -> usize {
        let d = self.inner.dim();
        d * d
    }
    fn num_params(&self) -> usize {
        self.inner.num_params()
    }
    fn psi(&self, x: &[f64]) -> CVector {
        let rho = self.inner.rho(x);
        let d = self.inner.dim();
        let (weights, modes) =
            spectral_decomposition(&rho).expect("validated density matrix stays decomposable");
        // |Psi> = sum_j sqrt(lambda_j) |j_E>|Psi_j> with the environment as
        // the first tensor factor.
        let mut psi = CVector::zeros(d * d);
        for (j, (w, mode)) in weights.iter().zip(&modes).enumerate() {
            let amp = w.sqrt();
            for s in 0..d {
                psi[j * d + s] += C64::new(amp, 0.0) * mode[s];
            }
        }
        psi
    }
}

/// Purify a mixed state: a pure state on `dim^2` whose partial trace over
/// the environment reproduces `rho(x)`.
///
/// Derivatives fall back to phase-aligned finite differences of the spectral
/// purification; the eigen-gauge is deterministic but can jump at eigenvalue
/// crossings, where analytic derivative providers should be preferred.
pub fn purify(rho: &MixedState) -> Result<PureState> {
    PureState::new(
        Arc::new(PurifiedFamily {
            inner: rho.family.clone(),
        }),
        rho.params.to_vec(),
    )
}

/// Partial trace over the environment factor of a `d*d`-dimensional pure
/// state laid out as environment (x) system.
pub fn partial_trace_env(psi: &CVector, dim: usize) -> Result<CMatrix> {
    if psi.dim() != dim * dim {
        return Err(Error::DimensionMismatch(dim * dim, psi.dim()));
    }
    let mut rho = CMatrix::zeros(dim, dim);
    for j in 0..dim {
        for a in 0..dim {
            for b in 0..dim {
                rho[(a, b)] += psi[j * dim + a] * psi[j * dim + b].conj();
            }
        }
    }
    Ok(rho)
}
