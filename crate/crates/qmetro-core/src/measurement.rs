//! Construction of projective measurements that attain the tradeoff bound.
//!
//! Pipeline, all in the canonical parametrization where `F_Q = I` and
//! `F_Im` is in skew block form:
//!
//! 1. [`canonical_parametrization`] finds the linear parameter map
//!    `J = P F_Q^{-1/2}` that brings the bundle to canonical form.
//! 2. [`optimal_observables`] builds the vectors `|o_j>` approximating the
//!    SLD vectors block by block. A block with `beta < 1` mixes its two
//!    `|l>` vectors; a block with `beta = 1` (linearly dependent pair) mixes
//!    `|l>` with a fresh unit vector orthogonal to the state and every SLD
//!    vector; parameters outside any block keep `|o_k> = |l_k>`.
//! 3. [`build_measurement`] orthonormalizes `{|psi>|xi>, |o_1>, ...}` into
//!    the columns of a unitary `A`, picks a real orthogonal `B` with a dense
//!    first column, and takes the measurement kets `|m> = sum_j B_mj |a_j>`
//!    (equivalently, the rows of `B A^{-1}`). In this basis the state and
//!    every `|o_j>` have real amplitudes, which is exactly the condition for
//!    a single projective measurement to realize all the `O_j` observables.
//! 4. [`verify_saturation`] recomputes the classical Fisher information from
//!    the finished measurement and checks the bound is met.

use alloc::vec::Vec;

use num_complex::Complex64 as C64;
#[allow(unused_imports)] // f64 float methods come from the trait in no_std builds
use num_traits::Float as _;

use crate::error::{Error, Result};
use crate::fisher::{
    cfim, fisher_bundle, inverse_sqrt, reparametrize_bundle, sld_vectors, FisherBundle,
};
use crate::linalg::{
    complete_basis, dense_first_column_orthogonal, gram_schmidt, skew_block_diagonalize,
    BlockForm, CMatrix, CVector, RMatrix,
};
use crate::states::PureState;
use crate::tol;
use crate::tradeoff::{self, TradeoffReport};

/// How to source the extra orthogonal directions needed by fully degenerate
/// blocks (`|beta| = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AncillaPolicy {
    /// Attach an ancilla when degenerate blocks exist; its dimension is one
    /// more than the number of degenerate blocks (at least 2). The
    /// orthogonal vectors are `|psi>|xi_k>` with `xi_k` running over the
    /// ancilla basis beyond `|xi>`.
    Auto,
    /// Never attach an ancilla; search the system space itself for the
    /// orthogonal directions and fail if it has no room.
    SystemOnly,
}

/// Optimal commuting-observable vectors.
#[derive(Debug, Clone)]
pub struct OptimalObservables {
    pub o_vectors: Vec<CVector>,
    pub used_ancilla: bool,
    /// Unit vectors consumed by degenerate blocks, in block order.
    pub perp_vectors: Vec<CVector>,
    /// Rotation angle of the degenerate-block construction (0 gives a
    /// balanced diagonal classical Fisher matrix).
    pub varphi: f64,
}

/// A projective measurement basis on the extended space.
#[derive(Debug, Clone)]
pub struct Measurement {
    /// Orthonormal kets `|m>`; the bras are the rows of `B A^{-1}`.
    pub basis: Vec<CVector>,
    /// Extended dimension (system times ancilla).
    pub dim: usize,
    /// Unitary whose columns are the orthonormalized construction vectors.
    pub a: CMatrix,
    /// Real orthogonal matrix with dense first column (rows sign-fixed so
    /// every `<m|psi>|xi>` is positive).
    pub b: RMatrix,
    pub ancilla_dim: usize,
    pub betas: Vec<f64>,
    pub varphi: f64,
}

impl Measurement {
    pub fn outcomes(&self) -> usize {
        self.basis.len()
    }
}

/// Everything produced while constructing an optimal measurement.
#[derive(Debug, Clone)]
pub struct OptimalConstruction {
    pub state_ext: CVector,
    pub system_dim: usize,
    pub ancilla_dim: usize,
    /// Parameter map to canonical coordinates: `l'_j = sum_k J_jk l_k`.
    pub transform: RMatrix,
    pub blocks: BlockForm,
    /// Bundle in the original parametrization on the extended space.
    pub bundle: FisherBundle,
    /// Bundle in canonical coordinates (`F_Q = I`, `F_Im` block form).
    pub canonical: FisherBundle,
    pub observables: OptimalObservables,
    pub measurement: Measurement,
}

/// Reparametrize a bundle to `F_Q = I` with `F_Im` in canonical block form.
///
/// Returns the map `J = P F_Q^{-1/2}`, the transformed bundle, and the block
/// data. The transformed bundle is recomputed from the mapped vectors and
/// validated against the canonical layout.
pub fn canonical_parametrization(
    bundle: &FisherBundle,
) -> Result<(RMatrix, FisherBundle, BlockForm)> {
    let s = inverse_sqrt(&bundle.f_q)?;
    let f_im_tilde = s.mul(&bundle.f_im).mul(&s);
    let blocks = skew_block_diagonalize(&f_im_tilde)?;
    let j = blocks.p.mul(&s);
    let canonical = reparametrize_bundle(bundle, &j)?;

    let n = bundle.num_params();
    let id_defect = canonical.f_q.max_abs_diff(&RMatrix::identity(n));
    if id_defect > tol::CANONICAL_RESIDUAL {
        return Err(Error::NumericalInconsistency(alloc::format!(
            "canonical F_Q deviates from identity by {id_defect:.3e}"
        )));
    }
    let block_defect = canonical.f_im.max_abs_diff(&blocks.canonical_matrix());
    if block_defect > tol::CANONICAL_RESIDUAL {
        return Err(Error::NumericalInconsistency(alloc::format!(
            "canonical F_Im deviates from block form by {block_defect:.3e}"
        )));
    }
    Ok((j, canonical, blocks))
}

/// Optimal `|o_j>` for a canonical bundle.
///
/// `perp_vectors` supplies one unit vector per degenerate block, each
/// orthogonal to the extended state and to every SLD vector; blocks with
/// `beta < 1` and tail parameters need none.
pub fn optimal_observables(
    canonical: &FisherBundle,
    blocks: &BlockForm,
    perp_vectors: &[CVector],
    varphi: f64,
    used_ancilla: bool,
) -> Result<OptimalObservables> {
    let n = canonical.num_params();
    if 2 * blocks.betas.len() + blocks.zeros != n {
        return Err(Error::DimensionMismatch(
            2 * blocks.betas.len() + blocks.zeros,
            n,
        ));
    }
    let degenerate = blocks.degenerate_blocks(tol::LAMBDA_SNAP);
    if perp_vectors.len() < degenerate {
        return Err(Error::AncillaTooSmall {
            needed: degenerate,
            available: perp_vectors.len(),
        });
    }
    validate_perps(canonical, perp_vectors)?;

    let ls = &canonical.l_vectors;
    let mut o_vectors: Vec<CVector> = Vec::with_capacity(n);
    let mut used_perps = Vec::with_capacity(degenerate);
    let mut perp_iter = perp_vectors.iter();

    for (block, &beta_raw) in blocks.betas.iter().enumerate() {
        let beta = tradeoff::snap_lambda(beta_raw)?;
        let (even, odd) = (&ls[2 * block], &ls[2 * block + 1]);
        if beta < 1.0 {
            // Rotate within the block plane: phi = arcsin(beta).
            let phi = beta.asin();
            let (sin_phi, cos_phi) = (phi.sin(), phi.cos());
            let a = (1.0 + cos_phi) / (2.0 * cos_phi);
            let b = -sin_phi / (2.0 * cos_phi);
            let mut o_even = even.scale(C64::new(a, 0.0));
            o_even.axpy(C64::new(0.0, -b), odd);
            let mut o_odd = even.scale(C64::new(0.0, b));
            o_odd.axpy(C64::new(a, 0.0), odd);
            o_vectors.push(o_even);
            o_vectors.push(o_odd);
        } else {
            // Linearly dependent pair: replace the second direction with a
            // fresh orthogonal one. Any varphi attains the bound.
            let perp = perp_iter
                .next()
                .expect("perp count validated above")
                .clone();
            let s2 = (2.0 * varphi).sin();
            let c2 = (2.0 * varphi).cos();
            let mut o_even = even.scale(C64::new(0.5 * (1.0 - s2), 0.0));
            o_even.axpy(C64::new(0.0, 0.5 * beta * c2), &perp);
            let mut o_odd = even.scale(C64::new(0.0, 0.5 * beta * (1.0 + s2)));
            o_odd.axpy(C64::new(0.5 * c2, 0.0), &perp);
            o_vectors.push(o_even);
            o_vectors.push(o_odd);
            used_perps.push(perp);
        }
    }
    for tail in &ls[2 * blocks.betas.len()..n] {
        o_vectors.push(tail.clone());
    }

    let obs = OptimalObservables {
        o_vectors,
        used_ancilla,
        perp_vectors: used_perps,
        varphi,
    };
    let worst = mutual_imag_defect(&obs.o_vectors);
    if worst > 1e-9 {
        return Err(Error::NumericalInconsistency(alloc::format!(
            "observable vectors have complex mutual inner products (Im up to {worst:.3e})"
        )));
    }
    Ok(obs)
}

fn mutual_imag_defect(vectors: &[CVector]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in vectors.iter().enumerate() {
        for b in vectors.iter().skip(i + 1) {
            worst = worst.max(a.inner(b).im.abs());
        }
    }
    worst
}

fn validate_perps(canonical: &FisherBundle, perps: &[CVector]) -> Result<()> {
    for (i, p) in perps.iter().enumerate() {
        if (p.norm() - 1.0).abs() > tol::ORTHONORMAL {
            return Err(Error::NotOrthonormal((p.norm() - 1.0).abs()));
        }
        for q in perps.iter().skip(i + 1) {
            let overlap = p.inner(q).norm();
            if overlap > tol::ORTHONORMAL {
                return Err(Error::NotOrthonormal(overlap));
            }
        }
        for l in &canonical.l_vectors {
            let overlap = p.inner(l).norm();
            if overlap > 1e-9 {
                return Err(Error::NumericalInconsistency(alloc::format!(
                    "orthogonal direction {i} overlaps an SLD vector by {overlap:.3e}"
                )));
            }
        }
    }
    Ok(())
}

/// Assemble the projective basis from the state and observable vectors.
pub fn build_measurement(
    state_ext: &CVector,
    obs: &OptimalObservables,
    blocks: &BlockForm,
    ancilla_dim: usize,
) -> Result<Measurement> {
    let dim = state_ext.dim();
    for o in &obs.o_vectors {
        if o.dim() != dim {
            return Err(Error::DimensionMismatch(dim, o.dim()));
        }
        let overlap = state_ext.inner(o).norm();
        if overlap > 1e-9 {
            return Err(Error::NumericalInconsistency(alloc::format!(
                "observable vector overlaps the state by {overlap:.3e}"
            )));
        }
    }
    let imag = mutual_imag_defect(&obs.o_vectors);
    if imag > 1e-9 {
        return Err(Error::NumericalInconsistency(alloc::format!(
            "observable vectors have complex mutual inner products (Im up to {imag:.3e})"
        )));
    }

    let mut seed = Vec::with_capacity(1 + obs.o_vectors.len());
    seed.push(state_ext.clone());
    seed.extend(obs.o_vectors.iter().cloned());
    let gs = gram_schmidt(&seed, tol::GS_DROP)?;
    if gs.dropped.contains(&0) {
        return Err(Error::NotNormalized((state_ext.norm() - 1.0).abs()));
    }
    let a_columns = complete_basis(&gs.vectors, dim)?;
    let a = CMatrix::from_columns(&a_columns);

    let mut b = dense_first_column_orthogonal(dim);
    let mut basis = Vec::with_capacity(dim);
    for m in 0..dim {
        let mut ket = CVector::zeros(dim);
        for (j, col) in a_columns.iter().enumerate() {
            ket.axpy(C64::new(b[(m, j)], 0.0), col);
        }
        // <m|psi_ext> = B_m0; flip the row so it is positive.
        if b[(m, 0)] < 0.0 {
            ket = ket.scale(C64::new(-1.0, 0.0));
            for j in 0..dim {
                b[(m, j)] = -b[(m, j)];
            }
        }
        basis.push(ket);
    }

    let measurement = Measurement {
        basis,
        dim,
        a,
        b,
        ancilla_dim,
        betas: blocks.betas.clone(),
        varphi: obs.varphi,
    };
    validate_measurement(state_ext, obs, &measurement)?;
    Ok(measurement)
}

fn validate_measurement(
    state_ext: &CVector,
    obs: &OptimalObservables,
    measurement: &Measurement,
) -> Result<()> {
    let mut worst = 0.0f64;
    for (i, a) in measurement.basis.iter().enumerate() {
        for (j, b) in measurement.basis.iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((a.inner(b).norm() - expected).abs());
        }
    }
    if worst > tol::ORTHONORMAL {
        return Err(Error::NotOrthonormal(worst));
    }
    for (m_idx, m) in measurement.basis.iter().enumerate() {
        let amp = m.inner(state_ext);
        if amp.im.abs() > 1e-9 || amp.re <= 0.0 {
            return Err(Error::NumericalInconsistency(alloc::format!(
                "<m_{m_idx}|psi,xi> = {} + {}i is not real positive",
                amp.re,
                amp.im
            )));
        }
        // The eigenvalue assignments f_j(m) = <m|o_j> / <m|psi,xi> must be
        // real for the O_j to be simultaneously realized observables.
        for (j, o) in obs.o_vectors.iter().enumerate() {
            let f = m.inner(o) / amp;
            if f.im.abs() > tol::SATURATION_GAP {
                return Err(Error::NumericalInconsistency(alloc::format!(
                    "f_{j}(m_{m_idx}) has imaginary part {:.3e}",
                    f.im
                )));
            }
        }
    }
    Ok(())
}

/// Resolve ancilla size and build the full optimal-measurement pipeline for
/// a pure state.
pub fn construct_optimal_measurement(
    state: &PureState,
    policy: AncillaPolicy,
    varphi: f64,
) -> Result<OptimalConstruction> {
    let system_dim = state.dim();
    let bundle_sys = fisher_bundle(sld_vectors(state, 1)?)?;
    let (_, _, blocks_sys) = canonical_parametrization(&bundle_sys)?;
    let degenerate = blocks_sys.degenerate_blocks(tol::LAMBDA_SNAP);

    let ancilla_dim = match policy {
        AncillaPolicy::Auto => {
            if degenerate == 0 {
                1
            } else {
                degenerate + 1
            }
        }
        AncillaPolicy::SystemOnly => 1,
    };

    let bundle = fisher_bundle(sld_vectors(state, ancilla_dim)?)?;
    let (transform, canonical, blocks) = canonical_parametrization(&bundle)?;
    let state_ext = state.state().kron(&CVector::basis(ancilla_dim, 0));

    let perps = if degenerate == 0 {
        Vec::new()
    } else {
        match policy {
            AncillaPolicy::Auto => {
                let psi = state.state();
                (0..degenerate)
                    .map(|k| psi.kron(&CVector::basis(ancilla_dim, k + 1)))
                    .collect()
            }
            AncillaPolicy::SystemOnly => {
                let mut seed = Vec::with_capacity(1 + canonical.l_vectors.len());
                seed.push(state_ext.clone());
                seed.extend(canonical.l_vectors.iter().cloned());
                let spanned = gram_schmidt(&seed, tol::GS_DROP)?.vectors;
                if spanned.len() + degenerate > state_ext.dim() {
                    return Err(Error::AncillaTooSmall {
                        needed: degenerate,
                        available: state_ext.dim().saturating_sub(spanned.len()),
                    });
                }
                let full = complete_basis(&spanned, state_ext.dim())?;
                full[spanned.len()..spanned.len() + degenerate].to_vec()
            }
        }
    };

    let observables = optimal_observables(
        &canonical,
        &blocks,
        &perps,
        varphi,
        ancilla_dim > 1,
    )?;
    let measurement = build_measurement(&state_ext, &observables, &blocks, ancilla_dim)?;

    Ok(OptimalConstruction {
        state_ext,
        system_dim,
        ancilla_dim,
        transform,
        blocks,
        bundle,
        canonical,
        observables,
        measurement,
    })
}

impl OptimalConstruction {
    /// Classical Fisher information of the constructed measurement in the
    /// original parametrization.
    pub fn achieved_cfim(&self) -> Result<RMatrix> {
        cfim(
            &self.state_ext,
            &self.bundle.l_vectors,
            &self.measurement.basis,
        )
    }

    /// Squared approximation errors `|| |o_j> - |l_j> ||^2` in canonical
    /// coordinates.
    pub fn approximation_errors(&self) -> Vec<f64> {
        self.observables
            .o_vectors
            .iter()
            .zip(&self.canonical.l_vectors)
            .map(|(o, l)| o.sub(l).norm_sqr())
            .collect()
    }
}

/// Recompute probabilities and classical Fisher information from the
/// measurement and check that the bound is attained.
///
/// On failure, reports the worst block: under canonical coordinates each
/// block must contribute `1 + sqrt(1 - beta^2)` to the trace.
pub fn verify_saturation(
    construction: &OptimalConstruction,
    gap_tol: f64,
) -> Result<TradeoffReport> {
    let fc = construction.achieved_cfim()?;
    let report = tradeoff::report(&construction.bundle, construction.system_dim, Some(&fc), true)?;
    let gap = report.gap.expect("achieved was supplied");
    if gap.abs() > gap_tol {
        // Localize the defect in canonical coordinates.
        let fc_canonical = construction
            .transform
            .mul(&fc)
            .mul(&construction.transform.transpose());
        let mut worst_block = None;
        let mut worst_defect = 0.0;
        for (j, &beta_raw) in construction.blocks.betas.iter().enumerate() {
            let beta = tradeoff::snap_lambda(beta_raw)?;
            let expected = 1.0 + (1.0 - beta * beta).max(0.0).sqrt();
            let got = fc_canonical[(2 * j, 2 * j)] + fc_canonical[(2 * j + 1, 2 * j + 1)];
            let defect = (got - expected).abs();
            if defect > worst_defect {
                worst_defect = defect;
                worst_block = Some(j);
            }
        }
        return Err(Error::SaturationGap {
            gap,
            block: worst_block,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fisher::pure_bundle;
    use crate::states::{qubit_fixture, qutrit_fixture, squeezed_fixture};
    use alloc::vec;
    use core::f64::consts::FRAC_PI_4;

    #[test]
    fn canonical_parametrization_normalizes_qubit() {
        let bundle = pure_bundle(&qubit_fixture(0.2, 0.9), 1).unwrap();
        let (j, canonical, blocks) = canonical_parametrization(&bundle).unwrap();
        assert_eq!(blocks.betas.len(), 1);
        assert!((blocks.betas[0] - 1.0).abs() < 1e-10);
        assert!(canonical
            .f_q
            .max_abs_diff(&RMatrix::identity(2))
            < 1e-10);
        // Direct recomputation of the Gram matrix agrees with J F J^T.
        let direct = reparametrize_bundle(&bundle, &j).unwrap();
        assert!(direct.f.max_abs_diff(&canonical.f) < 1e-12);
    }

    #[test]
    fn canonical_parametrization_identity_when_already_canonical() {
        // A state engineered with F_Q = I, F_Im = 0.6-block.
        let s = qutrit_fixture(0.0, FRAC_PI_4);
        let bundle = pure_bundle(&s, 1).unwrap();
        let (_, canonical, blocks) = canonical_parametrization(&bundle).unwrap();
        let beta = 2.0f64.sqrt() * FRAC_PI_4.cos() / (3.0 + (2.0 * FRAC_PI_4).cos()).sqrt();
        assert!((blocks.betas[0] - beta).abs() < 1e-12);
        let (_, canonical2, blocks2) = canonical_parametrization(&canonical).unwrap();
        assert!((blocks2.betas[0] - beta).abs() < 1e-12);
        assert!(canonical2.f_im.max_abs_diff(&canonical.f_im) < 1e-9);
    }

    #[test]
    fn qubit_observable_norms_match_degenerate_branch() {
        let c = construct_optimal_measurement(
            &qubit_fixture(0.0, FRAC_PI_4),
            AncillaPolicy::Auto,
            0.0,
        )
        .unwrap();
        assert_eq!(c.ancilla_dim, 2);
        let o = &c.observables.o_vectors;
        assert!((o[0].norm_sqr() - 0.5).abs() < 1e-10);
        assert!((o[1].norm_sqr() - 0.5).abs() < 1e-10);
        assert!(o[0].inner(&o[1]).norm() < 1e-10);
    }

    #[test]
    fn zero_beta_tail_copies_sld_vectors() {
        // Squeezed fixture: one degenerate pair plus a tail parameter with
        // o_3 = l_3.
        let c = construct_optimal_measurement(
            &squeezed_fixture(0.0, 0.0, 0.0),
            AncillaPolicy::Auto,
            0.0,
        )
        .unwrap();
        let o3 = &c.observables.o_vectors[2];
        let l3 = &c.canonical.l_vectors[2];
        assert!(o3.sub(l3).norm() < 1e-10);
    }

    #[test]
    fn qubit_system_only_policy_is_rejected() {
        let err = construct_optimal_measurement(
            &qubit_fixture(0.0, FRAC_PI_4),
            AncillaPolicy::SystemOnly,
            0.0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::AncillaTooSmall { .. }));
    }

    #[test]
    fn qubit_saturates_bound() {
        let state = qubit_fixture(0.0, FRAC_PI_4);
        let c = construct_optimal_measurement(&state, AncillaPolicy::Auto, 0.0).unwrap();
        let report = verify_saturation(&c, tol::SATURATION_GAP).unwrap();
        assert!((report.achieved.unwrap() - 1.0).abs() < 1e-9);
        // F_C = diag(sin^2(2 theta)/2, 2).
        let fc = c.achieved_cfim().unwrap();
        assert!((fc[(0, 0)] - 0.5).abs() < 1e-9);
        assert!((fc[(1, 1)] - 2.0).abs() < 1e-9);
        assert!(fc[(0, 1)].abs() < 1e-9);
    }

    #[test]
    fn qutrit_saturates_without_ancilla() {
        let state = qutrit_fixture(0.0, FRAC_PI_4);
        let c = construct_optimal_measurement(&state, AncillaPolicy::Auto, 0.0).unwrap();
        assert_eq!(c.ancilla_dim, 1);
        let report = verify_saturation(&c, tol::SATURATION_GAP).unwrap();
        let expected = 1.0 + 2.0f64.sqrt() / (3.0 + (2.0 * FRAC_PI_4).cos()).sqrt();
        assert!((report.achieved.unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn squeezed_saturates_with_and_without_ancilla() {
        for policy in [AncillaPolicy::Auto, AncillaPolicy::SystemOnly] {
            let state = squeezed_fixture(0.1, -0.3, 0.4);
            let c = construct_optimal_measurement(&state, policy, 0.0).unwrap();
            let report = verify_saturation(&c, tol::SATURATION_GAP).unwrap();
            assert!(
                (report.achieved.unwrap() - 2.0).abs() < 1e-9,
                "policy {policy:?}"
            );
        }
    }

    #[test]
    fn probabilities_sum_to_one_and_derivatives_to_zero() {
        let state = qubit_fixture(0.3, 0.8);
        let c = construct_optimal_measurement(&state, AncillaPolicy::Auto, 0.0).unwrap();
        let probs = crate::fisher::outcome_probabilities(&c.state_ext, &c.measurement.basis);
        let total: f64 = probs.iter().sum();
        assert!((total - 1.0).abs() < 1e-10);
        let derivs =
            crate::fisher::outcome_derivatives(&c.state_ext, &c.bundle.l_vectors, &c.measurement.basis);
        for j in 0..2 {
            let sum: f64 = derivs.iter().map(|row| row[j]).sum();
            assert!(sum.abs() < 1e-9);
        }
    }

    #[test]
    fn completeness_of_basis() {
        let state = squeezed_fixture(0.0, 0.0, 0.5);
        let c = construct_optimal_measurement(&state, AncillaPolicy::Auto, 0.0).unwrap();
        let d = c.measurement.dim;
        let mut resolution = CMatrix::zeros(d, d);
        for m in &c.measurement.basis {
            for i in 0..d {
                for j in 0..d {
                    resolution[(i, j)] += m[i] * m[j].conj();
                }
            }
        }
        assert!(resolution.max_abs_diff(&CMatrix::identity(d)) < 1e-9);
    }

    #[test]
    fn measurement_unitary_factorization_holds() {
        let state = qutrit_fixture(0.1, 0.7);
        let c = construct_optimal_measurement(&state, AncillaPolicy::Auto, 0.0).unwrap();
        // U = B A^{-1} = B A^dag; its rows are the bras of the basis kets.
        let u = c.measurement.b.to_complex().mul(&c.measurement.a.adjoint());
        for (m_idx, ket) in c.measurement.basis.iter().enumerate() {
            for k in 0..c.measurement.dim {
                let from_u = u[(m_idx, k)].conj();
                assert!((from_u - ket[k]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn varphi_sweep_keeps_saturation() {
        for &varphi in &[-0.3, 0.0, 0.2, 0.6] {
            let state = qubit_fixture(0.0, FRAC_PI_4);
            let c = construct_optimal_measurement(&state, AncillaPolicy::Auto, varphi).unwrap();
            let report = verify_saturation(&c, 1e-8).unwrap();
            assert!(
                (report.achieved.unwrap() - 1.0).abs() < 1e-8,
                "varphi {varphi}"
            );
        }
    }

    #[test]
    fn block_error_sums_match_lemma_value() {
        let state = qutrit_fixture(0.0, FRAC_PI_4);
        let c = construct_optimal_measurement(&state, AncillaPolicy::Auto, 0.0).unwrap();
        let eps = c.approximation_errors();
        let beta = c.blocks.betas[0];
        let expected = 1.0 - (1.0 - beta * beta).sqrt();
        assert!((eps[0] + eps[1] - expected).abs() < 1e-9);
    }

    #[test]
    fn optimal_observables_rejects_missing_perps() {
        let bundle = pure_bundle(&qubit_fixture(0.0, FRAC_PI_4), 2).unwrap();
        let (_, canonical, blocks) = canonical_parametrization(&bundle).unwrap();
        let err = optimal_observables(&canonical, &blocks, &[], 0.0, true).unwrap_err();
        assert!(matches!(err, Error::AncillaTooSmall { needed: 1, .. }));
        let _ = vec![0u8];
    }
}
