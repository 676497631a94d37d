//! Shared generators for the randomized suites.

use num_complex::Complex64 as C64;

use qmetro_core::fisher::{pure_bundle, FisherBundle};
use qmetro_core::linalg::{complete_basis, gram_schmidt, CVector, RMatrix};
use qmetro_core::rng::Rng;
use qmetro_core::states::{state_from_vectors, PureState};

pub fn random_complex_vector(rng: &mut Rng, dim: usize) -> CVector {
    CVector::from_entries(
        (0..dim)
            .map(|_| C64::new(rng.standard_normal(), rng.standard_normal()))
            .collect(),
    )
}

/// Random pure state with `n` identifiable parameters in dimension `dim`:
/// explicit unit vector plus derivative vectors adjusted to preserve the
/// norm, resampled until the quantum Fisher matrix is well conditioned.
pub fn random_state(rng: &mut Rng, dim: usize, n: usize) -> (PureState, FisherBundle) {
    assert!(n <= 2 * dim - 2, "at most 2d-2 parameters are identifiable");
    loop {
        let psi = random_complex_vector(rng, dim)
            .normalized()
            .expect("nonzero with probability one");
        let mut dpsi = Vec::with_capacity(n);
        for _ in 0..n {
            let mut d = random_complex_vector(rng, dim).scale(C64::new(rng.uniform(0.4, 1.6), 0.0));
            // Cancel the real part of <psi|d> so the family preserves norm.
            let re = psi.inner(&d).re;
            d.axpy(C64::new(-re, 0.0), &psi);
            dpsi.push(d);
        }
        let Ok(state) = state_from_vectors(psi, dpsi) else {
            continue;
        };
        let Ok(bundle) = pure_bundle(&state, 1) else {
            continue;
        };
        if well_conditioned(&bundle.f_q) {
            return (state, bundle);
        }
    }
}

fn well_conditioned(f_q: &RMatrix) -> bool {
    match qmetro_core::linalg::symmetric_eigen(f_q) {
        Ok((values, _)) => {
            let max = values.last().copied().unwrap_or(0.0);
            let min = values.first().copied().unwrap_or(0.0);
            min > 1e-3 * max.max(1.0)
        }
        Err(_) => false,
    }
}

/// Haar-ish random projective basis of the given dimension.
pub fn random_projective_basis(rng: &mut Rng, dim: usize) -> Vec<CVector> {
    loop {
        let seed: Vec<CVector> = (0..dim).map(|_| random_complex_vector(rng, dim)).collect();
        let gs = gram_schmidt(&seed, 1e-12).expect("same dimensions");
        if gs.vectors.len() == dim {
            return gs.vectors;
        }
        // Dependent draw (measure zero): complete and retry for safety.
        if let Ok(full) = complete_basis(&gs.vectors, dim) {
            return full;
        }
    }
}

/// Random invertible real matrix with determinant bounded away from zero.
pub fn random_invertible(rng: &mut Rng, n: usize) -> RMatrix {
    loop {
        let mut m = RMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = rng.standard_normal();
            }
        }
        if let Ok((values, _)) = qmetro_core::linalg::symmetric_eigen(&m.mul(&m.transpose())) {
            if values.first().copied().unwrap_or(0.0) > 1e-3 {
                return m;
            }
        }
    }
}
