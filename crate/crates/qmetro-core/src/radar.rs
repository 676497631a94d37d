//! Range/velocity estimation with Gaussian radar pulses.
//!
//! A pulse reflected by a target moving at radial velocity `v` at range `x`
//! returns with its central time, frequency, and bandwidth mapped to
//! `t = t0 + 2x/(c - v)`, `omega = eta * omega0`, `sigma = eta * sigma0`
//! where `eta = (c - v)/(c + v)`. Range and velocity are therefore read off
//! the pair `(t_bar, omega_bar)`, whose estimation carries all the
//! incompatibility.
//!
//! Everything closes inside a three-dimensional embedded subspace: the
//! returned state, its derivatives, the SLD vectors, and the optimal
//! measurement. The single-photon pulse uses the Hermite-like modes of the
//! returned packet; the entangled bi-photon pulse (correlation `kappa`)
//! uses the symmetric/antisymmetric signal-idler combinations. Overlaps
//! between embeddings anchored at different parameter points are Gaussian
//! integrals with closed forms, which is what the Monte Carlo likelihood
//! evaluates.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;
#[allow(unused_imports)] // f64 float methods come from the trait in no_std builds
use num_traits::Float as _;

use crate::error::{Error, Result};
use crate::fisher::{fisher_bundle, sld_vectors, FisherBundle};
use crate::linalg::CVector;
use crate::measurement::{
    construct_optimal_measurement, AncillaPolicy, OptimalConstruction,
};
use crate::rng::Rng;
use crate::states::{PureState, StateFamily};
use crate::tol;

/// Physical description of the radar scene and pulse.
#[derive(Debug, Clone, Copy)]
pub struct RadarModel {
    /// Signal frequency bandwidth (rad/s).
    pub sigma0: f64,
    /// Signal central frequency (rad/s).
    pub omega0: f64,
    /// Pulse central time (s).
    pub t0: f64,
    /// Signal-idler correlation, `0 <= kappa < 1`; 0 means separable.
    pub kappa: f64,
    /// Idler bandwidth (rad/s).
    pub sigma_i0: f64,
    /// Idler central frequency (rad/s).
    pub omega_i0: f64,
    /// Speed of light (m/s).
    pub c: f64,
    /// Target range (m).
    pub x: f64,
    /// Radial velocity (m/s), positive receding.
    pub v: f64,
}

impl RadarModel {
    /// Natural-unit preset: unit bandwidth, unit speed of light, static
    /// target at the origin.
    pub fn preset(kappa: f64) -> Self {
        RadarModel {
            sigma0: 1.0,
            omega0: 1.0,
            t0: 0.0,
            kappa,
            sigma_i0: 1.0,
            omega_i0: 1.0,
            c: 1.0,
            x: 0.0,
            v: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.kappa) {
            return Err(Error::InvalidArgument(alloc::format!(
                "kappa must lie in [0, 1), got {}",
                self.kappa
            )));
        }
        if self.v.abs() >= self.c {
            return Err(Error::InvalidArgument(alloc::format!(
                "|v| = {} must stay below c = {}",
                self.v.abs(),
                self.c
            )));
        }
        if self.sigma0 <= 0.0 {
            return Err(Error::InvalidArgument("sigma0 must be positive".into()));
        }
        Ok(())
    }
}

/// Returned-pulse parameters and the embedding they define.
#[derive(Debug, Clone, Copy)]
pub struct ReturnedSignal {
    pub sigma: f64,
    pub t_bar: f64,
    pub omega_bar: f64,
    pub kappa: f64,
}

/// Apply the reflection map to the outgoing pulse.
pub fn returned_state(model: &RadarModel) -> Result<ReturnedSignal> {
    model.validate()?;
    let doppler = (model.c - model.v) / (model.c + model.v);
    Ok(ReturnedSignal {
        sigma: doppler * model.sigma0,
        t_bar: model.t0 + 2.0 * model.x / (model.c - model.v),
        omega_bar: doppler * model.omega0,
        kappa: model.kappa,
    })
}

/// Embedded three-mode family for the returned pulse, parameters
/// `(t_bar, omega_bar)`. The basis co-moves with the anchor, so the
/// evaluator is constant and the derivatives are the analytic expansions.
#[derive(Debug)]
struct RadarFamily {
    sigma: f64,
    kappa: f64,
}

impl StateFamily for RadarFamily {
    fn dim(&self) -> usize {
        3
    }
    fn num_params(&self) -> usize {
        2
    }
    fn psi(&self, _x: &[f64]) -> CVector {
        CVector::basis(3, 0)
    }
    fn dpsi(&self, j: usize, x: &[f64]) -> Option<CVector> {
        let omega = x[1];
        let sigma = self.sigma;
        let kappa = self.kappa;
        let mut d = CVector::zeros(3);
        if self.kappa == 0.0 {
            // Single photon: modes (packet, first Hermite, second Hermite).
            match j {
                0 => {
                    d[0] = C64::new(0.0, omega);
                    d[1] = C64::new(sigma, 0.0);
                }
                _ => {
                    d[1] = C64::new(0.0, -1.0 / (2.0 * sigma));
                }
            }
        } else {
            // Bi-photon: modes (packet, symmetric, antisymmetric).
            match j {
                0 => {
                    d[0] = C64::new(0.0, omega);
                    d[1] = C64::new(sigma * ((1.0 - kappa) / 2.0).sqrt(), 0.0);
                    d[2] = C64::new(sigma * ((1.0 + kappa) / 2.0).sqrt(), 0.0);
                }
                _ => {
                    d[1] = C64::new(0.0, -1.0 / (2.0 * sigma * (2.0 * (1.0 - kappa)).sqrt()));
                    d[2] = C64::new(0.0, -1.0 / (2.0 * sigma * (2.0 * (1.0 + kappa)).sqrt()));
                }
            }
        }
        Some(d)
    }
}

impl ReturnedSignal {
    /// The embedded state anchored at given `(t_bar, omega_bar)`.
    pub fn embedded_state(&self, t_bar: f64, omega_bar: f64) -> Result<PureState> {
        PureState::new(
            Arc::new(RadarFamily {
                sigma: self.sigma,
                kappa: self.kappa,
            }),
            vec![t_bar, omega_bar],
        )
    }

    /// The embedded state at the returned-pulse parameters.
    pub fn state(&self) -> Result<PureState> {
        self.embedded_state(self.t_bar, self.omega_bar)
    }

    /// Closed-form overlaps `c_j = <e_j(anchor) | psi(t, omega)>` together
    /// with their derivatives in `t` and `omega`.
    pub fn overlaps(&self, anchor: (f64, f64), at: (f64, f64)) -> Overlaps {
        let sigma = self.sigma;
        let (t_ref, w_ref) = anchor;
        let (t, w) = at;
        let delta = t - t_ref;
        let dw = w - w_ref;

        if self.kappa == 0.0 {
            // G = exp(-s^2 d^2/2 - dw^2/(8 s^2) + i(d w_ref + d dw / 2)).
            let expo = C64::new(
                -sigma * sigma * delta * delta / 2.0 - dw * dw / (8.0 * sigma * sigma),
                delta * w_ref + delta * dw / 2.0,
            );
            let g = expo.exp();
            let g_t = C64::new(-sigma * sigma * delta, w_ref + dw / 2.0);
            let g_w = C64::new(-dw / (4.0 * sigma * sigma), delta / 2.0);

            let p2 = C64::new(sigma * delta, -dw / (2.0 * sigma));
            let p2_t = C64::new(sigma, 0.0);
            let p2_w = C64::new(0.0, -1.0 / (2.0 * sigma));

            let inv_sqrt2 = core::f64::consts::FRAC_1_SQRT_2;
            let p3 = C64::new(
                -sigma * sigma * delta * delta + dw * dw / (4.0 * sigma * sigma),
                delta * dw,
            ) * inv_sqrt2;
            let p3_t = C64::new(-2.0 * sigma * sigma * delta, dw) * inv_sqrt2;
            let p3_w = C64::new(dw / (2.0 * sigma * sigma), delta) * inv_sqrt2;

            Overlaps {
                c: [g, p2 * g, p3 * g],
                dt: [g_t * g, (p2_t + p2 * g_t) * g, (p3_t + p3 * g_t) * g],
                dw: [g_w * g, (p2_w + p2 * g_w) * g, (p3_w + p3 * g_w) * g],
            }
        } else {
            let kappa = self.kappa;
            let one_m = 1.0 - kappa;
            let one_p = 1.0 + kappa;
            let expo = C64::new(
                -sigma * sigma * delta * delta / 2.0
                    - dw * dw / (8.0 * sigma * sigma * (1.0 - kappa * kappa)),
                delta * w_ref + delta * dw / 2.0,
            );
            let g = expo.exp();
            let g_t = C64::new(-sigma * sigma * delta, w_ref + dw / 2.0);
            let g_w = C64::new(
                -dw / (4.0 * sigma * sigma * (1.0 - kappa * kappa)),
                delta / 2.0,
            );

            let amp2 = (2.0 * one_m).sqrt();
            let p2 = C64::new(sigma * delta / 2.0, -dw / (4.0 * sigma * one_m)) * amp2;
            let p2_t = C64::new(sigma / 2.0, 0.0) * amp2;
            let p2_w = C64::new(0.0, -1.0 / (4.0 * sigma * one_m)) * amp2;

            let amp3 = (2.0 * one_p).sqrt();
            let p3 = C64::new(sigma * delta / 2.0, -dw / (4.0 * sigma * one_p)) * amp3;
            let p3_t = C64::new(sigma / 2.0, 0.0) * amp3;
            let p3_w = C64::new(0.0, -1.0 / (4.0 * sigma * one_p)) * amp3;

            Overlaps {
                c: [g, p2 * g, p3 * g],
                dt: [g_t * g, (p2_t + p2 * g_t) * g, (p3_t + p3 * g_t) * g],
                dw: [g_w * g, (p2_w + p2 * g_w) * g, (p3_w + p3 * g_w) * g],
            }
        }
    }
}

/// Embedded-basis overlap amplitudes and their parameter derivatives.
#[derive(Debug, Clone, Copy)]
pub struct Overlaps {
    pub c: [C64; 3],
    pub dt: [C64; 3],
    pub dw: [C64; 3],
}

/// Fisher bundle of the returned pulse for `(t_bar, omega_bar)`.
pub fn radar_fisher(signal: &ReturnedSignal) -> Result<FisherBundle> {
    fisher_bundle(sld_vectors(&signal.state()?, 1)?)
}

/// Lower bound on the product of estimator standard deviations
/// `sigma_t sigma_omega` for correlation `kappa`:
/// `sqrt((1 - kappa) / (1 + kappa))`.
pub fn refined_ak_bound(kappa: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&kappa) {
        return Err(Error::InvalidArgument(alloc::format!(
            "kappa must lie in [0, 1), got {kappa}"
        )));
    }
    Ok(((1.0 - kappa) / (1.0 + kappa)).sqrt())
}

/// Optimal three-outcome measurement in the embedded subspace, anchored at
/// the signal's own parameters.
pub fn optimal_radar_measurement(signal: &ReturnedSignal) -> Result<OptimalConstruction> {
    construct_optimal_measurement(&signal.state()?, AncillaPolicy::SystemOnly, 0.0)
}

/// Result of a Monte Carlo estimation run.
#[derive(Debug, Clone)]
pub struct EstimationRun {
    /// Shots per batch.
    pub shots: u64,
    pub batches: u32,
    /// Aggregate outcome counts over all batches; the last slot is the
    /// residual outcome outside the embedded subspace (zero probability when
    /// the measurement is anchored at the truth). Sums to `shots * batches`.
    pub outcome_counts: Vec<u64>,
    /// Per-batch maximum-likelihood estimates `(t_hat, omega_hat)` for the
    /// batches whose scoring converged.
    pub estimates: Vec<(f64, f64)>,
    /// Batches excluded for non-convergent scoring.
    pub flagged: usize,
    /// Sample covariance of the batch estimates.
    pub empirical_cov: [[f64; 2]; 2],
    /// Local bound `(shots * F_C)^{-1}` at the true parameters.
    pub predicted_cov: [[f64; 2]; 2],
    /// Per-shot `sigma_t sigma_omega` from the measurement's Fisher matrix.
    pub analytic_product: f64,
    /// Per-shot product from the empirical covariance (scaled by `shots`).
    pub empirical_product: f64,
}

struct LikelihoodModel {
    signal: ReturnedSignal,
    anchor: (f64, f64),
    /// Measurement kets in the anchored embedded basis.
    kets: Vec<[C64; 3]>,
}

impl LikelihoodModel {
    /// Outcome probabilities and derivative rows at `(t, w)`; the final
    /// entry is the residual outcome.
    fn distribution(&self, t: f64, w: f64) -> (Vec<f64>, Vec<[f64; 2]>) {
        let ov = self.signal.overlaps(self.anchor, (t, w));
        let mut probs = Vec::with_capacity(self.kets.len() + 1);
        let mut derivs = Vec::with_capacity(self.kets.len() + 1);
        let mut p_sum = 0.0;
        let mut d_sum = [0.0f64; 2];
        for ket in &self.kets {
            let mut amp = C64::new(0.0, 0.0);
            let mut amp_t = C64::new(0.0, 0.0);
            let mut amp_w = C64::new(0.0, 0.0);
            for (j, entry) in ket.iter().enumerate() {
                let conj = entry.conj();
                amp += conj * ov.c[j];
                amp_t += conj * ov.dt[j];
                amp_w += conj * ov.dw[j];
            }
            let p = amp.norm_sqr();
            let dp_t = 2.0 * (amp.conj() * amp_t).re;
            let dp_w = 2.0 * (amp.conj() * amp_w).re;
            probs.push(p);
            derivs.push([dp_t, dp_w]);
            p_sum += p;
            d_sum[0] += dp_t;
            d_sum[1] += dp_w;
        }
        probs.push((1.0 - p_sum).max(0.0));
        derivs.push([-d_sum[0], -d_sum[1]]);
        (probs, derivs)
    }

    fn log_likelihood(&self, counts: &[u64], t: f64, w: f64) -> f64 {
        let (probs, _) = self.distribution(t, w);
        let mut total = 0.0;
        for (&n, &p) in counts.iter().zip(&probs) {
            if n > 0 {
                total += n as f64 * p.max(1e-300).ln();
            }
        }
        total
    }

    /// Expected per-shot Fisher information at `(t, w)`.
    fn fisher_matrix(&self, t: f64, w: f64) -> [[f64; 2]; 2] {
        let (probs, derivs) = self.distribution(t, w);
        let mut info = [[0.0f64; 2]; 2];
        for (p, d) in probs.iter().zip(&derivs) {
            if *p < tol::PROBABILITY_FLOOR {
                continue;
            }
            for a in 0..2 {
                for b in 0..2 {
                    info[a][b] += d[a] * d[b] / p;
                }
            }
        }
        info
    }
}

fn solve_2x2(m: &[[f64; 2]; 2], rhs: [f64; 2]) -> Option<[f64; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det.abs() < 1e-300 {
        return None;
    }
    Some([
        (m[1][1] * rhs[0] - m[0][1] * rhs[1]) / det,
        (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / det,
    ])
}

fn invert_2x2(m: &[[f64; 2]; 2]) -> Option<[[f64; 2]; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det.abs() < 1e-300 {
        return None;
    }
    Some([
        [m[1][1] / det, -m[0][1] / det],
        [-m[1][0] / det, m[0][0] / det],
    ])
}

const MAX_SCORING_ITERATIONS: usize = 100;

/// Fisher scoring for one batch of counts. Returns `None` when scoring does
/// not converge.
fn fisher_scoring(
    model: &LikelihoodModel,
    counts: &[u64],
    start: (f64, f64),
) -> Option<(f64, f64)> {
    let mut x = [start.0, start.1];
    let shots: f64 = counts.iter().map(|&n| n as f64).sum();
    let mut loglik = model.log_likelihood(counts, x[0], x[1]);
    for _ in 0..MAX_SCORING_ITERATIONS {
        let (probs, derivs) = model.distribution(x[0], x[1]);
        let mut score = [0.0f64; 2];
        let mut info = [[0.0f64; 2]; 2];
        for ((&n, p), d) in counts.iter().zip(&probs).zip(&derivs) {
            if *p < tol::PROBABILITY_FLOOR {
                if n > 0 {
                    return None;
                }
                continue;
            }
            for a in 0..2 {
                score[a] += n as f64 * d[a] / p;
                for b in 0..2 {
                    info[a][b] += shots * d[a] * d[b] / p;
                }
            }
        }
        let step = solve_2x2(&info, score)?;
        // Damp on non-increase of the log-likelihood.
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let candidate = [x[0] + scale * step[0], x[1] + scale * step[1]];
            let candidate_ll = model.log_likelihood(counts, candidate[0], candidate[1]);
            if candidate_ll >= loglik {
                x = candidate;
                loglik = candidate_ll;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            // No uphill direction left at this resolution: converged.
            return Some((x[0], x[1]));
        }
        let moved = (scale * step[0]).abs().max((scale * step[1]).abs());
        if moved < 1e-10 {
            return Some((x[0], x[1]));
        }
    }
    None
}

/// Monte Carlo estimation with the optimal measurement.
///
/// Outcomes are sampled i.i.d. at the true parameters with a seeded
/// generator (independent stream per batch), then each batch is fed to a
/// Fisher-scoring maximum-likelihood estimator initialized a few bound
/// standard deviations away from the truth. `reference_offset` displaces
/// the measurement anchor from the truth to exercise misspecification.
pub fn simulate(
    model: &RadarModel,
    shots: u64,
    batches: u32,
    seed: u64,
    reference_offset: (f64, f64),
) -> Result<EstimationRun> {
    if shots == 0 || batches == 0 {
        return Err(Error::InvalidArgument(
            "shots and batches must be positive".into(),
        ));
    }
    let signal = returned_state(model)?;
    let truth = (signal.t_bar, signal.omega_bar);
    let anchor = (truth.0 + reference_offset.0, truth.1 + reference_offset.1);

    let anchored = ReturnedSignal {
        t_bar: anchor.0,
        omega_bar: anchor.1,
        ..signal
    };
    let construction = optimal_radar_measurement(&anchored)?;
    let kets: Vec<[C64; 3]> = construction
        .measurement
        .basis
        .iter()
        .map(|m| [m[0], m[1], m[2]])
        .collect();
    let outcome_slots = kets.len() + 1;
    let likelihood = LikelihoodModel {
        signal,
        anchor,
        kets,
    };

    let (p_true, _) = likelihood.distribution(truth.0, truth.1);
    let info_true = likelihood.fisher_matrix(truth.0, truth.1);
    let per_shot_cov = invert_2x2(&info_true).ok_or_else(|| {
        Error::NumericalInconsistency("measurement Fisher matrix is singular".into())
    })?;
    let predicted_cov = [
        [
            per_shot_cov[0][0] / shots as f64,
            per_shot_cov[0][1] / shots as f64,
        ],
        [
            per_shot_cov[1][0] / shots as f64,
            per_shot_cov[1][1] / shots as f64,
        ],
    ];
    let per_shot_product = (per_shot_cov[0][0] * per_shot_cov[1][1]).sqrt();

    // Cumulative distribution for sampling.
    let mut cdf = Vec::with_capacity(outcome_slots);
    let mut acc = 0.0;
    for &p in &p_true {
        acc += p;
        cdf.push(acc);
    }

    let start = (
        truth.0 + 4.0 * predicted_cov[0][0].sqrt(),
        truth.1 - 4.0 * predicted_cov[1][1].sqrt(),
    );

    let mut outcome_counts = vec![0u64; outcome_slots];
    let mut estimates = Vec::with_capacity(batches as usize);
    let mut flagged = 0usize;

    for batch in 0..batches {
        let mut rng = Rng::stream(seed, batch as u64);
        let mut counts = vec![0u64; outcome_slots];
        for _ in 0..shots {
            let u = rng.next_f64() * acc;
            let mut outcome = outcome_slots - 1;
            for (idx, &edge) in cdf.iter().enumerate() {
                if u < edge {
                    outcome = idx;
                    break;
                }
            }
            counts[outcome] += 1;
        }
        for (total, &n) in outcome_counts.iter_mut().zip(&counts) {
            *total += n;
        }
        match fisher_scoring(&likelihood, &counts, start) {
            Some(est) => estimates.push(est),
            None => flagged += 1,
        }
    }

    let empirical_cov = sample_covariance(&estimates);
    let empirical_product =
        shots as f64 * (empirical_cov[0][0] * empirical_cov[1][1]).sqrt();

    Ok(EstimationRun {
        shots,
        batches,
        outcome_counts,
        estimates,
        flagged,
        empirical_cov,
        predicted_cov,
        analytic_product: per_shot_product,
        empirical_product,
    })
}

fn sample_covariance(samples: &[(f64, f64)]) -> [[f64; 2]; 2] {
    let n = samples.len();
    if n < 2 {
        return [[0.0; 2]; 2];
    }
    let mean = samples.iter().fold((0.0, 0.0), |acc, s| {
        (acc.0 + s.0 / n as f64, acc.1 + s.1 / n as f64)
    });
    let mut cov = [[0.0f64; 2]; 2];
    for s in samples {
        let d = [s.0 - mean.0, s.1 - mean.1];
        for a in 0..2 {
            for b in 0..2 {
                cov[a][b] += d[a] * d[b] / (n - 1) as f64;
            }
        }
    }
    cov
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::verify_saturation;
    use crate::rng::Rng;
    use crate::states::finite_difference_derivative;
    use crate::tradeoff;

    #[test]
    fn returned_pulse_closed_forms() {
        let mut model = RadarModel::preset(0.0);
        assert!((returned_state(&model).unwrap().sigma - 1.0).abs() < 1e-15);

        model.x = 1.5;
        let sig = returned_state(&model).unwrap();
        assert!((sig.t_bar - 3.0).abs() < 1e-15);

        model.v = model.c / 3.0;
        let sig = returned_state(&model).unwrap();
        assert!((sig.sigma - 0.5).abs() < 1e-15);
        assert!((sig.omega_bar - 0.5).abs() < 1e-15);
    }

    #[test]
    fn transform_identities_over_random_scenes() {
        let mut rng = Rng::new(404);
        for _ in 0..200 {
            let model = RadarModel {
                sigma0: rng.uniform(0.5, 2.0),
                omega0: rng.uniform(0.5, 3.0),
                t0: rng.uniform(-1.0, 1.0),
                kappa: 0.0,
                sigma_i0: 1.0,
                omega_i0: 1.0,
                c: 1.0,
                x: rng.uniform(0.0, 5.0),
                v: rng.uniform(-0.9, 0.9),
            };
            let sig = returned_state(&model).unwrap();
            let eta = (model.c - model.v) / (model.c + model.v);
            assert!((sig.sigma - eta * model.sigma0).abs() < 1e-12);
            assert!((sig.omega_bar - eta * model.omega0).abs() < 1e-12);
            assert!((sig.t_bar - (model.t0 + 2.0 * model.x / (model.c - model.v))).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_superluminal_target() {
        let mut model = RadarModel::preset(0.0);
        model.v = 1.5;
        assert!(matches!(
            returned_state(&model),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn single_photon_fisher_closed_form() {
        let sig = ReturnedSignal {
            sigma: 1.0,
            t_bar: 0.0,
            omega_bar: 1.0,
            kappa: 0.0,
        };
        let bundle = radar_fisher(&sig).unwrap();
        assert!((bundle.f_q[(0, 0)] - 4.0).abs() < 1e-12);
        assert!((bundle.f_q[(1, 1)] - 1.0).abs() < 1e-12);
        assert!((bundle.f_im[(0, 1)] + 2.0).abs() < 1e-12);
        assert!((bundle.f_im[(1, 0)] - 2.0).abs() < 1e-12);
        let lambdas = tradeoff::lambda_magnitudes(&bundle.f_q, &bundle.f_im).unwrap();
        assert_eq!(lambdas, alloc::vec![1.0, 1.0]);
    }

    #[test]
    fn biphoton_fisher_closed_form() {
        for &kappa in &[0.2, 0.6, 0.9] {
            let sig = ReturnedSignal {
                sigma: 1.3,
                t_bar: 0.2,
                omega_bar: 0.7,
                kappa,
            };
            let bundle = radar_fisher(&sig).unwrap();
            let s2 = sig.sigma * sig.sigma;
            assert!((bundle.f_q[(0, 0)] - 4.0 * s2).abs() < 1e-10);
            assert!((bundle.f_q[(1, 1)] - 1.0 / (s2 * (1.0 - kappa * kappa))).abs() < 1e-10);
            assert!((bundle.f_im[(0, 1)] + 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn refined_bound_values() {
        assert!((refined_ak_bound(0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((refined_ak_bound(0.8).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!(refined_ak_bound(1.0).is_err());
        // kappa -> 1 sends the bound to zero.
        assert!(refined_ak_bound(1.0 - 1e-9).unwrap() < 3e-5);
    }

    #[test]
    fn optimal_measurement_cfim_closed_form() {
        for &kappa in &[0.0, 0.5] {
            let sig = ReturnedSignal {
                sigma: 1.0,
                t_bar: 0.0,
                omega_bar: 1.0,
                kappa,
            };
            let construction = optimal_radar_measurement(&sig).unwrap();
            assert_eq!(construction.measurement.outcomes(), 3);
            let fc = construction.achieved_cfim().unwrap();
            assert!((fc[(0, 0)] - 2.0 * (1.0 + kappa)).abs() < 1e-9, "kappa {kappa}");
            assert!(
                (fc[(1, 1)] - 1.0 / (2.0 * (1.0 - kappa))).abs() < 1e-9,
                "kappa {kappa}"
            );
            let report = verify_saturation(&construction, tol::SATURATION_GAP).unwrap();
            assert!((report.achieved.unwrap() - (1.0 + kappa)).abs() < 1e-9);
        }
    }

    #[test]
    fn overlap_derivatives_match_finite_differences() {
        for &kappa in &[0.0, 0.4] {
            let sig = ReturnedSignal {
                sigma: 1.2,
                t_bar: 0.3,
                omega_bar: 0.9,
                kappa,
            };
            let anchor = (0.3, 0.9);
            let at = (0.35, 0.82);
            let h = 1e-6;
            let ov = sig.overlaps(anchor, at);
            let plus_t = sig.overlaps(anchor, (at.0 + h, at.1));
            let minus_t = sig.overlaps(anchor, (at.0 - h, at.1));
            let plus_w = sig.overlaps(anchor, (at.0, at.1 + h));
            let minus_w = sig.overlaps(anchor, (at.0, at.1 - h));
            for j in 0..3 {
                let fd_t = (plus_t.c[j] - minus_t.c[j]) / C64::new(2.0 * h, 0.0);
                let fd_w = (plus_w.c[j] - minus_w.c[j]) / C64::new(2.0 * h, 0.0);
                assert!((fd_t - ov.dt[j]).norm() < 1e-7, "kappa {kappa} mode {j}");
                assert!((fd_w - ov.dw[j]).norm() < 1e-7, "kappa {kappa} mode {j}");
            }
        }
    }

    #[test]
    fn overlap_gradient_matches_embedded_derivative_at_anchor() {
        // Finite differences of the overlap amplitudes recover the analytic
        // embedded derivatives (after projecting out the phase mode).
        for &kappa in &[0.0, 0.5] {
            let sig = ReturnedSignal {
                sigma: 0.8,
                t_bar: -0.1,
                omega_bar: 1.4,
                kappa,
            };
            let state = sig.state().unwrap();
            let psi = state.state();
            let anchor = (sig.t_bar, sig.omega_bar);
            let ov = sig.overlaps(anchor, anchor);
            for j in 0..2 {
                let analytic = state.derivative(j).unwrap();
                let grad = if j == 0 { ov.dt } else { ov.dw };
                let grad_vec = CVector::from_entries(alloc::vec![grad[0], grad[1], grad[2]]);
                let proj_a = crate::states::project_derivative(&psi, &analytic);
                let proj_g = crate::states::project_derivative(&psi, &grad_vec);
                assert!(proj_a.sub(&proj_g).norm() < 1e-7, "kappa {kappa} param {j}");
            }
        }
        // And the phase-aligned finite difference of the embedded family
        // reproduces the same projected derivative through the overlaps.
        let sig = ReturnedSignal {
            sigma: 1.0,
            t_bar: 0.0,
            omega_bar: 1.0,
            kappa: 0.0,
        };
        let state = sig.state().unwrap();
        let fd = finite_difference_derivative(&state, 0, 1e-6);
        // Constant evaluator: plain finite difference vanishes by design.
        assert!(fd.unwrap().norm() < 1e-10);
    }

    #[test]
    fn simulation_short_run_is_deterministic_and_sane() {
        let model = RadarModel::preset(0.5);
        let run_a = simulate(&model, 20_000, 12, 7, (0.0, 0.0)).unwrap();
        let run_b = simulate(&model, 20_000, 12, 7, (0.0, 0.0)).unwrap();
        assert_eq!(run_a.outcome_counts, run_b.outcome_counts);
        assert_eq!(run_a.estimates.len(), run_b.estimates.len());
        assert_eq!(run_a.flagged, 0);
        // Residual outcome never fires when anchored at the truth.
        assert_eq!(*run_a.outcome_counts.last().unwrap(), 0);
        let total: u64 = run_a.outcome_counts.iter().sum();
        assert_eq!(total, 20_000 * 12);
        // Covariance strictly positive at finite shot count.
        assert!(run_a.empirical_cov[0][0] > 0.0);
        assert!(run_a.empirical_cov[1][1] > 0.0);
        // Within 25% of the bound product on this short run.
        let expected = refined_ak_bound(0.5).unwrap();
        assert!((run_a.empirical_product / expected - 1.0).abs() < 0.25);
        assert!((run_a.analytic_product - expected).abs() < 1e-9);
    }

    #[test]
    fn misspecified_anchor_still_estimates() {
        let model = RadarModel::preset(0.0);
        let run = simulate(&model, 20_000, 8, 3, (0.02, -0.03)).unwrap();
        assert!(run.flagged <= 1);
        // Residual outcome can now fire, but stays rare for small offsets.
        let residual = *run.outcome_counts.last().unwrap() as f64;
        let total: u64 = run.outcome_counts.iter().sum();
        assert!(residual / (total as f64) < 0.01);
    }
}
