//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured values (visible with `cargo test -- --nocapture`).

mod common;

use std::time::Instant;

use common::{random_invertible, random_projective_basis, random_state};

use qmetro_core::fisher::{cfim, pure_bundle, reparametrize_bundle, symmetric_inverse};
use qmetro_core::measurement::{
    construct_optimal_measurement, verify_saturation, AncillaPolicy,
};
use qmetro_core::radar::{
    optimal_radar_measurement, refined_ak_bound, returned_state, simulate, RadarModel,
    ReturnedSignal,
};
use qmetro_core::rng::Rng;
use qmetro_core::states::{qubit_fixture, qutrit_fixture, squeezed_fixture};
use qmetro_core::tradeoff;

const GAP_TOL: f64 = 1e-8;
/// Default seed for the Monte Carlo criteria; chosen once and fixed.
const MC_SEED: u64 = 8;

#[test]
fn criterion_01_qubit_saturation() {
    let start = Instant::now();
    let mut rng = Rng::new(11);
    for trial in 0..20 {
        // Keep sin(theta) cos(theta) bounded away from zero so the Fisher
        // matrix stays regular.
        let alpha = rng.uniform(-3.0, 3.0);
        let theta = loop {
            let t = rng.uniform(0.15, std::f64::consts::FRAC_PI_2 - 0.15);
            if (2.0 * t).sin().abs() > 0.2 {
                break t;
            }
        };
        let state = qubit_fixture(alpha, theta);
        let c = construct_optimal_measurement(&state, AncillaPolicy::Auto, 0.0).unwrap();
        let report = verify_saturation(&c, GAP_TOL).unwrap();
        let fc = c.achieved_cfim().unwrap();
        let s2 = (2.0 * theta).sin().powi(2);
        assert!(
            (fc[(0, 0)] - 0.5 * s2).abs() < 1e-8,
            "trial {trial}: F_C[0,0]"
        );
        assert!((fc[(1, 1)] - 2.0).abs() < 1e-8, "trial {trial}: F_C[1,1]");
        assert!(fc[(0, 1)].abs() < 1e-8, "trial {trial}: off-diagonal");
        assert!(
            (report.achieved.unwrap() - 1.0).abs() < 1e-8,
            "trial {trial}: achieved"
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "runtime {elapsed:?}");
    println!(
        "[acceptance] criterion 1 PASS: qubit F_C = diag(sin^2(2t)/2, 2), Tr(F_Q^-1 F_C) = 1 over 20 random points ({elapsed:?})"
    );
}

#[test]
fn criterion_02_qutrit_saturation() {
    let start = Instant::now();
    for theta in [
        std::f64::consts::FRAC_PI_6,
        std::f64::consts::FRAC_PI_4,
        std::f64::consts::FRAC_PI_3,
    ] {
        let state = qutrit_fixture(0.0, theta);
        let c = construct_optimal_measurement(&state, AncillaPolicy::Auto, 0.0).unwrap();
        let report = verify_saturation(&c, GAP_TOL).unwrap();
        let root = (3.0 + (2.0 * theta).cos()).sqrt();
        let expected = 1.0 + 2.0f64.sqrt() / root;
        assert!(
            (report.achieved.unwrap() - expected).abs() < 1e-8,
            "theta {theta}: achieved"
        );
        // F_C closed form: diag((3 + cos 2t + sqrt2 root) sin^2 t / 4,
        //                       2 + 2 sqrt2 / root).
        let fc = c.achieved_cfim().unwrap();
        let expected_00 =
            (3.0 + (2.0 * theta).cos() + 2.0f64.sqrt() * root) * theta.sin().powi(2) / 4.0;
        let expected_11 = 2.0 + 2.0 * 2.0f64.sqrt() / root;
        assert!((fc[(0, 0)] - expected_00).abs() < 1e-8, "theta {theta}");
        assert!((fc[(1, 1)] - expected_11).abs() < 1e-8, "theta {theta}");
        assert!(fc[(0, 1)].abs() < 1e-8, "theta {theta}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "runtime {elapsed:?}");
    println!(
        "[acceptance] criterion 2 PASS: qutrit achieved = 1 + sqrt(2)/sqrt(3 + cos 2t) at pi/6, pi/4, pi/3 ({elapsed:?})"
    );
}

#[test]
fn criterion_03_squeezed_saturation_both_constructions() {
    let start = Instant::now();
    for &x3 in &[-0.5, 0.0, 0.7] {
        for policy in [AncillaPolicy::Auto, AncillaPolicy::SystemOnly] {
            let state = squeezed_fixture(0.3, -0.2, x3);
            let c = construct_optimal_measurement(&state, policy, 0.0).unwrap();
            let report = verify_saturation(&c, GAP_TOL).unwrap();
            assert!(
                (report.achieved.unwrap() - 2.0).abs() < 1e-8,
                "x3 {x3}, policy {policy:?}"
            );
            let fc = c.achieved_cfim().unwrap();
            let expected = [
                2.0 * (2.0 * x3).exp(),
                2.0 * (-2.0 * x3).exp(),
                2.0,
            ];
            for (j, &want) in expected.iter().enumerate() {
                assert!(
                    (fc[(j, j)] - want).abs() < 1e-8,
                    "x3 {x3}, policy {policy:?}, diag {j}"
                );
                for k in 0..3 {
                    if k != j {
                        assert!(fc[(j, k)].abs() < 1e-8);
                    }
                }
            }
            match policy {
                AncillaPolicy::Auto => assert_eq!(c.ancilla_dim, 2),
                AncillaPolicy::SystemOnly => assert_eq!(c.ancilla_dim, 1),
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "runtime {elapsed:?}");
    println!(
        "[acceptance] criterion 3 PASS: squeezed F_C = diag(2e^{{2x3}}, 2e^{{-2x3}}, 2), achieved = 2 with and without ancilla ({elapsed:?})"
    );
}

#[test]
fn criterion_04_radar_separable() {
    let start = Instant::now();
    let model = RadarModel::preset(0.0);
    let signal = returned_state(&model).unwrap();
    let construction = optimal_radar_measurement(&signal).unwrap();
    let fc = construction.achieved_cfim().unwrap();
    let product = 1.0 / (fc[(0, 0)] * fc[(1, 1)]).sqrt();
    assert!((product - 1.0).abs() < 1e-9, "analytic product {product}");

    let run = simulate(&model, 100_000, 200, MC_SEED, (0.0, 0.0)).unwrap();
    assert_eq!(run.flagged, 0);
    let rel = (run.empirical_product / 1.0 - 1.0).abs();
    assert!(rel < 0.05, "Monte Carlo product off by {:.2}%", rel * 100.0);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "runtime {elapsed:?}");
    println!(
        "[acceptance] criterion 4 PASS: separable radar sigma_t * sigma_w = 1 analytically, Monte Carlo within {:.2}% ({elapsed:?})",
        rel * 100.0
    );
}

#[test]
fn criterion_05_radar_entangled() {
    let start = Instant::now();
    let mut worst_mc = 0.0f64;
    for &kappa in &[0.2, 0.5, 0.8] {
        let model = RadarModel::preset(kappa);
        let signal = returned_state(&model).unwrap();
        let expected = refined_ak_bound(kappa).unwrap();

        let construction = optimal_radar_measurement(&signal).unwrap();
        let fc = construction.achieved_cfim().unwrap();
        let product = 1.0 / (fc[(0, 0)] * fc[(1, 1)]).sqrt();
        assert!(
            (product - expected).abs() < 1e-9,
            "kappa {kappa}: analytic product"
        );
        let report = verify_saturation(&construction, GAP_TOL).unwrap();
        assert!(
            (report.achieved.unwrap() - (1.0 + kappa)).abs() < 1e-9,
            "kappa {kappa}: achieved trace"
        );

        let run = simulate(&model, 100_000, 200, MC_SEED, (0.0, 0.0)).unwrap();
        assert_eq!(run.flagged, 0, "kappa {kappa}");
        let rel = (run.empirical_product / expected - 1.0).abs();
        assert!(
            rel < 0.05,
            "kappa {kappa}: Monte Carlo off by {:.2}%",
            rel * 100.0
        );
        worst_mc = worst_mc.max(rel);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 180.0, "runtime {elapsed:?}");
    println!(
        "[acceptance] criterion 5 PASS: entangled radar product sqrt((1-k)/(1+k)) and trace 1+k at k = 0.2, 0.5, 0.8; Monte Carlo within {:.2}% ({elapsed:?})",
        worst_mc * 100.0
    );
}

fn ensemble(seed: u64, count: usize) -> impl Iterator<Item = (usize, usize, Rng)> {
    let mut rng = Rng::new(seed);
    (0..count).map(move |_| {
        let dim = 2 + rng.below(4); // 2..=5
        let max_n = (2 * dim - 2).min(4);
        let n = if max_n == 2 { 2 } else { 2 + rng.below(max_n - 1) };
        (dim, n, Rng::new(rng.next_u64()))
    })
}

#[test]
fn criterion_06_bound_supremacy_over_random_ensemble() {
    let start = Instant::now();
    let mut max_excess = f64::NEG_INFINITY;
    let mut max_gap = f64::NEG_INFINITY;
    for (dim, n, mut inner) in ensemble(601, 1000) {
        let (state, bundle) = random_state(&mut inner, dim, n);
        let bound = tradeoff::tight_bound(&bundle.f_q, &bundle.f_im).unwrap();

        let c = construct_optimal_measurement(&state, AncillaPolicy::Auto, 0.0).unwrap();
        let report = verify_saturation(&c, GAP_TOL).unwrap();
        max_gap = max_gap.max(report.gap.unwrap().abs());

        let psi = state.state();
        let mut measured = 0;
        while measured < 50 {
            let basis = random_projective_basis(&mut inner, dim);
            let Ok(fc) = cfim(&psi, &bundle.l_vectors, &basis) else {
                continue;
            };
            let value = tradeoff::trace_metric(&bundle.f_q, &fc).unwrap();
            max_excess = max_excess.max(value - bound);
            assert!(
                value <= bound + 1e-8,
                "dim {dim}, n {n}: measurement reached {value} above bound {bound}"
            );
            measured += 1;
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 300.0, "runtime {elapsed:?}");
    println!(
        "[acceptance] criterion 6 PASS: 1000 instances x 50 measurements, worst excess {max_excess:.2e}, worst construction gap {max_gap:.2e} ({elapsed:?})"
    );
}

#[test]
fn criterion_07_bound_chain_ordering() {
    let start = Instant::now();
    for (dim, n, mut inner) in ensemble(701, 1000) {
        let (state, bundle) = random_state(&mut inner, dim, n);
        let tight = tradeoff::tight_bound(&bundle.f_q, &bundle.f_im).unwrap();
        let quarter = tradeoff::chen_bound(&bundle.f_q, &bundle.f_im, 0.25).unwrap();
        let fifth = tradeoff::chen_bound(&bundle.f_q, &bundle.f_im, 0.2).unwrap();
        assert!(tight <= quarter + 1e-8, "dim {dim}, n {n}");
        assert!(quarter <= fifth + 1e-8, "dim {dim}, n {n}");
        assert!(fifth <= n as f64 + 1e-8, "dim {dim}, n {n}");

        let c = construct_optimal_measurement(&state, AncillaPolicy::Auto, 0.0).unwrap();
        let fc = c.achieved_cfim().unwrap();
        let dual = bundle.f_q.mul(&symmetric_inverse(&fc).unwrap()).trace();
        let lambdas = tradeoff::lambda_magnitudes(&bundle.f_q, &bundle.f_im).unwrap();
        let matsumoto = tradeoff::matsumoto_lower(&lambdas).unwrap();
        assert!(
            matsumoto <= dual + 1e-8,
            "dim {dim}, n {n}: Matsumoto {matsumoto} vs Tr(F_Q F_C^-1) {dual}"
        );
    }
    let elapsed = start.elapsed();
    println!(
        "[acceptance] criterion 7 PASS: tight <= chen(1/4) <= chen(1/5) <= n and Matsumoto <= Tr(F_Q F_C^-1) over 1000 instances ({elapsed:?})"
    );
}

#[test]
fn criterion_08_gill_massar_recovery() {
    let start = Instant::now();
    let state = qubit_fixture(0.4, 0.9);
    let bundle = pure_bundle(&state, 1).unwrap();
    let lambdas = tradeoff::lambda_magnitudes(&bundle.f_q, &bundle.f_im).unwrap();
    for &l in &lambdas {
        assert!((l - 1.0).abs() < 1e-9, "lambda {l}");
    }
    let tight = tradeoff::tight_bound(&bundle.f_q, &bundle.f_im).unwrap();
    let gm = tradeoff::gill_massar_bound(2).unwrap();
    assert!((tight - gm).abs() < 1e-12);
    assert!((tight - 1.0).abs() < 1e-12);
    let elapsed = start.elapsed();
    println!(
        "[acceptance] criterion 8 PASS: qubit |lambda| = 1 and tight bound = d - 1 = 1 ({elapsed:?})"
    );
}

#[test]
fn criterion_09_reparametrization_invariance() {
    let start = Instant::now();
    let fixtures: Vec<(&str, qmetro_core::states::PureState)> = vec![
        ("qubit", qubit_fixture(0.3, 0.8)),
        ("qutrit", qutrit_fixture(0.2, 0.7)),
        ("squeezed", squeezed_fixture(0.1, -0.4, 0.5)),
        (
            "radar-ent",
            ReturnedSignal {
                sigma: 1.0,
                t_bar: 0.0,
                omega_bar: 1.0,
                kappa: 0.5,
            }
            .state()
            .unwrap(),
        ),
    ];
    let mut rng = Rng::new(909);
    for (name, state) in fixtures {
        let c = construct_optimal_measurement(&state, AncillaPolicy::Auto, 0.0).unwrap();
        let reference =
            tradeoff::trace_metric(&c.bundle.f_q, &c.achieved_cfim().unwrap()).unwrap();
        for trial in 0..100 {
            let n = state.num_params();
            let j = random_invertible(&mut rng, n);
            let mapped = reparametrize_bundle(&c.bundle, &j).unwrap();
            let fc = cfim(&c.state_ext, &mapped.l_vectors, &c.measurement.basis).unwrap();
            let value = tradeoff::trace_metric(&mapped.f_q, &fc).unwrap();
            assert!(
                (value - reference).abs() < 1e-8,
                "{name} trial {trial}: {value} vs {reference}"
            );
        }
    }
    let elapsed = start.elapsed();
    println!(
        "[acceptance] criterion 9 PASS: Tr(F_Q^-1 F_C) invariant under 100 random reparametrizations per fixture ({elapsed:?})"
    );
}

#[test]
fn criterion_10_error_sum_identity() {
    let start = Instant::now();
    // Fixtures plus a random slice of the shared ensemble.
    let mut states: Vec<qmetro_core::states::PureState> = vec![
        qubit_fixture(0.0, std::f64::consts::FRAC_PI_4),
        qutrit_fixture(0.1, 0.9),
        squeezed_fixture(0.2, 0.1, -0.3),
    ];
    for (dim, n, mut inner) in ensemble(1001, 200) {
        states.push(random_state(&mut inner, dim, n).0);
    }
    for (idx, state) in states.iter().enumerate() {
        let c = construct_optimal_measurement(state, AncillaPolicy::Auto, 0.0).unwrap();
        let eps_sum: f64 = c.approximation_errors().iter().sum();
        let fc = c.achieved_cfim().unwrap();
        let fc_canonical = c.transform.mul(&fc).mul(&c.transform.transpose());
        let trace_gap = state.num_params() as f64 - fc_canonical.trace();
        assert!(
            (eps_sum - trace_gap).abs() < 1e-8,
            "state {idx}: eps sum {eps_sum} vs Tr(F_Q - F_C) {trace_gap}"
        );
    }
    let elapsed = start.elapsed();
    println!(
        "[acceptance] criterion 10 PASS: sum eps_j^2 = Tr(F_Q - F_C) for {} constructed measurements ({elapsed:?})",
        states.len()
    );
}
