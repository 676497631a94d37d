//! Command implementations.

use qmetro_core::fisher::pure_bundle;
use qmetro_core::measurement::{
    construct_optimal_measurement, verify_saturation, AncillaPolicy, OptimalConstruction,
};
use qmetro_core::radar::{
    refined_ak_bound, returned_state, simulate, RadarModel, ReturnedSignal,
};
use qmetro_core::states::PureState;
use qmetro_core::tradeoff;

use crate::args::ParsedArgs;
use crate::report::{emit, fmt_f64, measurement_doc, report_doc, to_json_pretty, RadarDoc};
use crate::{descriptor, gap_tolerance, CliError, CliResult};

const DEFAULT_SEED: u64 = 8;

fn ancilla_policy(args: &ParsedArgs) -> CliResult<AncillaPolicy> {
    match args.get("ancilla") {
        None | Some("auto") => Ok(AncillaPolicy::Auto),
        Some("none") => Ok(AncillaPolicy::SystemOnly),
        Some(other) => Err(CliError::usage(format!(
            "--ancilla expects auto or none, got {other:?}"
        ))),
    }
}

enum Prepared {
    State(String, PureState),
    Radar(String, ReturnedSignal),
}

fn prepare_example(args: &ParsedArgs) -> CliResult<Prepared> {
    let name = args
        .get("example")
        .ok_or_else(|| CliError::usage("example requires --example NAME"))?;
    let params = args.get_f64_list("params")?;
    let expect = |n: usize, defaults: &[f64]| -> CliResult<Vec<f64>> {
        match &params {
            None => Ok(defaults.to_vec()),
            Some(p) if p.len() == n => Ok(p.clone()),
            Some(p) => Err(CliError::usage(format!(
                "{name} expects {n} parameters via --params, got {}",
                p.len()
            ))),
        }
    };
    match name {
        "qubit" => {
            let p = expect(2, &[0.0, std::f64::consts::FRAC_PI_4])?;
            Ok(Prepared::State(
                name.to_string(),
                qmetro_core::states::qubit_fixture(p[0], p[1]),
            ))
        }
        "qutrit" => {
            let p = expect(2, &[0.0, std::f64::consts::FRAC_PI_4])?;
            Ok(Prepared::State(
                name.to_string(),
                qmetro_core::states::qutrit_fixture(p[0], p[1]),
            ))
        }
        "squeezed" => {
            let p = expect(3, &[0.0, 0.0, 0.0])?;
            Ok(Prepared::State(
                name.to_string(),
                qmetro_core::states::squeezed_fixture(p[0], p[1], p[2]),
            ))
        }
        "radar-sep" | "radar-ent" => {
            let p = expect(3, &[1.0, 0.0, 1.0])?; // sigma, t_bar, omega_bar
            let kappa = if name == "radar-sep" {
                0.0
            } else {
                args.get_f64("kappa")?.unwrap_or(0.6)
            };
            if !(0.0..1.0).contains(&kappa) {
                return Err(CliError::usage(format!(
                    "kappa must lie in [0, 1), got {kappa}"
                )));
            }
            if p[0] <= 0.0 {
                return Err(CliError::usage("sigma must be positive"));
            }
            Ok(Prepared::Radar(
                name.to_string(),
                ReturnedSignal {
                    sigma: p[0],
                    t_bar: p[1],
                    omega_bar: p[2],
                    kappa,
                },
            ))
        }
        other => Err(CliError::usage(format!(
            "unknown example {other:?}; expected qubit, qutrit, squeezed, radar-sep, or radar-ent"
        ))),
    }
}

fn emit_report(
    args: &ParsedArgs,
    label: &str,
    state: &PureState,
    construction: Option<&OptimalConstruction>,
    radar: Option<RadarDoc>,
) -> CliResult<()> {
    let (report, f_q, f_im, betas, cfim) = match construction {
        Some(c) => {
            let fc = c.achieved_cfim()?;
            let report = verify_saturation(c, gap_tolerance()?)?;
            (
                report,
                c.bundle.f_q.clone(),
                c.bundle.f_im.clone(),
                c.blocks.betas.clone(),
                Some(fc),
            )
        }
        None => {
            let bundle = pure_bundle(state, 1)?;
            let report = tradeoff::report(&bundle, state.dim(), None, true)?;
            let betas: Vec<f64> = report
                .lambdas
                .chunks(2)
                .filter(|pair| pair.len() == 2 && pair[0] > 0.0)
                .map(|pair| pair[0])
                .collect();
            (report, bundle.f_q.clone(), bundle.f_im.clone(), betas, None)
        }
    };
    let doc = report_doc(
        label,
        state.params(),
        &report,
        &f_q,
        &f_im,
        &betas,
        cfim.as_ref(),
        construction.map(|c| &c.measurement),
        radar,
    );
    let content = match args.get("format") {
        None | Some("json") => to_json_pretty(&doc)?,
        Some("csv") => doc.to_csv(),
        Some(other) => {
            return Err(CliError::usage(format!(
                "--format expects json or csv, got {other:?}"
            )))
        }
    };
    emit(args.get("out"), &content)
}

pub fn run_example(args: &ParsedArgs) -> CliResult<()> {
    let varphi = args.get_f64("varphi")?.unwrap_or(0.0);
    match prepare_example(args)? {
        Prepared::State(label, state) => {
            let c = construct_optimal_measurement(&state, ancilla_policy(args)?, varphi)?;
            emit_report(args, &label, &state, Some(&c), None)
        }
        Prepared::Radar(label, signal) => {
            let state = signal.state()?;
            let c = construct_optimal_measurement(&state, AncillaPolicy::SystemOnly, varphi)?;
            let fc = c.achieved_cfim()?;
            let product = 1.0 / (fc[(0, 0)] * fc[(1, 1)]).sqrt();
            let radar = RadarDoc {
                kappa: signal.kappa,
                sigma: signal.sigma,
                t_bar: signal.t_bar,
                omega_bar: signal.omega_bar,
                sigma_product: product,
                refined_bound: refined_ak_bound(signal.kappa)?,
            };
            emit_report(args, &label, &state, Some(&c), Some(radar))
        }
    }
}

pub fn run_bound(args: &ParsedArgs) -> CliResult<()> {
    let path = args
        .get("input")
        .ok_or_else(|| CliError::usage("bound requires --input FILE"))?;
    let state = descriptor::load_state(path)?;
    let construct = args.get_bool("construct")?.unwrap_or(true);
    // Single-parameter problems carry no incompatibility; report the bound
    // without a construction (the SLD eigenbasis is already optimal).
    if construct && state.num_params() >= 2 {
        let c = construct_optimal_measurement(&state, ancilla_policy(args)?, 0.0)?;
        emit_report(args, "bound", &state, Some(&c), None)
    } else {
        emit_report(args, "bound", &state, None, None)
    }
}

pub fn run_measure(args: &ParsedArgs) -> CliResult<()> {
    let varphi = args.get_f64("varphi")?.unwrap_or(0.0);
    let state = if let Some(path) = args.get("input") {
        descriptor::load_state(path)?
    } else {
        match prepare_example(args)? {
            Prepared::State(_, state) => state,
            Prepared::Radar(_, signal) => signal.state()?,
        }
    };
    let c = construct_optimal_measurement(&state, ancilla_policy(args)?, varphi)?;
    verify_saturation(&c, gap_tolerance()?)?;
    let doc = measurement_doc(&c.measurement);
    let content = to_json_pretty(&doc)?;
    emit(args.get("out"), &content)
}

/// Radar model preset file: any subset of the fields of [`RadarModel`];
/// missing entries fall back to the natural-unit preset.
#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct RadarModelDoc {
    sigma0: Option<f64>,
    omega0: Option<f64>,
    t0: Option<f64>,
    kappa: Option<f64>,
    sigma_i0: Option<f64>,
    omega_i0: Option<f64>,
    c: Option<f64>,
    x: Option<f64>,
    v: Option<f64>,
}

fn load_radar_model(path: &str, kappa_flag: Option<f64>) -> CliResult<RadarModel> {
    let raw = std::fs::read_to_string(path)?;
    let doc: RadarModelDoc = serde_json::from_str(&raw)
        .map_err(|e| CliError::usage(format!("failed to parse {path}: {e}")))?;
    let base = RadarModel::preset(kappa_flag.unwrap_or(0.0));
    Ok(RadarModel {
        sigma0: doc.sigma0.unwrap_or(base.sigma0),
        omega0: doc.omega0.unwrap_or(base.omega0),
        t0: doc.t0.unwrap_or(base.t0),
        kappa: doc.kappa.or(kappa_flag).unwrap_or(base.kappa),
        sigma_i0: doc.sigma_i0.unwrap_or(base.sigma_i0),
        omega_i0: doc.omega_i0.unwrap_or(base.omega_i0),
        c: doc.c.unwrap_or(base.c),
        x: doc.x.unwrap_or(base.x),
        v: doc.v.unwrap_or(base.v),
    })
}

pub fn run_radar_sim(args: &ParsedArgs) -> CliResult<()> {
    let kappa_flag = args.get_f64("kappa")?;
    let shots = args.get_u64("shots")?.unwrap_or(100_000);
    let batches = args.get_u64("batches")?.unwrap_or(200) as u32;
    let seed = args.get_u64("seed")?.unwrap_or(DEFAULT_SEED);
    let offset = match args.get_f64_list("offset")? {
        None => (0.0, 0.0),
        Some(v) if v.len() == 2 => (v[0], v[1]),
        Some(_) => return Err(CliError::usage("--offset expects T,W")),
    };
    let model = match args.get("input") {
        Some(path) => load_radar_model(path, kappa_flag)?,
        None => RadarModel::preset(kappa_flag.unwrap_or(0.0)),
    };
    let kappa = model.kappa;
    let run = simulate(&model, shots, batches, seed, offset)?;
    let signal = returned_state(&model)?;

    let mut csv = String::from(
        "kappa,shots,batch,t_hat,omega_hat,sigma_t_emp,sigma_w_emp,sigma_t_pred,sigma_w_pred\n",
    );
    for (batch, (t_hat, w_hat)) in run.estimates.iter().enumerate() {
        csv.push_str(&format!(
            "{},{},{},{},{},,,,\n",
            fmt_f64(kappa),
            shots,
            batch,
            fmt_f64(*t_hat),
            fmt_f64(*w_hat),
        ));
    }
    csv.push_str(&format!(
        "{},{},summary,,,{},{},{},{}\n",
        fmt_f64(kappa),
        shots,
        fmt_f64(run.empirical_cov[0][0].sqrt()),
        fmt_f64(run.empirical_cov[1][1].sqrt()),
        fmt_f64(run.predicted_cov[0][0].sqrt()),
        fmt_f64(run.predicted_cov[1][1].sqrt()),
    ));
    emit(args.get("out"), &csv)?;

    eprintln!(
        "radar-sim: kappa = {}, truth = ({}, {}), {} batches x {} shots, {} flagged; per-shot product {} (bound {})",
        fmt_f64(kappa),
        fmt_f64(signal.t_bar),
        fmt_f64(signal.omega_bar),
        batches,
        shots,
        run.flagged,
        fmt_f64(run.empirical_product),
        fmt_f64(refined_ak_bound(kappa)?),
    );
    Ok(())
}

struct SweepSpec {
    variable: String,
    lo: f64,
    hi: f64,
    steps: usize,
}

fn parse_sweep(raw: &str) -> CliResult<SweepSpec> {
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 4 {
        return Err(CliError::usage(format!(
            "--sweep expects VAR:LO:HI:STEPS, got {raw:?}"
        )));
    }
    let variable = parts[0].to_string();
    if !["kappa", "theta", "x3"].contains(&variable.as_str()) {
        return Err(CliError::usage(format!(
            "sweep variable must be kappa, theta, or x3; got {variable:?}"
        )));
    }
    let lo: f64 = parts[1]
        .parse()
        .map_err(|_| CliError::usage(format!("bad sweep LO {:?}", parts[1])))?;
    let hi: f64 = parts[2]
        .parse()
        .map_err(|_| CliError::usage(format!("bad sweep HI {:?}", parts[2])))?;
    let steps: usize = parts[3]
        .parse()
        .map_err(|_| CliError::usage(format!("bad sweep STEPS {:?}", parts[3])))?;
    if steps == 0 {
        return Err(CliError::usage("sweep needs at least one step"));
    }
    Ok(SweepSpec {
        variable,
        lo,
        hi,
        steps,
    })
}

pub fn run_sweep(args: &ParsedArgs) -> CliResult<()> {
    let raw = args
        .get("sweep")
        .ok_or_else(|| CliError::usage("sweep requires --sweep VAR:LO:HI:STEPS"))?;
    let spec = parse_sweep(raw)?;
    let tol = gap_tolerance()?;

    let mut csv = String::from(
        "variable,value,n,tight_bound,achieved,gap,gill_massar,matsumoto_lower,chen_quarter,chen_fifth\n",
    );
    for k in 0..spec.steps {
        let value = if spec.steps == 1 {
            spec.lo
        } else {
            spec.lo + (spec.hi - spec.lo) * k as f64 / (spec.steps - 1) as f64
        };
        let (state, policy) = match spec.variable.as_str() {
            "kappa" => {
                if !(0.0..1.0).contains(&value) {
                    return Err(CliError::usage(format!(
                        "kappa grid point {value} lies outside [0, 1)"
                    )));
                }
                let signal = ReturnedSignal {
                    sigma: 1.0,
                    t_bar: 0.0,
                    omega_bar: 1.0,
                    kappa: value,
                };
                (signal.state()?, AncillaPolicy::SystemOnly)
            }
            "theta" => (
                qmetro_core::states::qutrit_fixture(0.0, value),
                AncillaPolicy::Auto,
            ),
            _ => (
                qmetro_core::states::squeezed_fixture(0.0, 0.0, value),
                AncillaPolicy::Auto,
            ),
        };
        let c = construct_optimal_measurement(&state, policy, 0.0)?;
        let report = verify_saturation(&c, tol)?;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            spec.variable,
            fmt_f64(value),
            report.n,
            fmt_f64(report.tight_bound),
            fmt_f64(report.achieved.unwrap_or(f64::NAN)),
            fmt_f64(report.gap.unwrap_or(f64::NAN)),
            fmt_f64(report.gill_massar),
            fmt_f64(report.matsumoto_lower),
            fmt_f64(report.chen_quarter),
            fmt_f64(report.chen_fifth),
        ));
    }
    emit(args.get("out"), &csv)
}
