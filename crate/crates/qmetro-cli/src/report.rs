//! Serializable report documents and CSV emission.

use serde::Serialize;

use qmetro_core::linalg::{CVector, RMatrix};
use qmetro_core::measurement::Measurement;
use qmetro_core::tradeoff::TradeoffReport;

use crate::CliResult;

pub const SCHEMA: &str = "1";

#[derive(Debug, Serialize)]
pub struct ReportDoc {
    pub schema: &'static str,
    pub kind: &'static str,
    pub label: String,
    pub params: Vec<f64>,
    pub n: usize,
    pub dim: usize,
    pub f_q: Vec<Vec<f64>>,
    pub f_im: Vec<Vec<f64>>,
    pub lambdas: Vec<f64>,
    pub betas: Vec<f64>,
    pub tight_bound: f64,
    pub gill_massar: f64,
    pub matsumoto_lower: f64,
    pub chen_quarter: f64,
    pub chen_fifth: f64,
    pub guaranteed_tight: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub achieved: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_fq_fc_inv: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cfim: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measurement: Option<MeasurementDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radar: Option<RadarDoc>,
}

#[derive(Debug, Serialize)]
pub struct MeasurementDoc {
    pub schema: &'static str,
    pub kind: &'static str,
    pub dim: usize,
    pub ancilla_dim: usize,
    pub betas: Vec<f64>,
    pub varphi: f64,
    /// Basis kets as `[re, im]` pair arrays.
    pub basis: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Serialize)]
pub struct RadarDoc {
    pub kappa: f64,
    pub sigma: f64,
    pub t_bar: f64,
    pub omega_bar: f64,
    /// Per-shot `sigma_t * sigma_omega` of the constructed measurement.
    pub sigma_product: f64,
    /// Attainable lower bound `sqrt((1 - kappa) / (1 + kappa))`.
    pub refined_bound: f64,
}

pub fn matrix_rows(m: &RMatrix) -> Vec<Vec<f64>> {
    // `+ 0.0` folds negative zero into plain zero for cleaner output.
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)] + 0.0).collect())
        .collect()
}

pub fn vector_pairs(v: &CVector) -> Vec<[f64; 2]> {
    v.entries().iter().map(|z| [z.re, z.im]).collect()
}

pub fn measurement_doc(m: &Measurement) -> MeasurementDoc {
    MeasurementDoc {
        schema: SCHEMA,
        kind: "measurement",
        dim: m.dim,
        ancilla_dim: m.ancilla_dim,
        betas: m.betas.clone(),
        varphi: m.varphi,
        basis: m.basis.iter().map(vector_pairs).collect(),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn report_doc(
    label: &str,
    params: &[f64],
    report: &TradeoffReport,
    f_q: &RMatrix,
    f_im: &RMatrix,
    betas: &[f64],
    cfim: Option<&RMatrix>,
    measurement: Option<&Measurement>,
    radar: Option<RadarDoc>,
) -> ReportDoc {
    ReportDoc {
        schema: SCHEMA,
        kind: "tradeoff_report",
        label: label.to_string(),
        params: params.to_vec(),
        n: report.n,
        dim: report.dim,
        f_q: matrix_rows(f_q),
        f_im: matrix_rows(f_im),
        lambdas: report.lambdas.clone(),
        betas: betas.to_vec(),
        tight_bound: report.tight_bound,
        gill_massar: report.gill_massar,
        matsumoto_lower: report.matsumoto_lower,
        chen_quarter: report.chen_quarter,
        chen_fifth: report.chen_fifth,
        guaranteed_tight: report.guaranteed_tight,
        achieved: report.achieved,
        gap: report.gap,
        trace_fq_fc_inv: report.trace_fq_fc_inv,
        cfim: cfim.map(matrix_rows),
        measurement: measurement.map(measurement_doc),
        radar,
    }
}

impl ReportDoc {
    /// Flat single-row CSV with the scalar fields.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "label,n,dim,tight_bound,achieved,gap,gill_massar,matsumoto_lower,chen_quarter,chen_fifth\n",
        );
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            self.label,
            self.n,
            self.dim,
            fmt_f64(self.tight_bound),
            self.achieved.map(fmt_f64).unwrap_or_default(),
            self.gap.map(fmt_f64).unwrap_or_default(),
            fmt_f64(self.gill_massar),
            fmt_f64(self.matsumoto_lower),
            fmt_f64(self.chen_quarter),
            fmt_f64(self.chen_fifth),
        ));
        out
    }
}

/// Shortest round-trip decimal form, deterministic for a given value.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// Write to the path or stdout when no path is given.
pub fn emit(out: Option<&str>, content: &str) -> CliResult<()> {
    match out {
        Some(path) => {
            std::fs::write(path, content)?;
            Ok(())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

pub fn to_json_pretty<T: Serialize>(doc: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(doc)?;
    s.push('\n');
    Ok(s)
}
