//! JSON state descriptors.
//!
//! ```json
//! {"type": "qubit",    "params": [0.0, 0.7853981633974483]}
//! {"type": "qutrit",   "params": [0.0, 0.7853981633974483]}
//! {"type": "squeezed", "params": [0.0, 0.0, 0.0]}
//! {"type": "custom_matrix",
//!  "psi":  [[re, im], ...],
//!  "dpsi": [[[re, im], ...], ...]}
//! ```

use serde::Deserialize;

use qmetro_core::linalg::{CVector, C64};
use qmetro_core::states::{
    qubit_fixture, qutrit_fixture, squeezed_fixture, state_from_vectors, PureState,
};

use crate::{CliError, CliResult};

pub const SCHEMA_HINT: &str = "expected {\"type\": \"qubit\"|\"qutrit\"|\"squeezed\"|\"custom_matrix\", \"params\": [...], and for custom_matrix \"psi\": [[re,im],...], \"dpsi\": [[[re,im],...],...]}";

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDescriptor {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default)]
    pub params: Vec<f64>,
    #[serde(default)]
    pub psi: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub dpsi: Option<Vec<Vec<[f64; 2]>>>,
}

fn to_cvector(pairs: &[[f64; 2]]) -> CVector {
    CVector::from_entries(pairs.iter().map(|p| C64::new(p[0], p[1])).collect())
}

fn expect_params(desc: &StateDescriptor, n: usize, defaults: &[f64]) -> CliResult<Vec<f64>> {
    if desc.params.is_empty() {
        return Ok(defaults.to_vec());
    }
    if desc.params.len() != n {
        return Err(CliError::usage(format!(
            "{} expects {n} parameters, got {}; {SCHEMA_HINT}",
            desc.kind,
            desc.params.len()
        )));
    }
    Ok(desc.params.clone())
}

pub fn build_state(desc: &StateDescriptor) -> CliResult<PureState> {
    match desc.kind.as_str() {
        "qubit" => {
            let p = expect_params(desc, 2, &[0.0, std::f64::consts::FRAC_PI_4])?;
            Ok(qubit_fixture(p[0], p[1]))
        }
        "qutrit" => {
            let p = expect_params(desc, 2, &[0.0, std::f64::consts::FRAC_PI_4])?;
            Ok(qutrit_fixture(p[0], p[1]))
        }
        "squeezed" => {
            let p = expect_params(desc, 3, &[0.0, 0.0, 0.0])?;
            Ok(squeezed_fixture(p[0], p[1], p[2]))
        }
        "custom_matrix" => {
            let psi = desc
                .psi
                .as_ref()
                .ok_or_else(|| CliError::usage(format!("custom_matrix needs \"psi\"; {SCHEMA_HINT}")))?;
            let dpsi = desc
                .dpsi
                .as_ref()
                .ok_or_else(|| CliError::usage(format!("custom_matrix needs \"dpsi\"; {SCHEMA_HINT}")))?;
            let state = state_from_vectors(
                to_cvector(psi),
                dpsi.iter().map(|d| to_cvector(d)).collect(),
            )?;
            Ok(state)
        }
        other => Err(CliError::usage(format!(
            "unknown state type {other:?}; {SCHEMA_HINT}"
        ))),
    }
}

pub fn load_state(path: &str) -> CliResult<PureState> {
    let raw = std::fs::read_to_string(path)?;
    let desc: StateDescriptor = serde_json::from_str(&raw)
        .map_err(|e| CliError::usage(format!("failed to parse {path}: {e}; {SCHEMA_HINT}")))?;
    build_state(&desc)
}
