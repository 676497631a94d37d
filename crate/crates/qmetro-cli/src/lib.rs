//! `qmetro`: evaluate estimation tradeoff bounds, construct the optimal
//! projective measurements that attain them, and run radar Monte Carlo
//! simulations, writing JSON and CSV reports.

pub mod args;
pub mod commands;
pub mod descriptor;
pub mod report;

use std::fmt;

/// CLI failure with its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad invocation or malformed input (exit code 2).
    Usage(String),
    /// A numerical invariant could not be met (exit code 3).
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
        }
    }
}

impl From<qmetro_core::Error> for CliError {
    fn from(err: qmetro_core::Error) -> Self {
        match &err {
            qmetro_core::Error::InvalidArgument(_) => CliError::Usage(err.to_string()),
            qmetro_core::Error::SingularFisherMatrix { null_direction, .. } => {
                CliError::Numerical(format!(
                    "{err}; no information is available along [{}]",
                    null_direction
                        .iter()
                        .map(|x| format!("{x:.6}"))
                        .collect::<Vec<_>>()
                        .join(", ")
                ))
            }
            _ => CliError::Numerical(err.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Usage(format!("io: {err}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        CliError::Usage(format!("json: {err}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Saturation-gap tolerance, overridable through `QMETRO_TOL`.
pub fn gap_tolerance() -> CliResult<f64> {
    match std::env::var("QMETRO_TOL") {
        Ok(raw) => raw
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|t| *t > 0.0)
            .ok_or_else(|| CliError::usage(format!("QMETRO_TOL must be a positive number, got {raw:?}"))),
        Err(_) => Ok(qmetro_core::tol::SATURATION_GAP),
    }
}

/// Entry point shared by the binary and the integration tests.
pub fn run(argv: &[String]) -> CliResult<()> {
    let parsed = args::parse(argv)?;
    match parsed.command.as_str() {
        "example" => commands::run_example(&parsed),
        "bound" => commands::run_bound(&parsed),
        "measure" => commands::run_measure(&parsed),
        "radar-sim" => commands::run_radar_sim(&parsed),
        "sweep" => commands::run_sweep(&parsed),
        other => Err(CliError::usage(format!(
            "unknown command {other:?}; expected example, bound, measure, radar-sim, or sweep"
        ))),
    }
}
