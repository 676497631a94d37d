//! Minimal flag parser: a command followed by `--flag value` pairs.

use std::collections::BTreeMap;

use crate::{CliError, CliResult};

pub const USAGE: &str = "\
qmetro <command> [flags]

commands:
  example     run a built-in fixture and report bound, measurement, and gap
  bound       evaluate the tradeoff bound for a state descriptor file
  measure     emit the optimal measurement basis for a state
  radar-sim   Monte Carlo range/frequency estimation with the optimal measurement
  sweep       tabulate bounds over a parameter grid (CSV)

flags:
  --example NAME    qubit | qutrit | squeezed | radar-sep | radar-ent
  --input FILE      state descriptor JSON ({\"type\": ..., \"params\": [...]})
  --out FILE        output path (stdout when omitted)
  --format FMT      json | csv
  --params LIST     comma-separated fixture parameters
  --kappa F         bi-photon correlation in [0, 1)
  --shots N         shots per batch (radar-sim)
  --batches N       number of batches (radar-sim, default 200)
  --seed N          generator seed (default 8)
  --varphi F        degenerate-block rotation angle (default 0)
  --offset T,W      measurement anchor offset from the truth (radar-sim)
  --ancilla MODE    auto | none (default auto)
  --sweep SPEC      VAR:LO:HI:STEPS with VAR in {kappa, theta, x3}
  --construct BOOL  build the optimal measurement in `bound` (default true)

environment:
  QMETRO_TOL        saturation-gap tolerance (default 1e-8)

exit codes: 0 success, 2 usage error, 3 numerical-invariant violation
";

const KNOWN_FLAGS: &[&str] = &[
    "--example",
    "--input",
    "--out",
    "--format",
    "--params",
    "--kappa",
    "--shots",
    "--batches",
    "--seed",
    "--varphi",
    "--offset",
    "--ancilla",
    "--sweep",
    "--construct",
];

#[derive(Debug, Clone)]
pub struct ParsedArgs {
    pub command: String,
    pub flags: BTreeMap<String, String>,
}

pub fn parse(argv: &[String]) -> CliResult<ParsedArgs> {
    let mut it = argv.iter();
    let command = match it.next() {
        Some(c) if c == "--help" || c == "-h" || c == "help" => {
            return Err(CliError::usage(USAGE));
        }
        Some(c) => c.clone(),
        None => return Err(CliError::usage(USAGE)),
    };
    let mut flags = BTreeMap::new();
    while let Some(flag) = it.next() {
        if flag == "--help" || flag == "-h" {
            return Err(CliError::usage(USAGE));
        }
        if !KNOWN_FLAGS.contains(&flag.as_str()) {
            return Err(CliError::usage(format!(
                "unknown flag {flag:?}\n\n{USAGE}"
            )));
        }
        let value = it
            .next()
            .ok_or_else(|| CliError::usage(format!("flag {flag} expects a value")))?;
        flags.insert(flag.trim_start_matches("--").to_string(), value.clone());
    }
    Ok(ParsedArgs { command, flags })
}

impl ParsedArgs {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.flags.get(key).map(String::as_str)
    }

    pub fn get_f64(&self, key: &str) -> CliResult<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<f64>()
                .map(Some)
                .map_err(|_| CliError::usage(format!("--{key} expects a number, got {raw:?}"))),
        }
    }

    pub fn get_u64(&self, key: &str) -> CliResult<Option<u64>> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<u64>()
                .map(Some)
                .map_err(|_| CliError::usage(format!("--{key} expects an integer, got {raw:?}"))),
        }
    }

    pub fn get_bool(&self, key: &str) -> CliResult<Option<bool>> {
        match self.get(key) {
            None => Ok(None),
            Some("true") | Some("1") => Ok(Some(true)),
            Some("false") | Some("0") => Ok(Some(false)),
            Some(raw) => Err(CliError::usage(format!(
                "--{key} expects true or false, got {raw:?}"
            ))),
        }
    }

    /// Comma-separated list of numbers.
    pub fn get_f64_list(&self, key: &str) -> CliResult<Option<Vec<f64>>> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .split(',')
                .map(|piece| piece.trim().parse::<f64>())
                .collect::<Result<Vec<f64>, _>>()
                .map(Some)
                .map_err(|_| {
                    CliError::usage(format!("--{key} expects comma-separated numbers, got {raw:?}"))
                }),
        }
    }
}
