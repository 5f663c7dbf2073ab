//! The named experiments of the battery.
//!
//! Each experiment has a parameter struct with defaults (so an entry with
//! only a `name` runs the full-size version) and returns a report plus a
//! table of raw per-trial data.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::Serialize;
use toml::Table as TomlTable;

use mallows_core::ExperimentReport;

use crate::error::{HarnessError, Result};
use crate::trials::name_hash;

mod chain;
mod coupling;
mod finite;
mod oracle;
mod tame;
mod wild;

pub use chain::{CutDensityParams, CutJumpParams, NoCutRunsParams};
pub use coupling::{CouplingTailParams, SemiinfCutParams};
pub use finite::{CorrelationParams, ExactMallowsParams, PerfectProbParams};
pub use oracle::{MinDistanceParams, OracleRateParams};
pub use tame::{TameLadderParams, TameSharpnessParams};
pub use wild::{WildAuditParams, WildSharpParams};

/// Raw data written next to each report as CSV.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DataTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl DataTable {
    pub fn new(headers: &[&str]) -> Self {
        Self {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// Shorthand for building table rows out of displayable values.
macro_rules! row {
    ($($x:expr),* $(,)?) => { vec![$($x.to_string()),*] };
}
pub(crate) use row;

#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: ExperimentReport,
    pub data: DataTable,
}

pub trait Params: Serialize + DeserializeOwned + Default {
    fn validate(&self) -> std::result::Result<(), String>;
}

pub const NAMES: &[&str] = &[
    "exact-mallows",
    "perfect-prob",
    "correlation",
    "cut-density",
    "cut-jump",
    "no-cut-runs",
    "coupling-tail",
    "semiinf-cut",
    "tame-ladder",
    "tame-sharpness",
    "wild-audit",
    "wild-sharp",
    "oracle-rate",
    "min-distance",
];

fn parse<P: Params>(name: &str, table: &TomlTable) -> Result<P> {
    let invalid = |message: String| HarnessError::InvalidParams {
        experiment: name.to_string(),
        message,
    };
    let p: P = toml::Value::Table(table.clone())
        .try_into()
        .map_err(|e: toml::de::Error| invalid(e.message().trim().to_string()))?;
    p.validate().map_err(invalid)?;
    Ok(p)
}

/// Report parameters: the resolved parameter struct.
pub(crate) fn param_map<P: Serialize>(p: &P) -> BTreeMap<String, serde_json::Value> {
    match serde_json::to_value(p) {
        Ok(serde_json::Value::Object(o)) => o.into_iter().collect(),
        _ => BTreeMap::new(),
    }
}

type Runner<P> = fn(&P, u64) -> Result<Outcome>;

fn go<P: Params>(name: &str, table: &TomlTable, seed: Option<u64>, run: Runner<P>) -> Result<Option<Outcome>> {
    let p: P = parse(name, table)?;
    seed.map(|s| run(&p, s)).transpose()
}

fn dispatch(name: &str, table: &TomlTable, seed: Option<u64>) -> Result<Option<Outcome>> {
    match name {
        "exact-mallows" => go(name, table, seed, finite::exact_mallows),
        "perfect-prob" => go(name, table, seed, finite::perfect_prob),
        "correlation" => go(name, table, seed, finite::correlation),
        "cut-density" => go(name, table, seed, chain::cut_density),
        "cut-jump" => go(name, table, seed, chain::cut_jump),
        "no-cut-runs" => go(name, table, seed, chain::no_cut_runs),
        "coupling-tail" => go(name, table, seed, coupling::coupling_tail),
        "semiinf-cut" => go(name, table, seed, coupling::semiinf_cut),
        "tame-ladder" => go(name, table, seed, tame::tame_ladder),
        "tame-sharpness" => go(name, table, seed, tame::tame_sharpness),
        "wild-audit" => go(name, table, seed, wild::wild_audit),
        "wild-sharp" => go(name, table, seed, wild::wild_sharp),
        "oracle-rate" => go(name, table, seed, oracle::oracle_rate),
        "min-distance" => go(name, table, seed, oracle::min_distance),
        _ => Err(HarnessError::UnknownExperiment(name.to_string())),
    }
}

/// Checks that `name` is registered and `params` parse and validate.
pub fn validate(name: &str, params: &TomlTable) -> Result<()> {
    dispatch(name, params, None).map(|_| ())
}

/// Runs one experiment. The result is a pure function of
/// `(name, params, seed)`; the experiment's own seed stream is derived from
/// `seed` and the name.
pub fn run_experiment(name: &str, params: &TomlTable, seed: u64) -> Result<Outcome> {
    let start = std::time::Instant::now();
    let mut out = dispatch(name, params, Some(seed ^ name_hash(name)))?
        .expect("a seed was supplied");
    out.report.params.insert("seed".into(), seed.into());
    out.report.wall_time = start.elapsed();
    Ok(out)
}

pub(crate) fn positive(what: &str, x: u64) -> std::result::Result<(), String> {
    if x == 0 {
        Err(format!("{what} must be positive"))
    } else {
        Ok(())
    }
}

pub(crate) fn probability(what: &str, x: f64, allow_one: bool) -> std::result::Result<(), String> {
    let ok = if allow_one { x > 0.0 && x <= 1.0 } else { (0.0..1.0).contains(&x) };
    if ok && x.is_finite() {
        Ok(())
    } else {
        Err(format!("{what} = {x} is out of range"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_has_valid_defaults() {
        for name in NAMES {
            validate(name, &TomlTable::new()).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(matches!(
            validate("nope", &TomlTable::new()),
            Err(HarnessError::UnknownExperiment(_))
        ));
    }

    #[test]
    fn zero_trials_invalid() {
        let mut t = TomlTable::new();
        t.insert("trials".into(), toml::Value::Integer(0));
        assert!(matches!(
            validate("perfect-prob", &t),
            Err(HarnessError::InvalidParams { .. })
        ));
    }
}
