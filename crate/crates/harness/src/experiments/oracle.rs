use serde::{Deserialize, Serialize};

use mallows_core::analysis::{distance_tail, min_compatible_distance};
use mallows_core::oracle::DEFAULT_SCAN_CAP;
use mallows_core::stats::proportion;
use mallows_core::{Check, Compatibility, EdgeOracle, ExperimentReport, Relation};

use super::{param_map, positive, probability, row, DataTable, Outcome, Params};
use crate::error::Result;
use crate::trials::{run_trials, split};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleRateParams {
    pub p: f64,
    pub pairs: u64,
}

impl Default for OracleRateParams {
    fn default() -> Self {
        Self { p: 0.6, pairs: 1_000_000 }
    }
}

impl Params for OracleRateParams {
    fn validate(&self) -> std::result::Result<(), String> {
        positive("pairs", self.pairs)?;
        probability("p", self.p, true)
    }
}

/// Edge frequency over the pairs `(k div 1000 − 500, k mod 1000 − 500)`.
pub(super) fn oracle_rate(p: &OracleRateParams, seed: u64) -> Result<Outcome> {
    let o = EdgeOracle::new(p.p, seed)?;
    let rows = 1000i64;
    let hits: Vec<u64> = run_trials(p.pairs.div_ceil(rows as u64), 0, |r| {
        let r = r as i64;
        let lo = r * rows;
        let hi = (lo + rows).min(p.pairs as i64);
        Ok((lo..hi).filter(|&k| o.is_compatible(k / rows - 500, k % rows - 500)).count() as u64)
    })
    .into_iter()
    .map(|h| h.unwrap_or(0))
    .collect();
    let mut data = DataTable::new(&["male", "edges"]);
    for (r, h) in hits.iter().enumerate() {
        data.push(row![r as i64 - 500, h]);
    }
    let (est, se) = proportion(hits.iter().sum(), p.pairs);
    let checks = vec![Check::monte_carlo("edge frequency", est, se, p.p, Relation::Equals)];
    let report = ExperimentReport::from_checks("oracle-rate", param_map(p), checks, p.pairs, 0);
    Ok(Outcome { report, data })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MinDistanceParams {
    pub q: f64,
    pub samples: u64,
    pub n_max: u64,
}

impl Default for MinDistanceParams {
    fn default() -> Self {
        Self { q: 0.5, samples: 100_000, n_max: 5 }
    }
}

impl Params for MinDistanceParams {
    fn validate(&self) -> std::result::Result<(), String> {
        positive("samples", self.samples)?;
        positive("n_max", self.n_max)?;
        probability("q", self.q, false)
    }
}

/// `X_i` at males `i = 1000 t`, far enough apart to share no pairs.
pub(super) fn min_distance(p: &MinDistanceParams, seed: u64) -> Result<Outcome> {
    let o = EdgeOracle::new(1.0 - p.q, seed)?;
    let results = run_trials(p.samples, 0, |t| min_compatible_distance(&o, t as i64 * 1000, DEFAULT_SCAN_CAP));
    let (values, errored) = split(results);
    let mut data = DataTable::new(&["male", "distance"]);
    for (t, v) in values.iter().enumerate() {
        if let Some(v) = v {
            data.push(row![t as i64 * 1000, v]);
        }
    }
    let done: Vec<u64> = values.into_iter().flatten().collect();
    let checks = (1..=p.n_max)
        .map(|n| {
            let hits = done.iter().filter(|&&x| x >= n).count() as u64;
            let (est, se) = proportion(hits, done.len() as u64);
            Check::monte_carlo(format!("P(X >= {n})"), est, se, distance_tail(n, p.q), Relation::Equals)
        })
        .collect();
    let report = ExperimentReport::from_checks("min-distance", param_map(p), checks, p.samples, errored);
    Ok(Outcome { report, data })
}
