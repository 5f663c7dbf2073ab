use serde::{Deserialize, Serialize};

use mallows_core::analysis::coupling_tail_bound;
use mallows_core::matching::crossing_profiles;
use mallows_core::samplers::{perfect_match_probability, sample_semiinfinite, stable_match_low_pair, MatchOptions};
use mallows_core::stats::proportion;
use mallows_core::{cut_positions, Check, EdgeOracle, Error, ExperimentReport, HalfInt, IndexSet, Interval, Relation, WindowMatching};

use super::{param_map, positive, probability, row, DataTable, Outcome, Params};
use crate::error::Result;
use crate::trials::{run_trials, split, sub_seed};

/// The second balanced pair compared against `((−∞,0], (−∞,0])`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SecondPair {
    /// `((−∞,0] ∪ {2}, (−∞,1])`.
    Swapped,
    /// `((−∞,3], (−∞,3])`.
    Shifted,
}

impl SecondPair {
    fn sets(self) -> (IndexSet, IndexSet) {
        match self {
            SecondPair::Swapped => (IndexSet::low(0, [2]), IndexSet::semi_infinite(1)),
            SecondPair::Shifted => (IndexSet::semi_infinite(3), IndexSet::semi_infinite(3)),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CouplingTailParams {
    pub q: f64,
    pub ns: Vec<u64>,
    pub trials: u64,
    /// Revealed depth below 0; a trial errors if no mutual cut in
    /// `[−depth, 0]` certifies the coupling point.
    pub depth: i64,
    pub pairs: Vec<SecondPair>,
}

impl Default for CouplingTailParams {
    fn default() -> Self {
        Self {
            q: 0.5,
            ns: vec![1, 3, 5],
            trials: 10_000,
            depth: 300,
            pairs: vec![SecondPair::Swapped, SecondPair::Shifted],
        }
    }
}

impl Params for CouplingTailParams {
    fn validate(&self) -> std::result::Result<(), String> {
        positive("trials", self.trials)?;
        positive("depth", self.depth.max(0) as u64)?;
        probability("q", self.q, false)?;
        if self.ns.is_empty() || self.pairs.is_empty() {
            return Err("ns and pairs must not be empty".into());
        }
        Ok(())
    }
}

/// Floors `f` of positions `f + 1/2` with no crossing edge.
fn cut_floors(m: &WindowMatching, floors: Interval) -> mallows_core::Result<Vec<i64>> {
    Ok(crossing_profiles(m, floors)?
        .into_iter()
        .filter(|c| c.l_plus == 0 && c.l_minus == 0)
        .map(|c| c.at.floor())
        .collect())
}

/// The least `k >= 0` with `σ_1(−i) = σ_2(−i)` for all `i >= k`, certified by
/// a mutual cut at or below `−k + 1/2`.
fn coupling_point(second: &(IndexSet, IndexSet), depth: i64, oracle: &EdgeOracle) -> mallows_core::Result<u64> {
    let ray = IndexSet::semi_infinite(0);
    let opts = MatchOptions::default();
    let top = second.0.max().unwrap_or(0).max(second.1.max().unwrap_or(0));
    let s1 = stable_match_low_pair(&ray, &ray, Interval::new(-depth, 0)?, oracle, opts)?;
    let s2 = stable_match_low_pair(&second.0, &second.1, Interval::new(-depth, top)?, oracle, opts)?;
    if s1.has_unmatched() || s2.has_unmatched() {
        return Err(Error::NotPerfect { at: HalfInt::above(-depth) });
    }
    let k = (0..=depth)
        .filter(|&i| s1.sigma(-i) != s2.sigma(-i))
        .max()
        .map_or(0, |d| d + 1);
    let floors = Interval::new(-depth, -k.max(1))?;
    let c1 = cut_floors(&s1, floors)?;
    let c2 = cut_floors(&s2, floors)?;
    if c1.iter().any(|f| c2.contains(f)) {
        Ok(k as u64)
    } else {
        Err(Error::InsufficientWindow { at: HalfInt::above(-depth) })
    }
}

pub(super) fn coupling_tail(p: &CouplingTailParams, seed: u64) -> Result<Outcome> {
    let mut checks = Vec::new();
    let mut data = DataTable::new(&["pair", "trial", "coupling_point"]);
    let (mut attempted, mut errored) = (0, 0);
    for (k, &pair) in p.pairs.iter().enumerate() {
        let sets = pair.sets();
        let results = run_trials(p.trials, sub_seed(seed, k as u64), |s| {
            coupling_point(&sets, p.depth, &EdgeOracle::new(1.0 - p.q, s)?)
        });
        let (values, e) = split(results);
        attempted += p.trials;
        errored += e;
        let tag = serde_json::to_value(pair)?.as_str().unwrap_or_default().to_string();
        for (t, v) in values.iter().enumerate() {
            if let Some(v) = v {
                data.push(row![tag, t, v]);
            }
        }
        let done: Vec<u64> = values.into_iter().flatten().collect();
        for &n in &p.ns {
            let late = done.iter().filter(|&&k| k > n).count() as u64;
            let (est, se) = proportion(late, done.len() as u64);
            checks.push(Check::monte_carlo(
                format!("P(disagree beyond {n}) {tag}"),
                est,
                se,
                coupling_tail_bound(p.q, n),
                Relation::AtMost,
            ));
        }
    }
    let report = ExperimentReport::from_checks("coupling-tail", param_map(p), checks, attempted, errored);
    Ok(Outcome { report, data })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SemiinfCutParams {
    pub q: f64,
    /// Distance of the tested position below the top of the ray.
    pub m: i64,
    pub trials: u64,
}

impl Default for SemiinfCutParams {
    fn default() -> Self {
        Self { q: 0.5, m: 40, trials: 10_000 }
    }
}

impl Params for SemiinfCutParams {
    fn validate(&self) -> std::result::Result<(), String> {
        positive("trials", self.trials)?;
        if self.m < 0 {
            return Err("m must be nonnegative".into());
        }
        probability("q", self.q, false)
    }
}

/// Frequency with which `−1/2` is a cut of the stable matching of
/// `(−∞, m]`; the top `m + 1` individuals must match among themselves.
pub(super) fn semiinf_cut(p: &SemiinfCutParams, seed: u64) -> Result<Outcome> {
    let w = Interval::new(-1, 0)?;
    let results = run_trials(p.trials, seed, |s| {
        let o = EdgeOracle::new(1.0 - p.q, s)?;
        let m = sample_semiinfinite(p.m, w, &o, MatchOptions::default())?;
        let r = cut_positions(&m, w);
        if !r.uncertified.is_empty() {
            return Err(Error::InsufficientWindow { at: r.uncertified[0] });
        }
        Ok(!r.cuts.is_empty())
    });
    let (values, errored) = split(results);
    let mut data = DataTable::new(&["trial", "cut"]);
    for (t, v) in values.iter().enumerate() {
        if let Some(v) = v {
            data.push(row![t, *v as u8]);
        }
    }
    let hits = values.iter().filter(|v| **v == Some(true)).count() as u64;
    let (est, se) = proportion(hits, p.trials - errored);
    let target = perfect_match_probability(p.m as u32 + 1, p.q);
    let checks = vec![Check::monte_carlo("P(-1/2 is a cut)", est, se, target, Relation::Equals)];
    let report = ExperimentReport::from_checks("semiinf-cut", param_map(p), checks, p.trials, errored);
    Ok(Outcome { report, data })
}
