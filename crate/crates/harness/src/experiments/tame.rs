use serde::{Deserialize, Serialize};

use mallows_core::analysis::shift_ladder_check;
use mallows_core::samplers::{sample_tame, MatchOptions, TameSampleConfig};
use mallows_core::wild::growth_diagnostics;
use mallows_core::{crossing_profiles, Check, EdgeOracle, ExperimentReport, Interval, Relation};

use super::{param_map, positive, probability, row, DataTable, Outcome, Params};
use crate::error::Result;
use crate::trials::{run_trials, split};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TameLadderParams {
    pub p: f64,
    pub seeds: u64,
    pub window: [i64; 2],
    pub tol: f64,
}

impl Default for TameLadderParams {
    fn default() -> Self {
        Self { p: 0.5, seeds: 100, window: [-15, 15], tol: 1e-6 }
    }
}

impl Params for TameLadderParams {
    fn validate(&self) -> std::result::Result<(), String> {
        positive("seeds", self.seeds)?;
        probability("p", self.p, true)?;
        if self.window[0] > self.window[1] {
            return Err("empty window".into());
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err("tol must lie in (0,1)".into());
        }
        Ok(())
    }
}

struct LadderTrial {
    exceptions: usize,
    violations: usize,
    flow_mismatches: usize,
    m_used: i64,
}

pub(super) fn tame_ladder(p: &TameLadderParams, seed: u64) -> Result<Outcome> {
    let w = Interval::new(p.window[0], p.window[1])?;
    let floors = Interval::new(w.lo - 1, w.hi)?;
    let results = run_trials(p.seeds, seed, |s| {
        let o = EdgeOracle::new(p.p, s)?;
        let opts = MatchOptions::default();
        let s0 = sample_tame(&TameSampleConfig::new(0, w, p.tol), &o, opts)?;
        let s1 = sample_tame(&TameSampleConfig::new(1, w, p.tol), &o, opts)?;
        let r = shift_ladder_check(&s0.matching, &s1.matching)?;
        let mut flow_mismatches = 0;
        for (sample, n) in [(&s0, 0i64), (&s1, 1)] {
            flow_mismatches += crossing_profiles(&sample.matching, floors)?
                .iter()
                .filter(|c| c.l_plus as i64 - c.l_minus as i64 != n)
                .count();
        }
        Ok(LadderTrial {
            exceptions: r.exceptions.len(),
            violations: r.violations(),
            flow_mismatches,
            m_used: s0.m_used.max(s1.m_used),
        })
    });
    let (values, errored) = split(results);
    let mut data = DataTable::new(&["trial", "exceptions", "violations", "flow_mismatches", "m_used"]);
    let (mut violations, mut mismatches) = (0, 0);
    for (t, v) in values.iter().enumerate() {
        if let Some(v) = v {
            data.push(row![t, v.exceptions, v.violations, v.flow_mismatches, v.m_used]);
            violations += v.violations;
            mismatches += v.flow_mismatches;
        }
    }
    let checks = vec![
        Check::exact("ladder violations", violations as f64, 0.0, 0.0),
        Check::exact("flow mismatches", mismatches as f64, 0.0, 0.0),
        Check::exact("errored seeds", errored as f64, 0.0, 0.0),
    ];
    let report = ExperimentReport::from_checks("tame-ladder", param_map(p), checks, p.seeds, errored);
    Ok(Outcome { report, data })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TameSharpnessParams {
    pub q: f64,
    pub seeds: u64,
    pub half_width: i64,
    pub tol: f64,
    /// Ladder `i_k = ladder_lo · (ladder_hi/ladder_lo)^{k/(points−1)}`, rounded.
    pub ladder_lo: i64,
    pub ladder_hi: i64,
    pub ladder_points: usize,
    /// The lower target is `lower_factor / ln(1/q)`.
    pub lower_factor: f64,
    pub tame_ceiling: f64,
}

impl Default for TameSharpnessParams {
    fn default() -> Self {
        Self {
            q: 0.5,
            seeds: 10,
            half_width: 2000,
            tol: 1e-6,
            ladder_lo: 500,
            ladder_hi: 2000,
            ladder_points: 9,
            lower_factor: 0.5,
            tame_ceiling: 20.0,
        }
    }
}

impl TameSharpnessParams {
    pub fn ladder(&self) -> Vec<i64> {
        let (lo, hi) = (self.ladder_lo as f64, self.ladder_hi as f64);
        let k = (self.ladder_points.max(2) - 1) as f64;
        (0..self.ladder_points)
            .map(|j| (lo * (hi / lo).powf(j as f64 / k)).round() as i64)
            .collect()
    }
}

impl Params for TameSharpnessParams {
    fn validate(&self) -> std::result::Result<(), String> {
        positive("seeds", self.seeds)?;
        probability("q", self.q, false)?;
        if self.q == 0.0 {
            return Err("q must be positive".into());
        }
        if !(3 <= self.ladder_lo && self.ladder_lo <= self.ladder_hi && self.ladder_hi <= self.half_width) {
            return Err("need 3 <= ladder_lo <= ladder_hi <= half_width".into());
        }
        positive("ladder_points", self.ladder_points as u64)?;
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err("tol must lie in (0,1)".into());
        }
        Ok(())
    }
}

struct SharpTrial {
    /// `(i, M(σ, i+1/2))` at the ladder points.
    ladder: Vec<(i64, u64)>,
    max_ratio: f64,
    block_max: f64,
}

pub(super) fn tame_sharpness(p: &TameSharpnessParams, seed: u64) -> Result<Outcome> {
    let w = Interval::new(-p.half_width, p.half_width)?;
    let ladder = p.ladder();
    let results = run_trials(p.seeds, seed, |s| {
        let o = EdgeOracle::new(1.0 - p.q, s)?;
        let t = sample_tame(&TameSampleConfig::new(0, w, p.tol), &o, MatchOptions::default())?;
        let profiles = crossing_profiles(&t.matching, w)?;
        let m_at = |i: i64| profiles[(i - w.lo) as usize].m_max;
        let block_max = (p.ladder_lo..=p.ladder_hi)
            .map(|i| m_at(i) as f64 / (i as f64).ln())
            .fold(0.0, f64::max);
        Ok(SharpTrial {
            ladder: ladder.iter().map(|&i| (i, m_at(i))).collect(),
            max_ratio: growth_diagnostics(&profiles).max_m_over_log,
            block_max,
        })
    });
    let (values, errored) = split(results);
    let mut data = DataTable::new(&["trial", "i", "m_max", "ratio"]);
    let (mut min_ladder, mut max_ratio, mut min_block) = (f64::INFINITY, 0.0f64, f64::INFINITY);
    for (t, v) in values.iter().enumerate() {
        let Some(v) = v else { continue };
        for &(i, m) in &v.ladder {
            let r = m as f64 / (i as f64).ln();
            min_ladder = min_ladder.min(r);
            data.push(row![t, i, m, r]);
        }
        max_ratio = max_ratio.max(v.max_ratio);
        min_block = min_block.min(v.block_max);
    }
    let lower = p.lower_factor / (1.0 / p.q).ln();
    let checks = vec![
        Check::with_band("min over ladder of M/ln i", min_ladder, 0.0, lower, Relation::AtLeast, 0.0),
        Check::with_band("max over window of M/ln|i|", max_ratio, 0.0, p.tame_ceiling, Relation::AtMost, 0.0),
        Check::with_band(
            "min over seeds of block max of M/ln i",
            min_block,
            0.0,
            lower,
            Relation::AtLeast,
            0.0,
        ),
        Check::exact("errored seeds", errored as f64, 0.0, 0.0),
    ];
    let report = ExperimentReport::from_checks("tame-sharpness", param_map(p), checks, p.seeds, errored);
    Ok(Outcome { report, data })
}
