use serde::{Deserialize, Serialize};

use mallows_core::stats::{median, slope};
use mallows_core::wild::{
    audit_stability, build_wild, build_wild_sharp, replay_trace, WildConfig, WildConstruction, WildSharpConfig,
    WildVariant,
};
use mallows_core::{Check, EdgeOracle, ExperimentReport, Individual, Partner, Relation};

use super::{param_map, positive, probability, row, DataTable, Outcome, Params};
use crate::error::Result;
use crate::trials::{run_trials, split};

const VARIANTS: [WildVariant; 3] = [
    WildVariant::NotPerfect,
    WildVariant::NotLocallyFinite,
    WildVariant::LocallyFiniteWild,
];

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WildAuditParams {
    pub p: f64,
    pub steps: usize,
    pub runs: u64,
    /// Sequences compared for distinctness; missing entries default to 1.
    pub a_seqs: Vec<Vec<u64>>,
    pub negative_window: i64,
    pub scan_cap: u64,
}

impl Default for WildAuditParams {
    fn default() -> Self {
        Self {
            p: 0.3,
            steps: 10,
            runs: 20,
            a_seqs: vec![vec![1], vec![2], vec![1, 2], vec![1, 1, 2]],
            negative_window: 20,
            scan_cap: mallows_core::wild::DEFAULT_WILD_SCAN_CAP,
        }
    }
}

impl Params for WildAuditParams {
    fn validate(&self) -> std::result::Result<(), String> {
        positive("runs", self.runs)?;
        positive("steps", self.steps as u64)?;
        positive("scan_cap", self.scan_cap)?;
        probability("p", self.p, true)?;
        if self.a_seqs.iter().flatten().any(|&a| a == 0) {
            return Err("a_seqs entries must be positive".into());
        }
        Ok(())
    }
}

#[derive(Default)]
struct AuditTrial {
    blocking: usize,
    replay: usize,
    negative_females_matched: usize,
    misrouted: usize,
    identical_pairs: usize,
}

fn config(p: &WildAuditParams, v: WildVariant, a_seq: Vec<u64>) -> WildConfig {
    let mut c = WildConfig::new(v, p.steps);
    c.a_seq = a_seq;
    c.scan_cap = p.scan_cap;
    c.negative_window = p.negative_window;
    c
}

fn audit_run(p: &WildAuditParams, o: &EdgeOracle) -> mallows_core::Result<AuditTrial> {
    let mut t = AuditTrial::default();
    for v in VARIANTS {
        let w = build_wild(&config(p, v, Vec::new()), o)?;
        t.blocking += audit_stability(&w, o).len();
        t.replay += replay_trace(&w, o);
        match v {
            WildVariant::NotPerfect => {
                t.negative_females_matched += (-p.negative_window.max(1)..0)
                    .filter(|&j| w.matching.female(j) != Some(Partner::Unmatched))
                    .count();
            }
            WildVariant::NotLocallyFinite => {
                t.misrouted += w
                    .steps
                    .iter()
                    .filter_map(|s| match s.individual {
                        Individual::Female(j) if j < 0 => Some(j),
                        _ => None,
                    })
                    .filter(|&j| w.matching.sigma_inv(j).is_none_or(|i| i < 0))
                    .count();
            }
            WildVariant::LocallyFiniteWild => {}
        }
        let built: Vec<WildConstruction> = p
            .a_seqs
            .iter()
            .map(|a| build_wild(&config(p, v, a.clone()), o))
            .collect::<mallows_core::Result<_>>()?;
        for (x, a) in built.iter().enumerate() {
            for b in &built[x + 1..] {
                t.identical_pairs += (a.edges() == b.edges()) as usize;
            }
        }
    }
    Ok(t)
}

pub(super) fn wild_audit(p: &WildAuditParams, seed: u64) -> Result<Outcome> {
    let results = run_trials(p.runs, seed, |s| audit_run(p, &EdgeOracle::new(p.p, s)?));
    let (values, errored) = split(results);
    let mut data = DataTable::new(&[
        "run",
        "blocking_pairs",
        "replay_mismatches",
        "negative_females_matched",
        "misrouted_negative_females",
        "identical_outputs",
    ]);
    let mut total = AuditTrial::default();
    for (r, v) in values.iter().enumerate() {
        let Some(v) = v else { continue };
        data.push(row![r, v.blocking, v.replay, v.negative_females_matched, v.misrouted, v.identical_pairs]);
        total.blocking += v.blocking;
        total.replay += v.replay;
        total.negative_females_matched += v.negative_females_matched;
        total.misrouted += v.misrouted;
        total.identical_pairs += v.identical_pairs;
    }
    let zero = |label: &str, x: usize| Check::exact(label, x as f64, 0.0, 0.0);
    let checks = vec![
        zero("blocking pairs", total.blocking),
        zero("trace replay mismatches", total.replay),
        zero("matched negative females (not-perfect)", total.negative_females_matched),
        zero("negative females with negative partner (not-locally-finite)", total.misrouted),
        zero("identical outputs for distinct sequences", total.identical_pairs),
        zero("stalled runs", errored as usize),
    ];
    let report = ExperimentReport::from_checks("wild-audit", param_map(p), checks, p.runs, errored);
    Ok(Outcome { report, data })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WildSharpParams {
    pub q: f64,
    pub steps: usize,
    pub runs: u64,
    /// Accepted range for the median slope, in units of `2 ln(1/q)`.
    pub band: [f64; 2],
    pub scan_cap: u64,
}

impl Default for WildSharpParams {
    fn default() -> Self {
        Self {
            q: 0.5,
            steps: 16,
            runs: 200,
            band: [0.3, 1.5],
            scan_cap: mallows_core::wild::DEFAULT_WILD_SCAN_CAP,
        }
    }
}

impl Params for WildSharpParams {
    fn validate(&self) -> std::result::Result<(), String> {
        positive("runs", self.runs)?;
        positive("scan_cap", self.scan_cap)?;
        if self.steps < 2 {
            return Err("steps must be at least 2".into());
        }
        probability("q", self.q, false)?;
        if self.q == 0.0 {
            return Err("q must be positive".into());
        }
        if self.band[0] > self.band[1] {
            return Err("band must be increasing".into());
        }
        Ok(())
    }
}

struct SharpRun {
    h_trace: Vec<i64>,
    monotone: bool,
    /// Steps whose same-gender constraint count leaves `[⌊(n−1)/2⌋, n−1]`.
    count_violations: usize,
    slope: Option<f64>,
}

fn sharp_run(p: &WildSharpParams, o: &EdgeOracle) -> mallows_core::Result<SharpRun> {
    let mut cfg = WildSharpConfig::new(p.steps);
    cfg.scan_cap = p.scan_cap;
    cfg.trace = false;
    let w = build_wild_sharp(&cfg, o)?;
    let count_violations = w
        .steps
        .iter()
        .enumerate()
        .filter(|(k, s)| {
            let n = *k as u64 + 1;
            s.partner.is_some() && !((n - 1) / 2 <= s.constraints && s.constraints < n)
        })
        .count();
    let (xs, ys): (Vec<f64>, Vec<f64>) = w
        .h_trace
        .iter()
        .enumerate()
        .filter(|(_, &h)| h > 0)
        .map(|(n, &h)| (n as f64, (h as f64).ln()))
        .unzip();
    Ok(SharpRun {
        monotone: w.h_trace.windows(2).all(|x| x[0] <= x[1]),
        h_trace: w.h_trace,
        count_violations,
        slope: (xs.len() >= 2).then(|| slope(&xs, &ys)),
    })
}

pub(super) fn wild_sharp(p: &WildSharpParams, seed: u64) -> Result<Outcome> {
    let results = run_trials(p.runs, seed, |s| sharp_run(p, &EdgeOracle::new(1.0 - p.q, s)?));
    let (values, errored) = split(results);
    let mut data = DataTable::new(&["run", "n", "h"]);
    let mut slopes = Vec::new();
    let (mut non_monotone, mut count_violations) = (0, 0);
    for (r, v) in values.iter().enumerate() {
        let Some(v) = v else { continue };
        for (n, h) in v.h_trace.iter().enumerate() {
            data.push(row![r, n, h]);
        }
        non_monotone += !v.monotone as usize;
        count_violations += v.count_violations;
        slopes.extend(v.slope);
    }
    let unit = 2.0 * (1.0 / p.q).ln();
    let m = median(&slopes);
    let checks = vec![
        Check::with_band("median slope of ln H_n (lower)", m, 0.0, p.band[0] * unit, Relation::AtLeast, 0.0),
        Check::with_band("median slope of ln H_n (upper)", m, 0.0, p.band[1] * unit, Relation::AtMost, 0.0),
        Check::exact("non-monotone traces", non_monotone as f64, 0.0, 0.0),
        Check::exact("constraint count violations", count_violations as f64, 0.0, 0.0),
        Check::exact("stalled runs", errored as f64, 0.0, 0.0),
    ];
    let report = ExperimentReport::from_checks("wild-sharp", param_map(p), checks, p.runs, errored);
    Ok(Outcome { report, data })
}
