use serde::{Deserialize, Serialize};

use mallows_core::analysis::{domination_constant, q_pochhammer_inf, CONSTANT_TOL};
use mallows_core::samplers::{cut_probability_given, ChainBackend, CutProcess, DistCutChain, GraphCutChain};
use mallows_core::stats::{batch_means, proportion};
use mallows_core::{Check, EdgeOracle, ExperimentReport, Relation};

use super::{param_map, positive, probability, row, DataTable, Outcome, Params};
use crate::error::Result;
use crate::trials::sub_seed;

/// Runs a chain for `burn_in + steps` steps, reporting `(U_n, cut)` for the
/// last `steps` of them.
fn drive(
    backend: ChainBackend,
    q: f64,
    seed: u64,
    burn_in: u64,
    steps: u64,
    mut visit: impl FnMut(u64, bool),
) -> Result<()> {
    fn go(c: &mut dyn CutProcess, burn_in: u64, steps: u64, visit: &mut dyn FnMut(u64, bool)) {
        for _ in 0..burn_in {
            c.step();
        }
        for _ in 0..steps {
            let u = c.state().unmatched_count;
            let cut = c.step();
            visit(u, cut);
        }
    }
    match backend {
        ChainBackend::Graph => {
            let o = EdgeOracle::new(1.0 - q, seed)?;
            go(&mut GraphCutChain::new(&o), burn_in, steps, &mut visit);
        }
        ChainBackend::Dist => go(&mut DistCutChain::new(q, seed), burn_in, steps, &mut visit),
    }
    Ok(())
}

fn check_batches(steps: u64, batches: usize) -> std::result::Result<(), String> {
    positive("steps", steps)?;
    if batches < 2 || steps < 2 * batches as u64 {
        return Err("need at least two batches of two steps".into());
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CutDensityParams {
    pub qs: Vec<f64>,
    pub steps: u64,
    pub burn_in: u64,
    pub batches: usize,
    pub backend: ChainBackend,
}

impl Default for CutDensityParams {
    fn default() -> Self {
        Self {
            qs: vec![0.3, 0.5],
            steps: 100_000,
            burn_in: 1_000,
            batches: 100,
            backend: ChainBackend::Graph,
        }
    }
}

impl Params for CutDensityParams {
    fn validate(&self) -> std::result::Result<(), String> {
        check_batches(self.steps, self.batches)?;
        if self.qs.is_empty() {
            return Err("qs must not be empty".into());
        }
        self.qs.iter().try_for_each(|&q| probability("q", q, false))
    }
}

pub(super) fn cut_density(p: &CutDensityParams, seed: u64) -> Result<Outcome> {
    let mut checks = Vec::new();
    let mut data = DataTable::new(&["q", "batch", "cut_frequency"]);
    for (k, &q) in p.qs.iter().enumerate() {
        let mut flags = Vec::with_capacity(p.steps as usize);
        drive(p.backend, q, sub_seed(seed, k as u64), p.burn_in, p.steps, |_, cut| {
            flags.push(cut as u8 as f64)
        })?;
        let (est, se) = batch_means(&flags, p.batches);
        let size = flags.len() / p.batches;
        for (b, chunk) in flags.chunks(size).take(p.batches).enumerate() {
            data.push(row![q, b, chunk.iter().sum::<f64>() / chunk.len() as f64]);
        }
        let target = q_pochhammer_inf(q, CONSTANT_TOL)?.value;
        checks.push(Check::monte_carlo(format!("cut frequency q={q}"), est, se, target, Relation::Equals));
    }
    let attempted = p.steps * p.qs.len() as u64;
    let report = ExperimentReport::from_checks("cut-density", param_map(p), checks, attempted, 0);
    Ok(Outcome { report, data })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CutJumpParams {
    pub q: f64,
    pub steps: u64,
    pub burn_in: u64,
    pub u_max: u64,
    pub min_visits: u64,
    pub backend: ChainBackend,
}

impl Default for CutJumpParams {
    fn default() -> Self {
        Self {
            q: 0.5,
            steps: 1_000_000,
            burn_in: 1_000,
            u_max: 3,
            min_visits: 10_000,
            backend: ChainBackend::Graph,
        }
    }
}

impl Params for CutJumpParams {
    fn validate(&self) -> std::result::Result<(), String> {
        positive("steps", self.steps)?;
        probability("q", self.q, false)
    }
}

pub(super) fn cut_jump(p: &CutJumpParams, seed: u64) -> Result<Outcome> {
    let k = p.u_max as usize + 1;
    let mut visits = vec![0u64; k];
    let mut cuts = vec![0u64; k];
    drive(p.backend, p.q, seed, p.burn_in, p.steps, |u, cut| {
        if let Some(v) = visits.get_mut(u as usize) {
            *v += 1;
            cuts[u as usize] += cut as u64;
        }
    })?;
    let mut checks = Vec::new();
    let mut data = DataTable::new(&["u", "visits", "cuts", "frequency", "formula"]);
    for u in 0..k {
        let target = cut_probability_given(u as u64, p.q);
        let (est, se) = proportion(cuts[u], visits[u]);
        data.push(row![u, visits[u], cuts[u], est, target]);
        checks.push(Check::monte_carlo(format!("P(cut | U={u})"), est, se, target, Relation::Equals));
        checks.push(Check::with_band(
            format!("visits to U={u}"),
            visits[u] as f64,
            0.0,
            p.min_visits as f64,
            Relation::AtLeast,
            0.0,
        ));
    }
    let report = ExperimentReport::from_checks("cut-jump", param_map(p), checks, p.steps, 0);
    Ok(Outcome { report, data })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoCutRunsParams {
    pub q: f64,
    pub k_max: usize,
    pub steps: u64,
    pub burn_in: u64,
    pub batches: usize,
    pub backend: ChainBackend,
}

impl Default for NoCutRunsParams {
    fn default() -> Self {
        Self {
            q: 0.5,
            k_max: 10,
            steps: 200_000,
            burn_in: 1_000,
            batches: 100,
            backend: ChainBackend::Graph,
        }
    }
}

impl Params for NoCutRunsParams {
    fn validate(&self) -> std::result::Result<(), String> {
        check_batches(self.steps, self.batches)?;
        positive("k_max", self.k_max as u64)?;
        if self.k_max as u64 * 2 > self.steps {
            return Err("k_max too large for steps".into());
        }
        probability("q", self.q, false)
    }
}

pub(super) fn no_cut_runs(p: &NoCutRunsParams, seed: u64) -> Result<Outcome> {
    // gap[t] = number of consecutive cut-free positions ending at t
    let mut gaps = Vec::with_capacity(p.steps as usize);
    let mut run = 0u64;
    drive(p.backend, p.q, seed, p.burn_in, p.steps, |_, cut| {
        run = if cut { 0 } else { run + 1 };
        gaps.push(run);
    })?;
    let base = domination_constant(p.q);
    let mut checks = Vec::new();
    let mut data = DataTable::new(&["k", "frequency", "stderr", "bound"]);
    for k in 1..=p.k_max {
        let ys: Vec<f64> = gaps[k - 1..].iter().map(|&g| (g >= k as u64) as u8 as f64).collect();
        let (est, se) = batch_means(&ys, p.batches);
        let bound = base.powi(k as i32);
        data.push(row![k, est, se, bound]);
        checks.push(Check::monte_carlo(format!("P(no cut in {k})"), est, se, bound, Relation::AtMost));
    }
    let report = ExperimentReport::from_checks("no-cut-runs", param_map(p), checks, p.steps, 0);
    Ok(Outcome { report, data })
}
