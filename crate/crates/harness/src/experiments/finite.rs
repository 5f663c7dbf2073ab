use std::collections::HashMap;
use std::str::FromStr;

use num::{BigRational, Num, One, Zero};
use serde::{Deserialize, Serialize};

use mallows_core::analysis::{mallows_pmf, mallows_pmf_exact};
use mallows_core::oracle::GridEdges;
use mallows_core::permutation::{all_permutations, FinitePermutation};
use mallows_core::samplers::{both_perfect_trial, correlation_lower_bound, perfect_match_probability, stable_match_finite};
use mallows_core::stats::proportion;
use mallows_core::{Check, EdgeOracle, ExperimentReport, IndexSet, Relation};

use super::{param_map, positive, probability, row, DataTable, Outcome, Params};
use crate::error::Result;
use crate::trials::{run_trials, split, sub_seed};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExactMallowsParams {
    /// Sizes `1..=n_exact` are checked in exact rational arithmetic.
    pub n_exact: usize,
    /// Values of `q` as fractions, e.g. `"1/2"`.
    pub q_exact: Vec<String>,
    pub n_float: usize,
    pub q_float: Vec<f64>,
    pub float_tol: f64,
}

impl Default for ExactMallowsParams {
    fn default() -> Self {
        Self {
            n_exact: 3,
            q_exact: vec!["1/2".into(), "1/3".into(), "4/5".into()],
            n_float: 4,
            q_float: vec![0.5, 0.3],
            float_tol: 1e-12,
        }
    }
}

fn parse_q(s: &str) -> std::result::Result<BigRational, String> {
    let q = BigRational::from_str(s.trim()).map_err(|_| format!("cannot parse q = {s:?} as a fraction"))?;
    if q < BigRational::zero() || q >= BigRational::one() {
        return Err(format!("q = {s} is out of range"));
    }
    Ok(q)
}

impl Params for ExactMallowsParams {
    fn validate(&self) -> std::result::Result<(), String> {
        if !(1..=3).contains(&self.n_exact) {
            return Err("n_exact must be in 1..=3".into());
        }
        if !(1..=4).contains(&self.n_float) {
            return Err("n_float must be in 1..=4".into());
        }
        for q in &self.q_exact {
            parse_q(q)?;
        }
        for &q in &self.q_float {
            probability("q_float", q, false)?;
        }
        if !(self.float_tol > 0.0) {
            return Err("float_tol must be positive".into());
        }
        Ok(())
    }
}

/// Law of the stable matching of `[0,n)²` conditioned on perfectness,
/// aggregated over all `2^{n²}` edge sets with weight `p^{#edges} q^{#non-edges}`.
fn conditional_law<T: Num + Clone>(n: usize, p: &T, q: &T) -> HashMap<Vec<i64>, T> {
    let a = IndexSet::interval(0, n as i64 - 1);
    let pow = |x: &T, k: usize| (0..k).fold(T::one(), |acc, _| acc * x.clone());
    let mut law: HashMap<Vec<i64>, T> = HashMap::new();
    let mut total = T::zero();
    for mask in 0..(1u64 << (n * n)) {
        let edges = GridEdges::new(0, n, mask);
        let out = stable_match_finite(&a, &a, &edges).expect("finite matching cannot fail");
        let values: Option<Vec<i64>> = (0..n as i64).map(|i| out.sigma(i)).collect();
        if let Some(v) = values {
            let k = mask.count_ones() as usize;
            let w = pow(p, k) * pow(q, n * n - k);
            let e = law.entry(v).or_insert_with(T::zero);
            *e = e.clone() + w.clone();
            total = total + w;
        }
    }
    for v in law.values_mut() {
        *v = v.clone() / total.clone();
    }
    law
}

pub(super) fn exact_mallows(p: &ExactMallowsParams, _seed: u64) -> Result<Outcome> {
    let mut checks = Vec::new();
    let mut data = DataTable::new(&["mode", "q", "n", "permutation", "law", "mallows"]);
    let mut enumerated = 0u64;
    let show = |perm: &FinitePermutation| {
        perm.values().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
    };
    for qs in &p.q_exact {
        let q = parse_q(qs).expect("validated");
        let pp = BigRational::one() - &q;
        for n in 1..=p.n_exact {
            let law = conditional_law(n, &pp, &q);
            enumerated += 1 << (n * n);
            let mut all_equal = true;
            for perm in all_permutations(n) {
                let got = law.get(perm.values()).cloned().unwrap_or_else(BigRational::zero);
                let want = mallows_pmf_exact(&perm, &q);
                all_equal &= got == want;
                data.push(row!["exact", qs, n, show(&perm), got, want]);
            }
            checks.push(Check::holds(format!("exact law n={n} q={qs}"), all_equal));
        }
    }
    let n = p.n_float;
    for &q in &p.q_float {
        let law = conditional_law(n, &(1.0 - q), &q);
        enumerated += 1 << (n * n);
        let mut worst = 0.0f64;
        for perm in all_permutations(n) {
            let got = law.get(perm.values()).copied().unwrap_or(0.0);
            let want = mallows_pmf(&perm, q);
            worst = worst.max((got - want).abs());
            data.push(row!["float", q, n, show(&perm), got, want]);
        }
        checks.push(Check::with_band(
            format!("float law n={n} q={q} max deviation"),
            worst,
            0.0,
            0.0,
            Relation::AtMost,
            p.float_tol,
        ));
    }
    let report = ExperimentReport::from_checks("exact-mallows", param_map(p), checks, enumerated, 0);
    Ok(Outcome { report, data })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizeAndP {
    pub n: u32,
    pub p: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerfectProbParams {
    pub cases: Vec<SizeAndP>,
    pub trials: u64,
}

impl Default for PerfectProbParams {
    fn default() -> Self {
        Self {
            cases: vec![SizeAndP { n: 5, p: 0.5 }, SizeAndP { n: 10, p: 0.6 }],
            trials: 100_000,
        }
    }
}

impl Params for PerfectProbParams {
    fn validate(&self) -> std::result::Result<(), String> {
        positive("trials", self.trials)?;
        if self.cases.is_empty() {
            return Err("cases must not be empty".into());
        }
        for c in &self.cases {
            positive("n", c.n as u64)?;
            probability("p", c.p, true)?;
        }
        Ok(())
    }
}

pub(super) fn perfect_prob(p: &PerfectProbParams, seed: u64) -> Result<Outcome> {
    let mut checks = Vec::new();
    let mut data = DataTable::new(&["n", "p", "trial", "perfect"]);
    let (mut attempted, mut errored) = (0, 0);
    for (k, c) in p.cases.iter().enumerate() {
        let a = IndexSet::interval(0, c.n as i64 - 1);
        let results = run_trials(p.trials, sub_seed(seed, k as u64), |s| {
            let o = EdgeOracle::new(c.p, s)?;
            Ok(stable_match_finite(&a, &a, &o)?.is_perfect())
        });
        let (values, e) = split(results);
        attempted += p.trials;
        errored += e;
        let hits = values.iter().filter(|v| **v == Some(true)).count() as u64;
        let (est, se) = proportion(hits, p.trials - e);
        for (t, v) in values.iter().enumerate() {
            if let Some(v) = v {
                data.push(row![c.n, c.p, t, *v as u8]);
            }
        }
        let target = perfect_match_probability(c.n, 1.0 - c.p);
        checks.push(Check::monte_carlo(
            format!("P(perfect) n={} p={}", c.n, c.p),
            est,
            se,
            target,
            Relation::Equals,
        ));
    }
    let report = ExperimentReport::from_checks("perfect-prob", param_map(p), checks, attempted, errored);
    Ok(Outcome { report, data })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalPair {
    /// `[lo, hi]` used for both males and females.
    pub first: [i64; 2],
    pub second: [i64; 2],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorrelationParams {
    pub p: f64,
    pub pairs: Vec<IntervalPair>,
    pub trials: u64,
}

impl Default for CorrelationParams {
    fn default() -> Self {
        Self {
            p: 0.5,
            pairs: vec![
                IntervalPair { first: [0, 2], second: [1, 3] },
                IntervalPair { first: [0, 3], second: [2, 5] },
            ],
            trials: 100_000,
        }
    }
}

impl Params for CorrelationParams {
    fn validate(&self) -> std::result::Result<(), String> {
        positive("trials", self.trials)?;
        probability("p", self.p, true)?;
        if self.pairs.is_empty() {
            return Err("pairs must not be empty".into());
        }
        for pair in &self.pairs {
            for [lo, hi] in [pair.first, pair.second] {
                if lo > hi {
                    return Err(format!("empty interval [{lo}, {hi}]"));
                }
            }
        }
        Ok(())
    }
}

pub(super) fn correlation(p: &CorrelationParams, seed: u64) -> Result<Outcome> {
    let mut checks = Vec::new();
    let mut data = DataTable::new(&["pair", "trial", "first_perfect", "second_perfect"]);
    let (mut attempted, mut errored) = (0, 0);
    for (k, pair) in p.pairs.iter().enumerate() {
        let a = IndexSet::interval(pair.first[0], pair.first[1]);
        let b = IndexSet::interval(pair.second[0], pair.second[1]);
        let results = run_trials(p.trials, sub_seed(seed, k as u64), |s| {
            let o = EdgeOracle::new(p.p, s)?;
            both_perfect_trial((&a, &a), (&b, &b), &o)
        });
        let (values, e) = split(results);
        attempted += p.trials;
        errored += e;
        let hits = values.iter().filter(|v| **v == Some((true, true))).count() as u64;
        for (t, v) in values.iter().enumerate() {
            if let Some((x, y)) = v {
                data.push(row![k, t, *x as u8, *y as u8]);
            }
        }
        let (est, se) = proportion(hits, p.trials - e);
        let bound = correlation_lower_bound(a.len().unwrap_or(0), b.len().unwrap_or(0), 1.0 - p.p);
        checks.push(Check::monte_carlo(
            format!(
                "P(both perfect) [{},{}] & [{},{}]",
                pair.first[0], pair.first[1], pair.second[0], pair.second[1]
            ),
            est,
            se,
            bound,
            Relation::AtLeast,
        ));
    }
    let report = ExperimentReport::from_checks("correlation", param_map(p), checks, attempted, errored);
    Ok(Outcome { report, data })
}
