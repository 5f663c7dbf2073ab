use std::collections::BTreeMap;

use serde_json::json;

use crate::error::{Error, Result};
use crate::index_set::IndexSet;
use crate::oracle::{Compatibility, EdgeOracle};
use crate::report::{Check, ExperimentReport, Relation};
use crate::stats::proportion;

use super::finite::{perfect_match_probability, stable_match_finite};

/// Whether `σ_{A,B}` and `σ_{A′,B′}` are perfect on one graph.
pub fn both_perfect_trial<C: Compatibility + ?Sized>(
    first: (&IndexSet, &IndexSet),
    second: (&IndexSet, &IndexSet),
    oracle: &C,
) -> Result<(bool, bool)> {
    let a = stable_match_finite(first.0, first.1, oracle)?.is_perfect();
    let b = stable_match_finite(second.0, second.1, oracle)?.is_perfect();
    Ok((a, b))
}

/// The lower bound `∏_{k≤|A|}(1−q^k) · ∏_{k≤|A′|}(1−q^k)` on `P(both perfect)`.
pub fn correlation_lower_bound(n1: usize, n2: usize, q: f64) -> f64 {
    perfect_match_probability(n1 as u32, q) * perfect_match_probability(n2 as u32, q)
}

/// Monte Carlo estimate of `P(σ_{A,B} and σ_{A′,B′} both perfect)`, trial `t`
/// using the oracle seeded with `seed ^ t`.
pub fn both_perfect_correlation(
    first: (&IndexSet, &IndexSet),
    second: (&IndexSet, &IndexSet),
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<ExperimentReport> {
    let size = |s: &IndexSet| {
        s.len()
            .filter(|&n| n >= 1)
            .ok_or_else(|| Error::InvalidIndexSet("need nonempty finite sets".into()))
    };
    let (n1, n2) = (size(first.0)?, size(second.0)?);
    if size(first.1)? != n1 || size(second.1)? != n2 {
        return Err(Error::InvalidArgument("|A| must equal |B|".into()));
    }
    let mut hits = 0;
    for t in 0..trials {
        let oracle = EdgeOracle::new(p, seed ^ t)?;
        if both_perfect_trial(first, second, &oracle)? == (true, true) {
            hits += 1;
        }
    }
    let (est, se) = proportion(hits, trials);
    let bound = correlation_lower_bound(n1, n2, 1.0 - p);
    let params = BTreeMap::from([
        ("p".to_string(), json!(p)),
        ("first".to_string(), json!([first.0, first.1])),
        ("second".to_string(), json!([second.0, second.1])),
        ("seed".to_string(), json!(seed)),
    ]);
    let check = Check::monte_carlo("P(both perfect) >= product bound", est, se, bound, Relation::AtLeast);
    Ok(ExperimentReport::from_checks("correlation", params, vec![check], trials, 0))
}
