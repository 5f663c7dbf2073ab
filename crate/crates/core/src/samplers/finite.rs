use crate::error::{Error, Result};
use crate::index_set::IndexSet;
use crate::matching::{Interval, WindowMatching};
use crate::oracle::Compatibility;

use super::engine::{MatchOptions, TopDownMatcher};

/// The unique stable matching of `K_{A,B}(p)` for finite `A`, `B`.
///
/// Extra individuals on the larger side, and any that find no compatible
/// partner, are recorded as unmatched.
pub fn stable_match_finite<C: Compatibility + ?Sized>(
    males: &IndexSet,
    females: &IndexSet,
    oracle: &C,
) -> Result<WindowMatching> {
    if !males.is_finite() || !females.is_finite() {
        return Err(Error::InvalidIndexSet("stable_match_finite needs finite sets".into()));
    }
    let lo = males.min().into_iter().chain(females.min()).min().unwrap_or(0);
    let hi = males.max().into_iter().chain(females.max()).max().unwrap_or(0);
    let mut m = TopDownMatcher::new(males, females, oracle, MatchOptions {
        step_budget: u64::MAX,
        ..Default::default()
    });
    m.run_to_end()?;
    let mut b = m.to_matching(Interval::new(lo, hi)?, None, true)?.into_builder();
    for j in m.unmatched_females() {
        b.unmatched_female(j);
    }
    let mut out = b.build()?;
    if males == females && out.is_perfect() {
        out = out.into_builder().flow(Some(0)).build()?;
    }
    Ok(out)
}

/// `∏_{k=1}^n (1 − q^k)`.
pub fn perfect_match_probability(n: u32, q: f64) -> f64 {
    let mut qk = 1.0;
    let mut prod = 1.0;
    for _ in 0..n {
        qk *= q;
        prod *= 1.0 - qk;
    }
    prod
}
