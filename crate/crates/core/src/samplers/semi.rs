use crate::error::{Error, Result};
use crate::index_set::{is_balanced, IndexSet};
use crate::matching::{Interval, WindowMatching};
use crate::oracle::Compatibility;

use super::engine::{MatchOptions, TopDownMatcher};

/// The unique stable matching of `K_{(−∞,m],(−∞,m]}(p)`, computed top-down
/// until every window male is processed and every window female is matched.
pub fn sample_semiinfinite<C: Compatibility + ?Sized>(
    m: i64,
    window: Interval,
    oracle: &C,
    opts: MatchOptions,
) -> Result<WindowMatching> {
    if window.hi > m {
        return Err(Error::InvalidArgument(format!(
            "window {window} must lie in (−∞, {m}]"
        )));
    }
    let ray = IndexSet::semi_infinite(m);
    let mut matcher = TopDownMatcher::new(&ray, &ray, oracle, opts);
    matcher.run_until_settled(window.lo)?;
    matcher.to_matching(window, Some(0), true)
}

/// The unique stable matching `σ_{A,B}` of a balanced pair of low sets,
/// revealed until the window is settled.
pub fn stable_match_low_pair<C: Compatibility + ?Sized>(
    males: &IndexSet,
    females: &IndexSet,
    window: Interval,
    oracle: &C,
    opts: MatchOptions,
) -> Result<WindowMatching> {
    if !is_balanced(males, females)? {
        return Err(Error::Unbalanced);
    }
    let mut matcher = TopDownMatcher::new(males, females, oracle, opts);
    matcher.run_until_settled(window.lo)?;
    let flow = (males == females).then_some(0);
    matcher.to_matching(window, flow, true)
}
