//! Window samples of the tame matching `σ_n` of flow `n`, the limit of the
//! stable matchings `σ_{n,m}` of `K_{(−∞,T],(−∞,T+n]}(p)` as `T → ∞`.
//!
//! `m` is measured from the window's lower edge: `T = lo + m`. Matchings at
//! `m` and `2m` are compared on the window, doubling `m` until they agree and
//! the coupling bound `c^{m−k}` (`k = hi − lo`, `c = 1 − (1−q)(q)_∞²`) is at
//! most the requested tolerance.

use serde::{Deserialize, Serialize};

use crate::analysis::qseries::coupling_constant;
use crate::error::{Error, Result};
use crate::index_set::IndexSet;
use crate::matching::{Interval, WindowMatching};
use crate::oracle::{Compatibility, EdgeOracle};

use super::engine::{MatchOptions, TopDownMatcher};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TameSampleConfig {
    pub flow: i64,
    pub window: Interval,
    pub error_tol: f64,
    pub initial_m: i64,
    pub max_m: i64,
}

impl TameSampleConfig {
    pub fn new(flow: i64, window: Interval, error_tol: f64) -> Self {
        let span = window.hi - window.lo + 1;
        Self {
            flow,
            window,
            error_tol,
            initial_m: span.max(16),
            max_m: span.max(16) << 16,
        }
    }

    fn validate(&self) -> Result<()> {
        let span = self.window.hi - self.window.lo + 1;
        if !(self.error_tol > 0.0 && self.error_tol < 1.0) {
            return Err(Error::InvalidArgument(format!("error_tol {} not in (0,1)", self.error_tol)));
        }
        if self.initial_m < span.max(1) {
            return Err(Error::InvalidArgument(format!(
                "initial_m {} below window span {span}",
                self.initial_m
            )));
        }
        if self.max_m < self.initial_m {
            return Err(Error::InvalidArgument("max_m below initial_m".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TameSample {
    pub matching: WindowMatching,
    /// The `m` whose matching agreed with the one at `2m`.
    pub m_used: i64,
    /// Upper bound on the probability that the window differs from `σ_n`.
    pub residual_bound: f64,
}

/// `σ_{n,m}` revealed until the window is settled.
pub fn sample_finite_m<C: Compatibility + ?Sized>(
    flow: i64,
    window: Interval,
    m: i64,
    oracle: &C,
    opts: MatchOptions,
) -> Result<WindowMatching> {
    let top = window.lo + m;
    let males = IndexSet::semi_infinite(top);
    let females = IndexSet::semi_infinite(top + flow);
    let mut matcher = TopDownMatcher::new(&males, &females, oracle, opts);
    matcher.run_until_settled(window.lo)?;
    let full = matcher.to_matching(window, Some(flow), true)?;
    restrict(&full, window, Some(flow))
}

fn restrict(m: &WindowMatching, window: Interval, flow: Option<i64>) -> Result<WindowMatching> {
    let mut b = WindowMatching::builder(window);
    for (i, j) in m.edges_meeting(window) {
        b.pair(i, j);
    }
    b.flow(flow).sealed(m.is_sealed()).build()
}

/// Samples `σ_n` on the window with residual error at most `error_tol`.
pub fn sample_tame(
    config: &TameSampleConfig,
    oracle: &EdgeOracle,
    opts: MatchOptions,
) -> Result<TameSample> {
    config.validate()?;
    let c = coupling_constant(oracle.q());
    let k = config.window.hi - config.window.lo;
    let mut m = config.initial_m;
    let mut current = sample_finite_m(config.flow, config.window, m, oracle, opts)?;
    loop {
        let Some(next_m) = m.checked_mul(2).filter(|&x| x <= config.max_m) else {
            return Err(Error::MaxMExceeded {
                max_m: config.max_m,
                partial: Box::new(current),
            });
        };
        let next = sample_finite_m(config.flow, config.window, next_m, oracle, opts)?;
        let bound = c.powf((m - k) as f64);
        if next == current && bound <= config.error_tol {
            return Ok(TameSample {
                matching: next,
                m_used: m,
                residual_bound: bound,
            });
        }
        m = next_m;
        current = next;
    }
}
