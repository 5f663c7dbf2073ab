//! Incremental top-down stable matching over finite and low index sets.
//!
//! Males are processed in decreasing order; each takes the most attractive
//! compatible female still unmatched, or stays unmatched when none exists
//! (only possible for a finite female set). For an infinite female set the
//! females at or below `frontier` have never been examined and are all
//! unmatched, so only the finitely many females above it need an explicit
//! record.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::index_set::IndexSet;
use crate::matching::{Interval, Partner, WindowMatching};
use crate::oracle::{Compatibility, DEFAULT_SCAN_CAP};

/// Default number of males a sampler may process.
pub const DEFAULT_STEP_BUDGET: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatchOptions {
    pub scan_cap: u64,
    pub step_budget: u64,
}

impl Default for MatchOptions {
    fn default() -> Self {
        Self {
            scan_cap: DEFAULT_SCAN_CAP,
            step_budget: DEFAULT_STEP_BUDGET,
        }
    }
}

pub struct TopDownMatcher<'a, C: Compatibility + ?Sized> {
    oracle: &'a C,
    males: IndexSet,
    next_male: Option<i64>,
    pool: BTreeSet<i64>,
    frontier: Option<i64>,
    pairs: Vec<(i64, Partner)>,
    min_partner: i64,
    opts: MatchOptions,
}

impl<'a, C: Compatibility + ?Sized> TopDownMatcher<'a, C> {
    pub fn new(males: &IndexSet, females: &IndexSet, oracle: &'a C, opts: MatchOptions) -> Self {
        let (pool, frontier) = match females {
            IndexSet::Finite(v) => (v.iter().copied().collect(), None),
            IndexSet::SemiInfinite(m) => (BTreeSet::new(), Some(*m)),
            IndexSet::Low { r, extras } => (extras.iter().copied().collect(), Some(*r)),
        };
        Self {
            oracle,
            next_male: males.max(),
            males: males.clone(),
            pool,
            frontier,
            pairs: Vec::new(),
            min_partner: i64::MAX,
            opts,
        }
    }

    /// Processes the next male. Returns `None` once every male is processed.
    pub fn step(&mut self) -> Result<Option<(i64, Partner)>> {
        let Some(male) = self.next_male else {
            return Ok(None);
        };
        if self.pairs.len() as u64 >= self.opts.step_budget {
            return Err(Error::StepBudgetExceeded {
                budget: self.opts.step_budget,
            });
        }
        let partner = self.partner_for(male)?;
        if let Partner::Matched(j) = partner {
            self.min_partner = self.min_partner.min(j);
        }
        self.pairs.push((male, partner));
        self.next_male = self.males.pred(male);
        Ok(Some((male, partner)))
    }

    fn partner_for(&mut self, male: i64) -> Result<Partner> {
        let oracle = self.oracle;
        if let Some(&j) = self.pool.iter().rev().find(|&&j| oracle.is_compatible(male, j)) {
            self.pool.remove(&j);
            return Ok(Partner::Matched(j));
        }
        let Some(f) = self.frontier else {
            return Ok(Partner::Unmatched);
        };
        let hit = oracle.max_compatible_at_most(male, f, &BTreeSet::new(), self.opts.scan_cap)?;
        self.pool.extend(hit.index + 1..=f);
        self.frontier = Some(hit.index - 1);
        Ok(Partner::Matched(hit.index))
    }

    /// The most recently processed male.
    pub fn last_male(&self) -> Option<i64> {
        self.pairs.last().map(|&(i, _)| i)
    }

    pub fn next_male(&self) -> Option<i64> {
        self.next_male
    }

    pub fn steps(&self) -> u64 {
        self.pairs.len() as u64
    }

    pub fn pairs(&self) -> &[(i64, Partner)] {
        &self.pairs
    }

    /// Whether some female `>= t` is known to be unmatched so far.
    pub fn has_unmatched_female_at_least(&self, t: i64) -> bool {
        self.pool.range(t..).next().is_some() || self.frontier.is_some_and(|f| f >= t)
    }

    /// Every male `>= lo` is processed and every female `>= lo` is matched,
    /// so nothing at or above `lo` can change.
    pub fn settled_from(&self, lo: i64) -> bool {
        self.next_male.is_none_or(|m| m < lo) && !self.has_unmatched_female_at_least(lo)
    }

    /// After processing male `t`: no edge crosses `t − 1/2`.
    pub fn cut_below_last(&self) -> Option<i64> {
        let t = self.last_male()?;
        (self.min_partner >= t
            && self.pairs.iter().all(|(_, p)| *p != Partner::Unmatched)
            && !self.has_unmatched_female_at_least(t))
        .then_some(t)
    }

    /// Runs until [`settled_from`](Self::settled_from) holds for `lo`.
    pub fn run_until_settled(&mut self, lo: i64) -> Result<()> {
        while !self.settled_from(lo) {
            if self.step()?.is_none() {
                break;
            }
        }
        Ok(())
    }

    /// Runs until every male is processed (finite male sets only).
    pub fn run_to_end(&mut self) -> Result<()> {
        while self.step()?.is_some() {}
        Ok(())
    }

    /// Unmatched females above the frontier.
    pub fn unmatched_females(&self) -> impl Iterator<Item = i64> + '_ {
        self.pool.iter().copied()
    }

    /// Records every processed male with its partner.
    pub fn to_matching(&self, window: Interval, flow: Option<i64>, sealed: bool) -> Result<WindowMatching> {
        let mut b = WindowMatching::builder(window);
        for &(i, p) in &self.pairs {
            match p {
                Partner::Matched(j) => b.pair(i, j),
                Partner::Unmatched => b.unmatched_male(i),
                Partner::Unknown => b.unknown(crate::matching::Individual::Male(i)),
            };
        }
        b.flow(flow).sealed(sealed).build()
    }
}
