//! The alpha-male chain on `K_{(−∞,−1],(−∞,−1]}(p)`.
//!
//! After `n` steps the `n` most attractive males and females `[−n, −1]` have
//! been revealed and `U_n` of those males are unmatched. Step `n + 1`
//! reveals male and female `−n − 1`; unmatched males then take partners in
//! decreasing order until one finds no compatible unmatched female, who
//! becomes the new alpha male. A cut at `−n − 3/2` occurs iff `U_{n+1} = 0`.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matching::{Individual, Interval, WindowMatching};
use crate::oracle::Compatibility;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutChainState {
    /// Number of revealed positions `n`.
    pub position: u64,
    /// `U_n`.
    pub unmatched_count: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainBackend {
    Graph,
    Dist,
}

pub trait CutProcess {
    /// Advances one position; returns the cut flag `U_{n+1} = 0`.
    fn step(&mut self) -> bool;

    fn state(&self) -> CutChainState;
}

/// Chain driven by the edge oracle; its matches are those of the semi-infinite
/// stable matching of `(−∞,−1]`.
pub struct GraphCutChain<'a, C: Compatibility + ?Sized> {
    oracle: &'a C,
    n: u64,
    males: BTreeSet<i64>,
    females: BTreeSet<i64>,
    pairs: Option<Vec<(i64, i64)>>,
}

impl<'a, C: Compatibility + ?Sized> GraphCutChain<'a, C> {
    pub fn new(oracle: &'a C) -> Self {
        Self {
            oracle,
            n: 0,
            males: BTreeSet::new(),
            females: BTreeSet::new(),
            pairs: None,
        }
    }

    /// Keeps every matched pair so [`partial`](Self::partial) can report it.
    pub fn recording(mut self) -> Self {
        self.pairs = Some(Vec::new());
        self
    }

    /// `σ_n`: the recorded pairs, with unmatched individuals in `[−n,−1]`
    /// marked unknown.
    pub fn partial(&self) -> Result<WindowMatching> {
        let lo = -(self.n.max(1) as i64);
        let mut b = WindowMatching::builder(Interval::new(lo, -1)?);
        for &(i, j) in self.pairs.iter().flatten() {
            b.pair(i, j);
        }
        for &i in &self.males {
            b.unknown(Individual::Male(i));
        }
        for &j in &self.females {
            b.unknown(Individual::Female(j));
        }
        b.build()
    }
}

impl<C: Compatibility + ?Sized> CutProcess for GraphCutChain<'_, C> {
    fn step(&mut self) -> bool {
        let fresh = -(self.n as i64) - 1;
        self.n += 1;
        self.males.insert(fresh);
        self.females.insert(fresh);
        while let Some(&alpha) = self.males.last() {
            let oracle = self.oracle;
            let Some(&j) = self.females.iter().rev().find(|&&j| oracle.is_compatible(alpha, j)) else {
                break;
            };
            self.males.remove(&alpha);
            self.females.remove(&j);
            if let Some(p) = self.pairs.as_mut() {
                p.push((alpha, j));
            }
        }
        self.males.is_empty()
    }

    fn state(&self) -> CutChainState {
        CutChainState {
            position: self.n,
            unmatched_count: self.males.len() as u64,
        }
    }
}

/// Chain driven only by the transition law of `U_n`.
///
/// With probability `q` the alpha male rejects the new female and `U` grows by
/// one. Otherwise the `U` remaining males try in turn, the `k`-th facing
/// `U − k + 1` fresh unmatched females and succeeding with probability
/// `1 − q^{U−k+1}`; the first failure ends the step.
pub struct DistCutChain {
    q: f64,
    rng: ChaCha8Rng,
    state: CutChainState,
}

impl DistCutChain {
    pub fn new(q: f64, seed: u64) -> Self {
        Self {
            q,
            rng: ChaCha8Rng::seed_from_u64(seed),
            state: CutChainState {
                position: 0,
                unmatched_count: 0,
            },
        }
    }

    /// Starts from an arbitrary `U_0`.
    pub fn with_unmatched(mut self, u: u64) -> Self {
        self.state.unmatched_count = u;
        self
    }
}

impl CutProcess for DistCutChain {
    fn step(&mut self) -> bool {
        let u = self.state.unmatched_count;
        self.state.position += 1;
        if self.rng.gen_bool(self.q) {
            self.state.unmatched_count = u + 1;
            return false;
        }
        let mut remaining = u;
        while remaining > 0 && self.rng.gen_bool(1.0 - self.q.powi(remaining as i32)) {
            remaining -= 1;
        }
        self.state.unmatched_count = remaining;
        remaining == 0
    }

    fn state(&self) -> CutChainState {
        self.state
    }
}

/// `P(U_{n+1} = 0 | U_n = u) = (1 − q) ∏_{k=1}^u (1 − q^k)`.
pub fn cut_probability_given(u: u64, q: f64) -> f64 {
    (1.0 - q) * super::finite::perfect_match_probability(u as u32, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::Partner;
    use crate::oracle::EdgeOracle;
    use crate::samplers::{sample_semiinfinite, MatchOptions};

    #[test]
    fn complete_graph_cuts_every_step() {
        let o = EdgeOracle::new(1.0, 0).unwrap();
        let mut c = GraphCutChain::new(&o);
        assert!((0..20).all(|_| c.step()));
    }

    #[test]
    fn unmatched_count_matches_partial() {
        let o = EdgeOracle::new(0.4, 9).unwrap();
        let mut c = GraphCutChain::new(&o).recording();
        for _ in 0..200 {
            let cut = c.step();
            let s = c.state();
            let part = c.partial().unwrap();
            let unknown_males = part
                .males()
                .filter(|&(_, p)| p == Partner::Unknown)
                .count() as u64;
            assert_eq!(unknown_males, s.unmatched_count);
            assert_eq!(cut, s.unmatched_count == 0);
        }
    }

    #[test]
    fn graph_chain_agrees_with_semiinfinite() {
        let o = EdgeOracle::new(0.5, 21).unwrap();
        let mut c = GraphCutChain::new(&o).recording();
        let mut depth = 0;
        for _ in 0..300 {
            if c.step() {
                depth = c.state().position as i64;
            }
        }
        assert!(depth > 0);
        let w = Interval::new(-depth, -1).unwrap();
        let semi = sample_semiinfinite(-1, w, &o, MatchOptions::default()).unwrap();
        let chain = c.partial().unwrap();
        for i in w.iter() {
            assert_eq!(chain.sigma(i), semi.sigma(i), "male {i}");
        }
    }

    #[test]
    fn dist_chain_is_deterministic_per_seed() {
        let run = |seed| {
            let mut c = DistCutChain::new(0.5, seed);
            (0..100).map(|_| c.step()).collect::<Vec<_>>()
        };
        assert_eq!(run(4), run(4));
        assert_ne!(run(4), run(5));
    }

    #[test]
    fn cut_probability_at_zero_is_p() {
        assert!((cut_probability_given(0, 0.3) - 0.7).abs() < 1e-15);
        assert!((cut_probability_given(1, 0.5) - 0.25).abs() < 1e-15);
    }
}
