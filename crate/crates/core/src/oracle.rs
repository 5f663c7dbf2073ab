//! Lazily evaluated Bernoulli(p) percolation of the complete bipartite graph
//! on ℤ × ℤ.
//!
//! Each edge bit is a pure function of `(seed, male, female)`. The pair is
//! sign-folded (zigzag) into a 128-bit word `zz(male) << 64 | zz(female)`,
//! which is hashed together with the seed by three rounds of the SplitMix64
//! finalizer:
//!
//! ```text
//! key  = mix(seed + 0x9E3779B97F4A7C15)
//! a    = mix(key ^ hi)
//! b    = mix((a + 0x9E3779B97F4A7C15) ^ lo)
//! bits = mix(b ^ rotl(key, 32))
//! ```
//!
//! The edge is present iff `bits < floor(p * 2^64)`; `p = 1` always yields an
//! edge. No platform RNG is involved, so runs are bit-reproducible.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of candidates a single scan may examine.
pub const DEFAULT_SCAN_CAP: u64 = 1_000_000;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sign-folding bijection ℤ → ℕ: 0, -1, 1, -2, 2, ... ↦ 0, 1, 2, 3, 4, ...
#[inline]
pub fn zigzag(x: i64) -> u64 {
    ((x << 1) ^ (x >> 63)) as u64
}

/// Injective encoding of an index pair into a 128-bit word.
#[inline]
pub fn encode_pair(male: i64, female: i64) -> u128 {
    (u128::from(zigzag(male)) << 64) | u128::from(zigzag(female))
}

/// Compatibility relation between males and females.
///
/// The first argument is always the male index.
pub trait Compatibility {
    fn is_compatible(&self, male: i64, female: i64) -> bool;

    /// Largest `j <= bound` with `j ∉ excluded` compatible with `male`.
    ///
    /// At most `scan_cap` non-excluded candidates are examined. Running out
    /// of candidates is the `max ∅ = −∞` case and is reported as
    /// [`Error::ScanCapExceeded`]; for an infinite downward range this has
    /// probability `q^scan_cap`.
    fn max_compatible_at_most(
        &self,
        male: i64,
        bound: i64,
        excluded: &BTreeSet<i64>,
        scan_cap: u64,
    ) -> Result<Hit> {
        let mut examined = 0;
        let mut j = bound;
        while examined < scan_cap {
            if !excluded.contains(&j) {
                examined += 1;
                if self.is_compatible(male, j) {
                    return Ok(Hit { index: j, examined });
                }
            }
            j = j.checked_sub(1).ok_or_else(|| scan_error(male, examined))?;
        }
        Err(scan_error(male, examined))
    }

    /// The `count`-th smallest integer `>= start` satisfying `filter`.
    fn scan_upward_filtered(
        &self,
        filter: &ScanFilter,
        start: i64,
        count: u64,
        scan_cap: u64,
    ) -> Result<Hit> {
        if count == 0 {
            return Err(Error::InvalidArgument("scan count must be positive".into()));
        }
        let mut found = 0;
        let mut examined = 0;
        let mut k = start;
        while examined < scan_cap {
            examined += 1;
            if filter.accepts(self, k) {
                found += 1;
                if found == count {
                    return Ok(Hit { index: k, examined });
                }
            }
            k = k.checked_add(1).ok_or_else(|| scan_error(start, examined))?;
        }
        Err(Error::ScanCapExceeded {
            who: format!("upward scan from {start} ({filter:?})"),
            examined,
        })
    }
}

fn scan_error(male: i64, examined: u64) -> Error {
    Error::ScanCapExceeded {
        who: format!("male {male}"),
        examined,
    }
}

impl<C: Compatibility + ?Sized> Compatibility for &C {
    fn is_compatible(&self, male: i64, female: i64) -> bool {
        (**self).is_compatible(male, female)
    }
}

/// Result of a successful scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hit {
    pub index: i64,
    /// Candidates examined, including the hit.
    pub examined: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Male,
    Female,
}

impl Gender {
    pub fn opposite(self) -> Gender {
        match self {
            Gender::Male => Gender::Female,
            Gender::Female => Gender::Male,
        }
    }
}

/// A conjunction of compatibility constraints on a candidate individual.
///
/// `compatible_with` and `incompatible_with` hold indices of the opposite
/// gender to `candidate`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanFilter {
    pub candidate: Gender,
    pub compatible_with: Vec<i64>,
    pub incompatible_with: Vec<i64>,
}

impl ScanFilter {
    pub fn any(candidate: Gender) -> Self {
        Self {
            candidate,
            compatible_with: Vec::new(),
            incompatible_with: Vec::new(),
        }
    }

    fn edge<C: Compatibility + ?Sized>(&self, oracle: &C, candidate: i64, other: i64) -> bool {
        match self.candidate {
            Gender::Male => oracle.is_compatible(candidate, other),
            Gender::Female => oracle.is_compatible(other, candidate),
        }
    }

    /// Positive constraints are evaluated first, then negative ones, each
    /// short-circuiting.
    pub fn accepts<C: Compatibility + ?Sized>(&self, oracle: &C, candidate: i64) -> bool {
        self.compatible_with
            .iter()
            .all(|&o| self.edge(oracle, candidate, o))
            && self
                .incompatible_with
                .iter()
                .all(|&o| !self.edge(oracle, candidate, o))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleParams {
    pub p: f64,
    pub q: f64,
    pub seed: u64,
}

impl OracleParams {
    pub fn new(p: f64, seed: u64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidProbability(p));
        }
        Ok(Self { p, q: 1.0 - p, seed })
    }
}

/// Seeded percolation oracle for `K_{ℤ,ℤ}(p)`.
#[derive(Debug)]
pub struct EdgeOracle {
    params: OracleParams,
    key: u64,
    threshold: Option<u64>,
    queries: AtomicU64,
}

impl EdgeOracle {
    pub fn new(p: f64, seed: u64) -> Result<Self> {
        let params = OracleParams::new(p, seed)?;
        let threshold = if p >= 1.0 {
            None
        } else {
            // saturating float-to-int cast; p < 1 keeps this below 2^64
            Some((p * 18_446_744_073_709_551_616.0) as u64)
        };
        Ok(Self {
            params,
            key: mix64(seed.wrapping_add(GOLDEN)),
            threshold,
            queries: AtomicU64::new(0),
        })
    }

    pub fn params(&self) -> OracleParams {
        self.params
    }

    pub fn p(&self) -> f64 {
        self.params.p
    }

    pub fn q(&self) -> f64 {
        self.params.q
    }

    pub fn seed(&self) -> u64 {
        self.params.seed
    }

    /// Raw 64-bit PRF output for the pair.
    pub fn bits(&self, male: i64, female: i64) -> u64 {
        let word = encode_pair(male, female);
        let hi = (word >> 64) as u64;
        let lo = word as u64;
        let a = mix64(self.key ^ hi);
        let b = mix64(a.wrapping_add(GOLDEN) ^ lo);
        mix64(b ^ self.key.rotate_left(32))
    }

    /// Number of compatibility queries answered so far.
    pub fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }
}

impl Compatibility for EdgeOracle {
    fn is_compatible(&self, male: i64, female: i64) -> bool {
        self.queries.fetch_add(1, Ordering::Relaxed);
        match self.threshold {
            None => true,
            Some(t) => self.bits(male, female) < t,
        }
    }
}

/// An explicit finite edge set, for exhaustive enumeration and hand-built
/// instances. Pairs not listed are incompatible.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeSet {
    edges: BTreeSet<(i64, i64)>,
}

impl EdgeSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, male: i64, female: i64) {
        self.edges.insert((male, female));
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

impl FromIterator<(i64, i64)> for EdgeSet {
    fn from_iter<I: IntoIterator<Item = (i64, i64)>>(iter: I) -> Self {
        Self {
            edges: iter.into_iter().collect(),
        }
    }
}

impl Compatibility for EdgeSet {
    fn is_compatible(&self, male: i64, female: i64) -> bool {
        self.edges.contains(&(male, female))
    }
}

/// Edge set on `[lo, lo+n) × [lo, lo+n)` packed into a bitmask; bit
/// `(male-lo)*n + (female-lo)` is the edge. Supports `n <= 8`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridEdges {
    pub lo: i64,
    pub n: usize,
    pub mask: u64,
}

impl GridEdges {
    pub fn new(lo: i64, n: usize, mask: u64) -> Self {
        assert!(n * n <= 64, "grid too large for a 64-bit mask");
        Self { lo, n, mask }
    }

    pub fn edge_count(&self) -> u32 {
        self.mask.count_ones()
    }
}

impl Compatibility for GridEdges {
    fn is_compatible(&self, male: i64, female: i64) -> bool {
        let (a, b) = (male - self.lo, female - self.lo);
        let n = self.n as i64;
        if a < 0 || b < 0 || a >= n || b >= n {
            return false;
        }
        self.mask >> (a * n + b) & 1 == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_one_is_complete() {
        let o = EdgeOracle::new(1.0, 7).unwrap();
        for i in -50..50 {
            for j in -50..50 {
                assert!(o.is_compatible(i, j));
            }
        }
    }

    #[test]
    fn rejects_bad_p() {
        assert!(EdgeOracle::new(0.0, 1).is_err());
        assert!(EdgeOracle::new(1.5, 1).is_err());
        assert!(EdgeOracle::new(f64::NAN, 1).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let a = EdgeOracle::new(0.4, 99).unwrap();
        let b = EdgeOracle::new(0.4, 99).unwrap();
        let c = EdgeOracle::new(0.4, 100).unwrap();
        let mut differs = false;
        for i in -30..30 {
            for j in -30..30 {
                assert_eq!(a.is_compatible(i, j), a.is_compatible(i, j));
                assert_eq!(a.is_compatible(i, j), b.is_compatible(i, j));
                differs |= a.is_compatible(i, j) != c.is_compatible(i, j);
            }
        }
        assert!(differs);
    }

    #[test]
    fn zigzag_is_injective_near_zero() {
        let mut seen = BTreeSet::new();
        for x in -1000..1000 {
            assert!(seen.insert(zigzag(x)));
        }
        assert_eq!(zigzag(i64::MIN), u64::MAX);
        assert_eq!(zigzag(i64::MAX), u64::MAX - 1);
    }

    #[test]
    fn pair_encoding_is_injective() {
        let mut seen = BTreeSet::new();
        for i in -20..20 {
            for j in -20..20 {
                assert!(seen.insert(encode_pair(i, j)));
            }
        }
    }

    #[test]
    fn max_compatible_skips_excluded() {
        let o = EdgeOracle::new(1.0, 0).unwrap();
        let excluded: BTreeSet<i64> = [5].into_iter().collect();
        let hit = o.max_compatible_at_most(0, 5, &excluded, 10).unwrap();
        assert_eq!(hit.index, 4);
        assert_eq!(hit.examined, 1);
    }

    #[test]
    fn max_compatible_on_empty_graph_is_not_found() {
        let empty = EdgeSet::new();
        let err = empty
            .max_compatible_at_most(0, 0, &BTreeSet::new(), 25)
            .unwrap_err();
        match err {
            Error::ScanCapExceeded { examined, .. } => assert_eq!(examined, 25),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn upward_scan_always_true() {
        let o = EdgeOracle::new(1.0, 0).unwrap();
        let hit = o
            .scan_upward_filtered(&ScanFilter::any(Gender::Male), 0, 3, 100)
            .unwrap();
        assert_eq!(hit.index, 2);
    }

    #[test]
    fn upward_scan_respects_constraints() {
        // male candidates; must like female 0 and dislike female 1
        let edges: EdgeSet = [(3, 0), (3, 1), (5, 0), (7, 0)].into_iter().collect();
        let f = ScanFilter {
            candidate: Gender::Male,
            compatible_with: vec![0],
            incompatible_with: vec![1],
        };
        assert_eq!(edges.scan_upward_filtered(&f, 0, 1, 100).unwrap().index, 5);
        assert_eq!(edges.scan_upward_filtered(&f, 0, 2, 100).unwrap().index, 7);
        assert!(edges.scan_upward_filtered(&f, 0, 3, 100).is_err());
        // female candidates are checked with the male first
        let g = ScanFilter {
            candidate: Gender::Female,
            compatible_with: vec![3],
            incompatible_with: vec![],
        };
        assert_eq!(edges.scan_upward_filtered(&g, -5, 1, 100).unwrap().index, 0);
    }

    #[test]
    fn grid_edges_bit_layout() {
        // n = 2, edge (male 1, female 0) is bit 2
        let g = GridEdges::new(10, 2, 0b0100);
        assert!(g.is_compatible(11, 10));
        assert!(!g.is_compatible(10, 11));
        assert!(!g.is_compatible(12, 10));
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn query_counter_tracks_calls() {
        let o = EdgeOracle::new(0.5, 3).unwrap();
        for j in 0..10 {
            o.is_compatible(0, j);
        }
        assert_eq!(o.query_count(), 10);
    }
}
