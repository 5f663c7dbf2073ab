//! Matchings restricted to a finite window of ℤ, and the crossing statistics
//! `L₊`, `L₋`, `M` and flow defined on them.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Inclusive integer interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Interval {
    pub lo: i64,
    pub hi: i64,
}

impl Interval {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidArgument(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, x: i64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn len(&self) -> u64 {
        (self.hi - self.lo + 1) as u64
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// The half-integer `i + 1/2`, stored as `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(i64);

impl HalfInt {
    /// `i + 1/2`.
    pub const fn above(i: i64) -> Self {
        HalfInt(i)
    }

    /// `i - 1/2`.
    pub const fn below(i: i64) -> Self {
        HalfInt(i - 1)
    }

    /// The integer just below this position.
    pub const fn floor(self) -> i64 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 + 0.5
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 >= 0 {
            write!(f, "{}.5", self.0)
        } else {
            write!(f, "-{}.5", -(self.0 + 1))
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.as_f64())
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let x = f64::deserialize(d)?;
        if (x - x.floor() - 0.5).abs() > 1e-9 {
            return Err(serde::de::Error::custom(format!("{x} is not a half-integer")));
        }
        Ok(HalfInt(x.floor() as i64))
    }
}

/// Partner status of one individual. `Unmatched` encodes `σ(i) = −∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Partner {
    Matched(i64),
    Unmatched,
    Unknown,
}

impl Partner {
    pub fn index(self) -> Option<i64> {
        match self {
            Partner::Matched(j) => Some(j),
            _ => None,
        }
    }

    /// Rank used by stability checks: unmatched is `−∞`; unknown has none.
    pub fn rank(self) -> Option<Rank> {
        match self {
            Partner::Matched(j) => Some(Rank::At(j)),
            Partner::Unmatched => Some(Rank::NegInf),
            Partner::Unknown => None,
        }
    }
}

/// An index extended with `−∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Rank {
    NegInf,
    At(i64),
}

/// One individual, serialised as `{"male": i}` or `{"female": j}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Individual {
    Male(i64),
    Female(i64),
}

impl Individual {
    pub fn index(self) -> i64 {
        match self {
            Individual::Male(i) | Individual::Female(i) => i,
        }
    }
}

/// A matching known on a finite window.
///
/// `forward` maps males to partners and `backward` maps females to partners;
/// both may hold entries outside the window (edges leaving it). Indices with
/// no entry are not individuals of the underlying graph or were never
/// revealed. `sealed` is set by the producer when every edge crossing any
/// half-integer in `[lo − 1/2, hi + 1/2]` is recorded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowMatching {
    window: Interval,
    forward: BTreeMap<i64, Partner>,
    backward: BTreeMap<i64, Partner>,
    flow: Option<i64>,
    sealed: bool,
}

impl WindowMatching {
    pub fn builder(window: Interval) -> MatchingBuilder {
        MatchingBuilder {
            window,
            forward: BTreeMap::new(),
            backward: BTreeMap::new(),
            flow: None,
            sealed: false,
            error: None,
        }
    }

    /// Reopens the matching for further edits.
    pub fn into_builder(self) -> MatchingBuilder {
        MatchingBuilder {
            window: self.window,
            forward: self.forward,
            backward: self.backward,
            flow: self.flow,
            sealed: self.sealed,
            error: None,
        }
    }

    pub fn window(&self) -> Interval {
        self.window
    }

    pub fn flow(&self) -> Option<i64> {
        self.flow
    }

    pub fn is_sealed(&self) -> bool {
        self.sealed
    }

    pub fn male(&self, i: i64) -> Option<Partner> {
        self.forward.get(&i).copied()
    }

    pub fn female(&self, j: i64) -> Option<Partner> {
        self.backward.get(&j).copied()
    }

    /// `σ(i)` when male `i` is matched.
    pub fn sigma(&self, i: i64) -> Option<i64> {
        self.male(i).and_then(Partner::index)
    }

    /// `σ⁻¹(j)` when female `j` is matched.
    pub fn sigma_inv(&self, j: i64) -> Option<i64> {
        self.female(j).and_then(Partner::index)
    }

    pub fn males(&self) -> impl Iterator<Item = (i64, Partner)> + '_ {
        self.forward.iter().map(|(&i, &p)| (i, p))
    }

    pub fn females(&self) -> impl Iterator<Item = (i64, Partner)> + '_ {
        self.backward.iter().map(|(&j, &p)| (j, p))
    }

    /// Matched pairs `(male, female)` ordered by male.
    pub fn pairs(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.forward
            .iter()
            .filter_map(|(&i, p)| p.index().map(|j| (i, j)))
    }

    pub fn edge_count(&self) -> usize {
        self.pairs().count()
    }

    pub fn has_unknown(&self) -> bool {
        self.forward
            .values()
            .chain(self.backward.values())
            .any(|p| *p == Partner::Unknown)
    }

    pub fn has_unmatched(&self) -> bool {
        self.forward
            .values()
            .chain(self.backward.values())
            .any(|p| *p == Partner::Unmatched)
    }

    /// Every recorded individual is matched.
    pub fn is_perfect(&self) -> bool {
        self.forward
            .values()
            .chain(self.backward.values())
            .all(|p| matches!(p, Partner::Matched(_)))
    }

    /// Edges whose span `[min(i,j), max(i,j)]` meets `window`.
    pub fn edges_meeting(&self, window: Interval) -> Vec<(i64, i64)> {
        self.pairs()
            .filter(|&(i, j)| i.min(j) <= window.hi && i.max(j) >= window.lo)
            .collect()
    }

    fn certifies(&self, at: HalfInt) -> bool {
        self.sealed
            && !self.has_unknown()
            && at.floor() >= self.window.lo - 1
            && at.floor() <= self.window.hi
    }
}

pub struct MatchingBuilder {
    window: Interval,
    forward: BTreeMap<i64, Partner>,
    backward: BTreeMap<i64, Partner>,
    flow: Option<i64>,
    sealed: bool,
    error: Option<String>,
}

impl MatchingBuilder {
    fn put(map: &mut BTreeMap<i64, Partner>, k: i64, v: Partner, error: &mut Option<String>, who: &str) {
        if let Some(old) = map.insert(k, v) {
            if old != v && error.is_none() {
                *error = Some(format!("{who} {k} assigned both {old:?} and {v:?}"));
            }
        }
    }

    pub fn pair(&mut self, male: i64, female: i64) -> &mut Self {
        Self::put(&mut self.forward, male, Partner::Matched(female), &mut self.error, "male");
        Self::put(&mut self.backward, female, Partner::Matched(male), &mut self.error, "female");
        self
    }

    pub fn unmatched_male(&mut self, i: i64) -> &mut Self {
        Self::put(&mut self.forward, i, Partner::Unmatched, &mut self.error, "male");
        self
    }

    pub fn unmatched_female(&mut self, j: i64) -> &mut Self {
        Self::put(&mut self.backward, j, Partner::Unmatched, &mut self.error, "female");
        self
    }

    pub fn unknown(&mut self, who: Individual) -> &mut Self {
        match who {
            Individual::Male(i) => {
                Self::put(&mut self.forward, i, Partner::Unknown, &mut self.error, "male")
            }
            Individual::Female(j) => {
                Self::put(&mut self.backward, j, Partner::Unknown, &mut self.error, "female")
            }
        }
        self
    }

    pub fn flow(&mut self, flow: Option<i64>) -> &mut Self {
        self.flow = flow;
        self
    }

    pub fn sealed(&mut self, sealed: bool) -> &mut Self {
        self.sealed = sealed;
        self
    }

    pub fn build(&mut self) -> Result<WindowMatching> {
        if let Some(e) = self.error.take() {
            return Err(Error::InconsistentMatching(e));
        }
        Ok(WindowMatching {
            window: self.window,
            forward: std::mem::take(&mut self.forward),
            backward: std::mem::take(&mut self.backward),
            flow: self.flow,
            sealed: self.sealed,
        })
    }
}

/// Edge counts across `i + 1/2` and the longest crossing edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingProfile {
    pub at: HalfInt,
    pub l_plus: u64,
    pub l_minus: u64,
    pub m_max: u64,
}

/// Crossing profiles for every position `t + 1/2`, `t ∈ floors`.
///
/// Unmatched males above the position count towards `L₋` (`σ(j) = −∞` lies
/// below every position) but never towards `M`.
pub fn crossing_profiles(matching: &WindowMatching, floors: Interval) -> Result<Vec<CrossingProfile>> {
    for end in [floors.lo, floors.hi] {
        if !matching.certifies(HalfInt::above(end)) {
            return Err(Error::InsufficientWindow { at: HalfInt::above(end) });
        }
    }
    let n = floors.len() as usize;
    let mut plus = vec![0i64; n + 1];
    let mut minus = vec![0i64; n + 1];
    let mut longest = vec![0u64; n];
    let add = |diff: &mut Vec<i64>, from: i64, to: i64| {
        // positions t with from <= t <= to
        let lo = from.max(floors.lo);
        let hi = to.min(floors.hi);
        if lo <= hi {
            diff[(lo - floors.lo) as usize] += 1;
            diff[(hi - floors.lo) as usize + 1] -= 1;
        }
        (lo, hi)
    };
    for (&male, partner) in &matching.forward {
        match *partner {
            Partner::Matched(female) if male != female => {
                let (a, b) = (male.min(female), male.max(female));
                let diff = if male < female { &mut plus } else { &mut minus };
                let (lo, hi) = add(diff, a, b - 1);
                let len = (b - a) as u64;
                for t in lo..=hi {
                    let slot = &mut longest[(t - floors.lo) as usize];
                    *slot = (*slot).max(len);
                }
            }
            Partner::Unmatched => {
                add(&mut minus, i64::MIN, male - 1);
            }
            _ => {}
        }
    }
    let (mut lp, mut lm) = (0i64, 0i64);
    Ok((0..n)
        .map(|k| {
            lp += plus[k];
            lm += minus[k];
            CrossingProfile {
                at: HalfInt::above(floors.lo + k as i64),
                l_plus: lp as u64,
                l_minus: lm as u64,
                m_max: longest[k],
            }
        })
        .collect())
}

pub fn crossing_profile(matching: &WindowMatching, at: HalfInt) -> Result<CrossingProfile> {
    let t = at.floor();
    Ok(crossing_profiles(matching, Interval { lo: t, hi: t })?[0])
}

/// `Fl(σ) = L₊ − L₋` at `at`.
pub fn flow_of(matching: &WindowMatching, at: HalfInt) -> Result<i64> {
    if matching.has_unmatched() {
        return Err(Error::NotPerfect { at });
    }
    let c = crossing_profile(matching, at)?;
    Ok(c.l_plus as i64 - c.l_minus as i64)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutReport {
    pub cuts: Vec<HalfInt>,
    pub uncertified: Vec<HalfInt>,
}

/// Cuts strictly inside `window`: positions `t + 1/2`, `lo <= t < hi`, that no
/// edge crosses.
pub fn cut_positions(matching: &WindowMatching, window: Interval) -> CutReport {
    let mut report = CutReport::default();
    if window.lo >= window.hi {
        return report;
    }
    let interior = Interval { lo: window.lo, hi: window.hi - 1 };
    let certifiable = if matching.sealed && !matching.has_unknown() {
        interior.intersect(&Interval {
            lo: matching.window.lo - 1,
            hi: matching.window.hi,
        })
    } else {
        None
    };
    let profiles = certifiable
        .map(|c| crossing_profiles(matching, c).expect("range certified above"))
        .unwrap_or_default();
    let mut certified = profiles.iter().peekable();
    for t in interior.iter() {
        match certified.peek() {
            Some(p) if p.at.floor() == t => {
                if p.l_plus == 0 && p.l_minus == 0 {
                    report.cuts.push(p.at);
                }
                certified.next();
            }
            _ => report.uncertified.push(HalfInt::above(t)),
        }
    }
    report
}

#[derive(Serialize, Deserialize)]
struct MatchingJson {
    window: [i64; 2],
    pairs: Vec<[i64; 2]>,
    unmatched_males: Vec<i64>,
    unmatched_females: Vec<i64>,
    unknown: Vec<Individual>,
    flow: Option<i64>,
    #[serde(default)]
    sealed: bool,
}

impl From<&WindowMatching> for MatchingJson {
    fn from(m: &WindowMatching) -> Self {
        let of = |map: &BTreeMap<i64, Partner>, want: Partner| {
            map.iter()
                .filter(|(_, &p)| p == want)
                .map(|(&k, _)| k)
                .collect::<Vec<_>>()
        };
        let unknown = of(&m.forward, Partner::Unknown)
            .into_iter()
            .map(Individual::Male)
            .chain(of(&m.backward, Partner::Unknown).into_iter().map(Individual::Female))
            .collect();
        MatchingJson {
            window: [m.window.lo, m.window.hi],
            pairs: m.pairs().map(|(i, j)| [i, j]).collect(),
            unmatched_males: of(&m.forward, Partner::Unmatched),
            unmatched_females: of(&m.backward, Partner::Unmatched),
            unknown,
            flow: m.flow,
            sealed: m.sealed,
        }
    }
}

impl TryFrom<MatchingJson> for WindowMatching {
    type Error = Error;

    fn try_from(j: MatchingJson) -> Result<Self> {
        let mut b = WindowMatching::builder(Interval::new(j.window[0], j.window[1])?);
        for [i, f] in j.pairs {
            b.pair(i, f);
        }
        for i in j.unmatched_males {
            b.unmatched_male(i);
        }
        for f in j.unmatched_females {
            b.unmatched_female(f);
        }
        for u in j.unknown {
            b.unknown(u);
        }
        b.flow(j.flow).sealed(j.sealed).build()
    }
}

impl Serialize for WindowMatching {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatchingJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for WindowMatching {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatchingJson::deserialize(d)?;
        WindowMatching::try_from(j).map_err(serde::de::Error::custom)
    }
}
