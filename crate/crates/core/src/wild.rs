//! Explicit wild stable matchings built greedily from an enumeration of
//! individuals.
//!
//! At each step the next enumerated individual, if still unmatched, is given
//! a partner that is compatible with it, more attractive than every matched
//! individual of the partner's gender, and incompatible with every matched
//! individual of its own gender. Every oracle query can be recorded so the
//! finite construction can be audited and replayed.

use std::cell::RefCell;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analysis::verify_stable;
use crate::error::{Error, Result};
use crate::matching::{CrossingProfile, Individual, Interval, WindowMatching};
use crate::oracle::{Compatibility, EdgeOracle, Gender, ScanFilter};
use crate::samplers::{sample_semiinfinite, MatchOptions};

/// Per-step scan budget.
pub const DEFAULT_WILD_SCAN_CAP: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WildVariant {
    /// Enumerates all males and the non-negative females.
    NotPerfect,
    /// Enumerates everyone.
    NotLocallyFinite,
    /// Enumerates the non-negative individuals; the negative side is the
    /// stable matching of `(−∞,−1]`.
    LocallyFiniteWild,
}

impl std::str::FromStr for WildVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "not-perfect" => Ok(Self::NotPerfect),
            "not-locally-finite" => Ok(Self::NotLocallyFinite),
            "locally-finite-wild" => Ok(Self::LocallyFiniteWild),
            _ => Err(Error::InvalidArgument(format!("unknown wild variant {s:?}"))),
        }
    }
}

impl WildVariant {
    /// `x_1, x_2, …`: `k♂, k♀` then, depending on the variant, `(−k−1)♂` and
    /// `(−k−1)♀`, for `k = 0, 1, …`.
    pub fn enumeration(self) -> impl Iterator<Item = Individual> {
        (0i64..).flat_map(move |k| {
            let mut v = vec![Individual::Male(k), Individual::Female(k)];
            if self != WildVariant::LocallyFiniteWild {
                v.push(Individual::Male(-k - 1));
            }
            if self == WildVariant::NotLocallyFinite {
                v.push(Individual::Female(-k - 1));
            }
            v
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WildConfig {
    pub variant: WildVariant,
    /// `a_1, a_2, …`; missing entries count as 1.
    pub a_seq: Vec<u64>,
    pub steps: usize,
    pub scan_cap: u64,
    /// Negative indices `[−negative_window, −1]` shown in the output.
    pub negative_window: i64,
    /// Record every oracle query.
    pub trace: bool,
}

impl WildConfig {
    pub fn new(variant: WildVariant, steps: usize) -> Self {
        Self {
            variant,
            a_seq: Vec::new(),
            steps,
            scan_cap: DEFAULT_WILD_SCAN_CAP,
            negative_window: 20,
            trace: true,
        }
    }

    fn a(&self, j: usize) -> u64 {
        self.a_seq.get(j).copied().unwrap_or(1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WildSharpConfig {
    pub steps: usize,
    pub scan_cap: u64,
    pub negative_window: i64,
    pub trace: bool,
}

impl WildSharpConfig {
    pub fn new(steps: usize) -> Self {
        Self {
            steps,
            scan_cap: DEFAULT_WILD_SCAN_CAP,
            negative_window: 20,
            trace: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub male: i64,
    pub female: i64,
    pub compatible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WildStep {
    pub step: usize,
    pub individual: Individual,
    /// `None` when the individual was already matched.
    pub partner: Option<Individual>,
    /// Candidates examined by the partner scan.
    pub scan_length: u64,
    pub edge_length: Option<u64>,
    /// Matched same-gender individuals the partner had to avoid (`N_n` for
    /// the sharp construction).
    pub constraints: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WildConstruction {
    pub construction: String,
    pub matching: WindowMatching,
    pub steps: Vec<WildStep>,
    /// `H_0, H_1, …` for the sharp construction.
    pub h_trace: Vec<i64>,
    pub trace: Vec<QueryRecord>,
}

impl WildConstruction {
    pub fn edges(&self) -> Vec<(i64, i64)> {
        self.steps
            .iter()
            .filter_map(|s| match (s.individual, s.partner?) {
                (Individual::Male(i), Individual::Female(j)) | (Individual::Female(j), Individual::Male(i)) => {
                    Some((i, j))
                }
                _ => None,
            })
            .collect()
    }
}

struct TracingOracle<'a> {
    inner: &'a EdgeOracle,
    log: Option<RefCell<Vec<QueryRecord>>>,
}

impl Compatibility for TracingOracle<'_> {
    fn is_compatible(&self, male: i64, female: i64) -> bool {
        let compatible = self.inner.is_compatible(male, female);
        if let Some(log) = &self.log {
            log.borrow_mut().push(QueryRecord { male, female, compatible });
        }
        compatible
    }
}

impl TracingOracle<'_> {
    fn take(&self) -> Vec<QueryRecord> {
        self.log.as_ref().map(|l| l.take()).unwrap_or_default()
    }
}

#[derive(Default)]
struct Partial {
    males: BTreeMap<i64, i64>,
    females: BTreeMap<i64, i64>,
}

impl Partial {
    fn is_matched(&self, x: Individual) -> bool {
        match x {
            Individual::Male(i) => self.males.contains_key(&i),
            Individual::Female(j) => self.females.contains_key(&j),
        }
    }

    fn insert(&mut self, x: Individual, y: i64) {
        match x {
            Individual::Male(i) => {
                self.males.insert(i, y);
                self.females.insert(y, i);
            }
            Individual::Female(j) => {
                self.females.insert(j, y);
                self.males.insert(y, j);
            }
        }
    }

    fn of_gender(&self, g: Gender) -> &BTreeMap<i64, i64> {
        match g {
            Gender::Male => &self.males,
            Gender::Female => &self.females,
        }
    }

    fn edge_count(&self) -> usize {
        self.males.len()
    }

    fn max_index(&self) -> Option<i64> {
        self.males.keys().chain(self.females.keys()).copied().max()
    }

    fn min_index(&self) -> Option<i64> {
        self.males.keys().chain(self.females.keys()).copied().min()
    }
}

fn gender(x: Individual) -> Gender {
    match x {
        Individual::Male(_) => Gender::Male,
        Individual::Female(_) => Gender::Female,
    }
}

fn individual(g: Gender, index: i64) -> Individual {
    match g {
        Gender::Male => Individual::Male(index),
        Gender::Female => Individual::Female(index),
    }
}

fn assemble(partial: &Partial, window: Interval, unmatched_females: &[i64], sealed: bool) -> Result<WindowMatching> {
    let mut b = WindowMatching::builder(window);
    for (&i, &j) in &partial.males {
        b.pair(i, j);
    }
    for &j in unmatched_females {
        b.unmatched_female(j);
    }
    b.sealed(sealed).build()
}

fn check_p(oracle: &EdgeOracle, steps: usize) -> Result<()> {
    if oracle.q() == 0.0 && steps > 1 {
        return Err(Error::InvalidWildP(oracle.p()));
    }
    Ok(())
}

/// Runs `config.steps` steps of the construction for the chosen variant.
///
/// On a failed scan the partial construction is returned inside
/// [`Error::WildStalled`].
pub fn build_wild(config: &WildConfig, oracle: &EdgeOracle) -> Result<WildConstruction> {
    check_p(oracle, config.steps)?;
    if config.steps == 0 {
        return Err(Error::InvalidArgument("steps must be positive".into()));
    }
    let traced = TracingOracle {
        inner: oracle,
        log: config.trace.then(|| RefCell::new(Vec::new())),
    };
    let mut partial = Partial::default();
    let mut steps = Vec::new();
    let mut stalled = None;
    for (n, x) in config.variant.enumeration().take(config.steps).enumerate() {
        if partial.is_matched(x) {
            steps.push(WildStep {
                step: n + 1,
                individual: x,
                partner: None,
                scan_length: 0,
                edge_length: None,
                constraints: 0,
            });
            continue;
        }
        let g = gender(x);
        let cand = g.opposite();
        let start = partial.of_gender(cand).keys().next_back().map_or(0, |&k| (k + 1).max(0));
        let filter = ScanFilter {
            candidate: cand,
            compatible_with: vec![x.index()],
            incompatible_with: partial.of_gender(g).keys().copied().collect(),
        };
        let a = config.a(partial.edge_count());
        match traced.scan_upward_filtered(&filter, start, a, config.scan_cap) {
            Ok(hit) => {
                partial.insert(x, hit.index);
                steps.push(WildStep {
                    step: n + 1,
                    individual: x,
                    partner: Some(individual(cand, hit.index)),
                    scan_length: hit.examined,
                    edge_length: Some(x.index().abs_diff(hit.index)),
                    constraints: filter.incompatible_with.len() as u64,
                });
            }
            Err(e) => {
                stalled = Some((n + 1, e));
                break;
            }
        }
    }

    let neg = config.negative_window.max(1);
    let lo = partial.min_index().unwrap_or(0).min(-neg);
    let hi = partial.max_index().unwrap_or(0).max(0);
    let window = Interval::new(lo, hi)?;
    let matching = match config.variant {
        WildVariant::NotPerfect => {
            let negatives: Vec<i64> = (-neg..=-1).collect();
            assemble(&partial, window, &negatives, false)?
        }
        WildVariant::NotLocallyFinite => assemble(&partial, window, &[], false)?,
        WildVariant::LocallyFiniteWild => {
            let semi = sample_semiinfinite(-1, Interval::new(-neg, -1)?, &traced, MatchOptions::default())?;
            let mut b = assemble(&partial, window, &[], false)?.into_builder();
            for (i, j) in semi.pairs() {
                b.pair(i, j);
            }
            b.build()?
        }
    };
    let construction = WildConstruction {
        construction: serde_json::to_value(config.variant)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default(),
        matching,
        steps,
        h_trace: Vec::new(),
        trace: traced.take(),
    };
    match stalled {
        None => Ok(construction),
        Some((step, source)) => Err(Error::WildStalled {
            step,
            source: Box::new(source),
            partial: Box::new(construction),
        }),
    }
}

/// The interleaved construction `x_{2i−1} = (i,♂)`, `x_{2i} = (i,♀)` on top
/// of the stable matching of `(−∞,0]`. Each unmatched `x` is matched to the
/// least individual of the opposite gender above `H_n` that is compatible
/// with `x` and incompatible with every positive matched individual of `x`'s
/// gender.
///
/// The output window is `[−negative_window, i]` where `i` is the last index
/// whose male and female have both been processed; every edge crossing a
/// position in it is recorded, so crossing profiles there are exact.
pub fn build_wild_sharp(config: &WildSharpConfig, oracle: &EdgeOracle) -> Result<WildConstruction> {
    if oracle.q() == 0.0 {
        return Err(Error::InvalidWildP(oracle.p()));
    }
    let traced = TracingOracle {
        inner: oracle,
        log: config.trace.then(|| RefCell::new(Vec::new())),
    };
    let neg = config.negative_window.max(1);
    let sigma0 = sample_semiinfinite(0, Interval::new(-neg, 0)?, &traced, MatchOptions::default())?;
    let mut partial = Partial::default();
    for (i, j) in sigma0.pairs() {
        partial.insert(Individual::Male(i), j);
    }
    let mut h = 0i64;
    let mut h_trace = vec![h];
    let mut steps = Vec::new();
    let mut stalled = None;
    for n in 1..=config.steps {
        let i = n.div_ceil(2) as i64;
        let x = if n % 2 == 1 { Individual::Male(i) } else { Individual::Female(i) };
        if partial.is_matched(x) {
            steps.push(WildStep {
                step: n,
                individual: x,
                partner: None,
                scan_length: 0,
                edge_length: None,
                constraints: 0,
            });
            h_trace.push(h);
            continue;
        }
        let g = gender(x);
        let filter = ScanFilter {
            candidate: g.opposite(),
            compatible_with: vec![i],
            incompatible_with: partial.of_gender(g).range(1..).map(|(&k, _)| k).collect(),
        };
        match traced.scan_upward_filtered(&filter, h + 1, 1, config.scan_cap) {
            Ok(hit) => {
                partial.insert(x, hit.index);
                h = h.max(hit.index).max(i);
                steps.push(WildStep {
                    step: n,
                    individual: x,
                    partner: Some(individual(g.opposite(), hit.index)),
                    scan_length: hit.examined,
                    edge_length: Some(i.abs_diff(hit.index)),
                    constraints: filter.incompatible_with.len() as u64,
                });
                h_trace.push(h);
            }
            Err(e) => {
                stalled = Some((n, e));
                break;
            }
        }
    }
    let done = (steps.len() / 2) as i64;
    let window = Interval::new(-neg, done.max(0))?;
    let construction = WildConstruction {
        construction: "sharp".into(),
        matching: assemble(&partial, window, &[], true)?,
        steps,
        h_trace,
        trace: traced.take(),
    };
    match stalled {
        None => Ok(construction),
        Some((step, source)) => Err(Error::WildStalled {
            step,
            source: Box::new(source),
            partial: Box::new(construction),
        }),
    }
}

/// Blocking pairs among the individuals recorded in the construction.
pub fn audit_stability(construction: &WildConstruction, oracle: &EdgeOracle) -> Vec<(i64, i64)> {
    verify_stable(&construction.matching, oracle, construction.matching.window())
}

/// Recorded queries whose answer differs from the oracle, plus added edges
/// the trace does not show as compatible.
pub fn replay_trace(construction: &WildConstruction, oracle: &EdgeOracle) -> usize {
    let mismatched = construction
        .trace
        .iter()
        .filter(|r| oracle.is_compatible(r.male, r.female) != r.compatible)
        .count();
    let unverified = construction
        .edges()
        .iter()
        .filter(|&&(i, j)| {
            !construction
                .trace
                .iter()
                .any(|r| r.male == i && r.female == j && r.compatible)
        })
        .count();
    mismatched + unverified
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthClass {
    TameConsistent,
    WildConsistent,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    /// `max M(σ,i+1/2)/ln|i|` over positions with `|i| >= 3`.
    pub max_m_over_log: f64,
    /// `min M(σ,i+1/2)/ln|i|` over the same positions.
    pub min_m_over_log: f64,
    /// `min ln M(σ,i+1/2)/i` over the upper half of the positive positions.
    pub tail_min_log_m_over_i: f64,
    /// `max ln M(σ,i+1/2)/i` over the positive positions.
    pub max_log_m_over_i: f64,
    pub positions: usize,
    pub class: GrowthClass,
}

/// Ceiling on `M/ln|i|` for a tame-consistent classification.
pub const TAME_CEILING: f64 = 20.0;
/// Floor on `ln M / i` for a wild-consistent classification.
pub const WILD_FLOOR: f64 = 0.05;

/// Heuristic tame/wild classification from crossing profiles.
pub fn growth_diagnostics(profiles: &[CrossingProfile]) -> GrowthReport {
    let mut max_tame = 0.0f64;
    let mut min_tame = f64::INFINITY;
    let mut wild = Vec::new();
    for c in profiles {
        let i = c.at.floor();
        let m = c.m_max as f64;
        if i.abs() >= 3 {
            let r = m / (i.abs() as f64).ln();
            max_tame = max_tame.max(r);
            min_tame = min_tame.min(r);
        }
        if i >= 1 {
            wild.push((i, if m >= 1.0 { m.ln() / i as f64 } else { f64::NEG_INFINITY }));
        }
    }
    let tail_min = if wild.is_empty() {
        f64::NAN
    } else {
        wild[wild.len() / 2..].iter().map(|w| w.1).fold(f64::INFINITY, f64::min)
    };
    let max_wild = wild.iter().map(|w| w.1).fold(f64::NEG_INFINITY, f64::max);
    let class = if max_tame <= TAME_CEILING {
        GrowthClass::TameConsistent
    } else if tail_min >= WILD_FLOOR {
        GrowthClass::WildConsistent
    } else {
        GrowthClass::Indeterminate
    };
    GrowthReport {
        max_m_over_log: max_tame,
        min_m_over_log: min_tame,
        tail_min_log_m_over_i: tail_min,
        max_log_m_over_i: max_wild,
        positions: profiles.len(),
        class,
    }
}
