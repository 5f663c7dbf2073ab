//! Stable matchings of finite, semi-infinite and low vertex sets, the tame
//! limits `σ_n`, and the cut chain.

pub mod chain;
pub mod correlation;
pub mod engine;
pub mod finite;
pub mod semi;
pub mod tame;

pub use chain::{cut_probability_given, ChainBackend, CutChainState, CutProcess, DistCutChain, GraphCutChain};
pub use correlation::{both_perfect_correlation, both_perfect_trial, correlation_lower_bound};
pub use engine::{MatchOptions, TopDownMatcher, DEFAULT_STEP_BUDGET};
pub use finite::{perfect_match_probability, stable_match_finite};
pub use semi::{sample_semiinfinite, stable_match_low_pair};
pub use tame::{sample_finite_m, sample_tame, TameSample, TameSampleConfig};
