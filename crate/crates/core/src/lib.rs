//! Mallows permutations realised as stable matchings of Bernoulli-percolated
//! complete bipartite graphs on integer index sets.
//!
//! Males and females are indexed by integers, larger being more attractive.
//! The compatibility graph is evaluated lazily by [`oracle::EdgeOracle`].

pub mod analysis;
pub mod error;
pub mod index_set;
pub mod matching;
pub mod oracle;
pub mod permutation;
pub mod report;
pub mod samplers;
pub mod stats;
pub mod wild;

pub use error::{Error, Result};
pub use index_set::{is_balanced, IndexSet};
pub use matching::{
    crossing_profile, crossing_profiles, cut_positions, flow_of, CrossingProfile, CutReport, HalfInt, Individual,
    Interval, Partner, WindowMatching,
};
pub use oracle::{Compatibility, EdgeOracle, Gender, OracleParams, ScanFilter};
pub use permutation::FinitePermutation;
pub use report::{Check, ExperimentReport, Relation};
