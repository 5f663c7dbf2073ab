//! Stability checks, q-series numerics, the Mallows law and structure checks
//! on tame matchings.

pub mod distance;
pub mod ladder;
pub mod mallows;
pub mod qseries;
pub mod stability;

pub use distance::{distance_tail, min_compatible_distance};
pub use ladder::{shift_ladder_check, LadderReport};
pub use mallows::{mallows_normalizer, mallows_normalizer_exact, mallows_pmf, mallows_pmf_exact};
pub use qseries::{
    coupling_constant, coupling_tail_bound, domination_constant, hardy_ramanujan, hardy_ramanujan_display,
    q_pochhammer_inf, QSeriesValue, CONSTANT_TOL,
};
pub use stability::verify_stable;
