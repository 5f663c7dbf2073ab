use thiserror::Error;

use crate::matching::{HalfInt, WindowMatching};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid edge probability p = {0} (need 0 < p <= 1)")]
    InvalidProbability(f64),

    #[error("scan cap exceeded for {who} after {examined} candidates")]
    ScanCapExceeded { who: String, examined: u64 },

    #[error("step budget of {budget} males exhausted before the window was certified")]
    StepBudgetExceeded { budget: u64 },

    #[error("window does not certify the crossings at {at}")]
    InsufficientWindow { at: HalfInt },

    #[error("matching is not perfect at {at}")]
    NotPerfect { at: HalfInt },

    #[error("inconsistent matching: {0}")]
    InconsistentMatching(String),

    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),

    #[error("low sets are not balanced")]
    Unbalanced,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no agreement on the window before m reached {max_m}")]
    MaxMExceeded {
        max_m: i64,
        partial: Box<WindowMatching>,
    },

    #[error("flow mismatch: expected flows n and n+1, got {lower:?} and {upper:?}")]
    FlowMismatch {
        lower: Option<i64>,
        upper: Option<i64>,
    },

    #[error("wild construction requires 0 < p < 1 for more than one step (p = {0})")]
    InvalidWildP(f64),

    #[error("wild construction stopped at step {step}: {source}")]
    WildStalled {
        step: usize,
        #[source]
        source: Box<Error>,
        partial: Box<crate::wild::WildConstruction>,
    },
}
