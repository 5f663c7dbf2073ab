//! Experiment battery for `mallows-core`: named experiments with validated
//! parameters, parallel deterministic trials, and JSON/CSV reports.

pub mod config;
pub mod error;
pub mod experiments;
pub mod runner;
pub mod trials;

pub use config::{BatteryConfig, ExperimentSpec};
pub use error::{HarnessError, Result};
pub use experiments::{run_experiment, validate, DataTable, Outcome, NAMES};
pub use runner::{print_table, run_all, write_report, Summary, SummaryEntry};
