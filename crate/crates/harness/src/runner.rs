use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use mallows_core::{ExperimentReport, Relation};

use crate::config::BatteryConfig;
use crate::error::Result;
use crate::experiments::{run_experiment, DataTable, Outcome};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryEntry {
    pub name: String,
    /// File stem of the report and data files.
    pub file: String,
    pub pass: bool,
    pub estimate: f64,
    pub stderr: f64,
    pub target: f64,
    pub relation: Relation,
    pub trials: u64,
    pub errored: u64,
    pub errored_fraction: f64,
    pub failed_checks: Vec<String>,
    /// Set when the experiment could not run at all.
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub seed: u64,
    pub pass: bool,
    pub experiments: Vec<SummaryEntry>,
    #[serde(skip)]
    pub wall_times: Vec<Duration>,
}

impl SummaryEntry {
    fn from_report(r: &ExperimentReport, file: String) -> Self {
        Self {
            name: r.name.clone(),
            file,
            pass: r.pass,
            estimate: r.estimate,
            stderr: r.stderr,
            target: r.target,
            relation: r.relation,
            trials: r.trials,
            errored: r.errored,
            errored_fraction: r.errored_fraction,
            failed_checks: r.checks.iter().filter(|c| !c.pass).map(|c| c.label.clone()).collect(),
            error: None,
        }
    }
}

pub fn write_report(out_dir: &Path, stem: &str, outcome: &Outcome) -> Result<()> {
    let mut json = serde_json::to_string_pretty(&outcome.report)?;
    json.push('\n');
    std::fs::write(out_dir.join(format!("{stem}.json")), json)?;
    write_csv(&out_dir.join(format!("{stem}.csv")), &outcome.data)
}

pub fn write_csv(path: &Path, data: &DataTable) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&data.headers)?;
    for r in &data.rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Runs every experiment of `config` in order, writing `<stem>.json`,
/// `<stem>.csv` and `summary.json` to `out_dir`.
pub fn run_all(config: &BatteryConfig, seed: u64, out_dir: &Path) -> Result<Summary> {
    std::fs::create_dir_all(out_dir)?;
    let mut stems = BTreeSet::new();
    let mut entries = Vec::new();
    let mut wall_times = Vec::new();
    for spec in &config.experiments {
        let mut stem = spec.name.clone();
        let mut k = 2;
        while !stems.insert(stem.clone()) {
            stem = format!("{}-{k}", spec.name);
            k += 1;
        }
        match run_experiment(&spec.name, &spec.params, seed) {
            Ok(outcome) => {
                write_report(out_dir, &stem, &outcome)?;
                wall_times.push(outcome.report.wall_time);
                entries.push(SummaryEntry::from_report(&outcome.report, stem));
            }
            Err(e) => {
                wall_times.push(Duration::ZERO);
                entries.push(SummaryEntry {
                    name: spec.name.clone(),
                    file: stem,
                    pass: false,
                    estimate: f64::NAN,
                    stderr: f64::NAN,
                    target: f64::NAN,
                    relation: Relation::Equals,
                    trials: 0,
                    errored: 0,
                    errored_fraction: 0.0,
                    failed_checks: Vec::new(),
                    error: Some(e.to_string()),
                });
            }
        }
    }
    let summary = Summary {
        seed,
        pass: entries.iter().all(|e| e.pass),
        experiments: entries,
        wall_times,
    };
    let mut json = serde_json::to_string_pretty(&summary)?;
    json.push('\n');
    std::fs::write(out_dir.join("summary.json"), json)?;
    Ok(summary)
}

pub fn print_table(summary: &Summary, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(
        out,
        "{:<16} {:<5} {:>14} {:>12} {:>14} {:<9} {:>9} {:>7} {:>9}",
        "experiment", "pass", "estimate", "stderr", "target", "relation", "trials", "errored", "time"
    )?;
    for (e, t) in summary.experiments.iter().zip(&summary.wall_times) {
        let rel = match e.relation {
            Relation::Equals => "=",
            Relation::AtLeast => ">=",
            Relation::AtMost => "<=",
        };
        writeln!(
            out,
            "{:<16} {:<5} {:>14.6e} {:>12.3e} {:>14.6e} {:<9} {:>9} {:>7} {:>8.2}s",
            e.file,
            if e.pass { "ok" } else { "FAIL" },
            e.estimate,
            e.stderr,
            e.target,
            rel,
            e.trials,
            e.errored,
            t.as_secs_f64()
        )?;
        for c in &e.failed_checks {
            writeln!(out, "    failed: {c}")?;
        }
        if let Some(err) = &e.error {
            writeln!(out, "    error: {err}")?;
        }
    }
    let failed = summary.experiments.iter().filter(|e| !e.pass).count();
    writeln!(out, "{} experiments, {} failed", summary.experiments.len(), failed)
}

/// Default output directory for `run-all`.
pub fn default_out_dir() -> PathBuf {
    PathBuf::from("reports")
}
