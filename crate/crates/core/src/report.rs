use std::collections::BTreeMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};

/// Monte Carlo acceptance band, in standard errors.
pub const SIGMA_BAND: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Equals,
    AtLeast,
    AtMost,
}

/// One comparison of an estimate against a target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub estimate: f64,
    pub stderr: f64,
    pub target: f64,
    pub relation: Relation,
    /// Allowed slack: `4·stderr` for Monte Carlo checks.
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn with_band(
        label: impl Into<String>,
        estimate: f64,
        stderr: f64,
        target: f64,
        relation: Relation,
        tolerance: f64,
    ) -> Self {
        let mut c = Self {
            label: label.into(),
            estimate,
            stderr,
            target,
            relation,
            tolerance,
            pass: false,
        };
        c.pass = c.margin() >= 0.0;
        c
    }

    /// Band of [`SIGMA_BAND`] standard errors.
    pub fn monte_carlo(
        label: impl Into<String>,
        estimate: f64,
        stderr: f64,
        target: f64,
        relation: Relation,
    ) -> Self {
        Self::with_band(label, estimate, stderr, target, relation, SIGMA_BAND * stderr)
    }

    pub fn exact(label: impl Into<String>, estimate: f64, target: f64, tolerance: f64) -> Self {
        Self::with_band(label, estimate, 0.0, target, Relation::Equals, tolerance)
    }

    /// A yes/no property; reported as estimate 1 against target 1.
    pub fn holds(label: impl Into<String>, ok: bool) -> Self {
        Self::exact(label, if ok { 1.0 } else { 0.0 }, 1.0, 0.0)
    }

    /// Remaining slack; negative when the check fails. NaN never passes.
    pub fn margin(&self) -> f64 {
        let m = match self.relation {
            Relation::Equals => self.tolerance - (self.estimate - self.target).abs(),
            Relation::AtLeast => self.estimate - self.target + self.tolerance,
            Relation::AtMost => self.target - self.estimate + self.tolerance,
        };
        if m.is_nan() {
            f64::NEG_INFINITY
        } else {
            m
        }
    }

    fn scaled_margin(&self) -> f64 {
        let m = self.margin();
        if self.tolerance > 0.0 {
            m / self.tolerance
        } else {
            m
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub estimate: f64,
    pub stderr: f64,
    pub target: f64,
    pub relation: Relation,
    pub pass: bool,
    /// Completed trials (attempted minus errored).
    pub trials: u64,
    pub errored: u64,
    pub errored_fraction: f64,
    pub checks: Vec<Check>,
    /// Excluded from serialisation so reports are byte-reproducible.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl ExperimentReport {
    /// Headline fields come from the check with the least relative slack.
    pub fn from_checks(
        name: impl Into<String>,
        params: BTreeMap<String, serde_json::Value>,
        checks: Vec<Check>,
        attempted: u64,
        errored: u64,
    ) -> Self {
        let worst = checks
            .iter()
            .min_by(|a, b| a.scaled_margin().total_cmp(&b.scaled_margin()));
        let (estimate, stderr, target, relation) = worst.map_or(
            (f64::NAN, f64::NAN, f64::NAN, Relation::Equals),
            |c| (c.estimate, c.stderr, c.target, c.relation),
        );
        Self {
            name: name.into(),
            params,
            estimate,
            stderr,
            target,
            relation,
            pass: !checks.is_empty() && checks.iter().all(|c| c.pass),
            trials: attempted - errored,
            errored,
            errored_fraction: if attempted == 0 {
                0.0
            } else {
                errored as f64 / attempted as f64
            },
            checks,
            wall_time: Duration::ZERO,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bands() {
        assert!(Check::monte_carlo("a", 0.5, 0.01, 0.53, Relation::Equals).pass);
        assert!(!Check::monte_carlo("a", 0.5, 0.01, 0.55, Relation::Equals).pass);
        assert!(Check::monte_carlo("b", 0.5, 0.01, 0.53, Relation::AtLeast).pass);
        assert!(!Check::monte_carlo("b", 0.5, 0.01, 0.55, Relation::AtLeast).pass);
        assert!(Check::monte_carlo("c", 0.6, 0.0, 0.5, Relation::AtLeast).pass);
        assert!(!Check::monte_carlo("d", 0.6, 0.01, 0.5, Relation::AtMost).pass);
        assert!(!Check::exact("e", f64::NAN, 1.0, 1.0).pass);
    }

    #[test]
    fn headline_is_worst_check() {
        let checks = vec![
            Check::monte_carlo("ok", 0.5, 0.01, 0.5, Relation::Equals),
            Check::monte_carlo("bad", 0.5, 0.01, 0.9, Relation::Equals),
        ];
        let r = ExperimentReport::from_checks("x", BTreeMap::new(), checks, 10, 2);
        assert!(!r.pass);
        assert_eq!(r.target, 0.9);
        assert_eq!(r.trials, 8);
        assert!((r.errored_fraction - 0.2).abs() < 1e-15);
    }

    #[test]
    fn wall_time_not_serialised() {
        let mut r = ExperimentReport::from_checks("x", BTreeMap::new(), vec![Check::holds("t", true)], 1, 0);
        r.wall_time = Duration::from_secs(3);
        let s = serde_json::to_string(&r).unwrap();
        assert!(!s.contains("wall"));
    }
}
