//! Battery configuration.
//!
//! ```toml
//! seed = 42            # optional, the CLI flag wins
//!
//! [[experiment]]
//! name = "perfect-prob"
//! trials = 100000
//! cases = [{ n = 5, p = 0.5 }, { n = 10, p = 0.6 }]
//! ```
//!
//! Every key other than `name` is a parameter of that experiment; omitted
//! parameters take the experiment's defaults.

use std::path::Path;

use serde::Deserialize;
use toml::{Spanned, Table};

use crate::error::{HarnessError, Result};
use crate::experiments;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub params: Table,
    /// Line of the `[[experiment]]` entry, for error messages.
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BatteryConfig {
    pub seed: Option<u64>,
    pub experiments: Vec<ExperimentSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    #[serde(default)]
    experiment: Vec<Spanned<Table>>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl BatteryConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| HarnessError::Config {
            line: e.span().map_or(1, |s| line_of(text, s.start)),
            message: e.message().trim().to_string(),
        })?;
        let mut out = Vec::new();
        for entry in raw.experiment {
            let line = line_of(text, entry.span().start);
            let mut params = entry.into_inner();
            let name = match params.remove("name") {
                Some(toml::Value::String(s)) => s,
                Some(_) => {
                    return Err(HarnessError::Config {
                        line,
                        message: "`name` must be a string".into(),
                    })
                }
                None => {
                    return Err(HarnessError::Config {
                        line,
                        message: "experiment entry has no `name`".into(),
                    })
                }
            };
            experiments::validate(&name, &params).map_err(|e| HarnessError::Config {
                line,
                message: e.to_string(),
            })?;
            out.push(ExperimentSpec { name, params, line });
        }
        if out.is_empty() {
            return Err(HarnessError::Config {
                line: 1,
                message: "no [[experiment]] entries".into(),
            });
        }
        Ok(Self {
            seed: raw.seed,
            experiments: out,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_entries_with_lines() {
        let text = "seed = 3\n\n[[experiment]]\nname = \"oracle-rate\"\npairs = 1000\n\n[[experiment]]\nname = \"semiinf-cut\"\n";
        let c = BatteryConfig::parse(text).unwrap();
        assert_eq!(c.seed, Some(3));
        assert_eq!(c.experiments.len(), 2);
        assert_eq!(c.experiments[0].line, 3);
        assert_eq!(c.experiments[1].line, 7);
        assert_eq!(c.experiments[0].params.get("pairs").and_then(|v| v.as_integer()), Some(1000));
    }

    #[test]
    fn zero_trials_rejected_with_line() {
        let text = "[[experiment]]\nname = \"perfect-prob\"\n\n[[experiment]]\nname = \"correlation\"\ntrials = 0\n";
        match BatteryConfig::parse(text) {
            Err(HarnessError::Config { line, message }) => {
                assert_eq!(line, 4);
                assert!(message.contains("trials"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_error_has_line() {
        let text = "[[experiment]]\nname = \"perfect-prob\"\ntrials = = 3\n";
        match BatteryConfig::parse(text) {
            Err(HarnessError::Config { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_names_and_keys_rejected() {
        assert!(BatteryConfig::parse("[[experiment]]\nname = \"nope\"\n").is_err());
        let e = BatteryConfig::parse("[[experiment]]\nname = \"perfect-prob\"\ntrails = 5\n").unwrap_err();
        assert!(e.to_string().contains("trails"), "{e}");
    }
}
