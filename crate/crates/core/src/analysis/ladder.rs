use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::{Interval, WindowMatching};

/// Comparison of tame matchings of flows `n` and `n + 1` on a common window.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LadderReport {
    pub window: Option<Interval>,
    /// Males where the two matchings differ, increasing.
    pub exceptions: Vec<i64>,
    /// Males with `σ_n(i) > σ_{n+1}(i)`.
    pub dominance_violations: Vec<i64>,
    /// Consecutive exceptions `(i_k, i_{k+1})` with `σ_n(i_{k+1}) ≠ σ_{n+1}(i_k)`.
    pub ladder_violations: Vec<(i64, i64)>,
    /// Consecutive exceptions with `σ_n(i_k) >= σ_n(i_{k+1})`.
    pub order_violations: Vec<(i64, i64)>,
    /// Window males not matched in both.
    pub unresolved: Vec<i64>,
}

impl LadderReport {
    pub fn violations(&self) -> usize {
        self.dominance_violations.len() + self.ladder_violations.len() + self.order_violations.len()
    }

    pub fn is_clean(&self) -> bool {
        self.violations() == 0 && self.unresolved.is_empty()
    }
}

/// Checks `σ_n <= σ_{n+1}` pointwise and the ladder structure of the
/// exception set.
pub fn shift_ladder_check(sigma_n: &WindowMatching, sigma_n1: &WindowMatching) -> Result<LadderReport> {
    match (sigma_n.flow(), sigma_n1.flow()) {
        (Some(a), Some(b)) if b == a + 1 => {}
        (lower, upper) => return Err(Error::FlowMismatch { lower, upper }),
    }
    let mut report = LadderReport::default();
    let Some(window) = sigma_n.window().intersect(&sigma_n1.window()) else {
        return Ok(report);
    };
    report.window = Some(window);
    let mut values = Vec::new();
    for i in window.iter() {
        match (sigma_n.sigma(i), sigma_n1.sigma(i)) {
            (Some(a), Some(b)) => {
                if a > b {
                    report.dominance_violations.push(i);
                }
                if a != b {
                    report.exceptions.push(i);
                    values.push((a, b));
                }
            }
            _ => report.unresolved.push(i),
        }
    }
    for (k, w) in report.exceptions.windows(2).enumerate() {
        let (lower_k, upper_k) = values[k];
        let (lower_k1, _) = values[k + 1];
        if lower_k1 != upper_k {
            report.ladder_violations.push((w[0], w[1]));
        }
        if lower_k >= lower_k1 {
            report.order_violations.push((w[0], w[1]));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shift(w: Interval, n: i64) -> WindowMatching {
        let mut b = WindowMatching::builder(w);
        for i in w.iter() {
            b.pair(i, i + n);
        }
        b.flow(Some(n)).sealed(true).build().unwrap()
    }

    #[test]
    fn shifts_form_a_full_ladder() {
        let w = Interval::new(-5, 5).unwrap();
        let r = shift_ladder_check(&shift(w, 0), &shift(w, 1)).unwrap();
        assert_eq!(r.exceptions, w.iter().collect::<Vec<_>>());
        assert!(r.is_clean());
    }

    #[test]
    fn self_comparison_is_flow_mismatch() {
        let w = Interval::new(0, 3).unwrap();
        let s = shift(w, 0);
        assert!(matches!(
            shift_ladder_check(&s, &s),
            Err(Error::FlowMismatch { lower: Some(0), upper: Some(0) })
        ));
    }

    #[test]
    fn detects_dominance_violation() {
        let w = Interval::new(0, 1).unwrap();
        let mut b = WindowMatching::builder(w);
        b.pair(0, 1).pair(1, 0);
        let s0 = b.flow(Some(0)).build().unwrap();
        let r = shift_ladder_check(&s0, &shift(w, 1)).unwrap();
        // σ_0(0) = 1 = σ_1(0) agree; at 1, σ_0 = 0 < 2
        assert!(r.dominance_violations.is_empty());
        let mut b = WindowMatching::builder(w);
        b.pair(0, 5).pair(1, 6);
        let big = b.flow(Some(0)).build().unwrap();
        let r = shift_ladder_check(&big, &shift(w, 1)).unwrap();
        assert_eq!(r.dominance_violations, vec![0, 1]);
    }
}
