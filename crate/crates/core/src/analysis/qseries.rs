use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used for the derived coupling constants.
pub const CONSTANT_TOL: f64 = 1e-12;

/// A truncated `(q)_∞` with a bound on its relative truncation error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QSeriesValue {
    pub q: f64,
    pub value: f64,
    /// Number of factors `1 − q^k` multiplied.
    pub truncation_k: u64,
    /// Bound on `Σ_{k>K} q^k/(1−q^k)`, which bounds the relative error.
    pub tail_bound: f64,
}

/// `Σ_{k>K} q^k/(1−q^k) <= q^{K+1} / ((1−q)(1−q^{K+1}))`.
fn tail(q: f64, qk1: f64) -> f64 {
    qk1 / ((1.0 - q) * (1.0 - qk1))
}

/// `(q)_∞ = ∏_{k≥1}(1 − q^k)`, truncated once the tail bound is `<= tol`.
pub fn q_pochhammer_inf(q: f64, tol: f64) -> Result<QSeriesValue> {
    if !(0.0..1.0).contains(&q) || !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("need 0 <= q < 1 and tol > 0 (q = {q}, tol = {tol})")));
    }
    let mut value = 1.0;
    let mut qk = q;
    let mut k = 0;
    while tail(q, qk) > tol {
        value *= 1.0 - qk;
        qk *= q;
        k += 1;
    }
    Ok(QSeriesValue {
        q,
        value,
        truncation_k: k,
        tail_bound: tail(q, qk),
    })
}

fn qpoch(q: f64) -> f64 {
    q_pochhammer_inf(q, CONSTANT_TOL).expect("q in [0,1)").value
}

/// `c = 1 − (1−q)(q)_∞²`, the per-step non-coupling probability.
pub fn coupling_constant(q: f64) -> f64 {
    1.0 - (1.0 - q) * qpoch(q).powi(2)
}

/// `1 − (1−q)(q)_∞`, the no-cut probability bound per position.
pub fn domination_constant(q: f64) -> f64 {
    1.0 - (1.0 - q) * qpoch(q)
}

/// `[1 − (1−q)(q)_∞²]^n`.
pub fn coupling_tail_bound(q: f64, n: u64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    coupling_constant(q).powf(n as f64)
}

/// `√(2π/t) · exp(−π²/(6t))` with `t = ln(1/q)`, the `q → 1` asymptotic of
/// `(q)_∞`.
pub fn hardy_ramanujan(q: f64) -> f64 {
    let t = -q.ln();
    (2.0 * PI / t).sqrt() * (-PI * PI / (6.0 * t)).exp()
}

/// `√(2π(1−q)) · exp(−π²/(6(1−q)))`: the same exponent with the prefactor
/// inverted. Off by a factor of order `1/(1−q)`; kept for comparison.
pub fn hardy_ramanujan_display(q: f64) -> f64 {
    let t = 1.0 - q;
    (2.0 * PI * t).sqrt() * (-PI * PI / (6.0 * t)).exp()
}
