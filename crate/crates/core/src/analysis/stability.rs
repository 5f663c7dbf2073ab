use crate::matching::{Interval, Rank, WindowMatching};
use crate::oracle::Compatibility;

/// Blocking pairs `(i, j)` in `window × window`: compatible, with
/// `σ(i) < j` and `σ⁻¹(j) < i` (unmatched ranks as `−∞`).
///
/// Indices without a record in the matching, or with an unknown partner, are
/// skipped.
pub fn verify_stable<C: Compatibility + ?Sized>(
    matching: &WindowMatching,
    oracle: &C,
    window: Interval,
) -> Vec<(i64, i64)> {
    let males: Vec<(i64, Rank)> = window
        .iter()
        .filter_map(|i| Some((i, matching.male(i)?.rank()?)))
        .collect();
    let females: Vec<(i64, Rank)> = window
        .iter()
        .filter_map(|j| Some((j, matching.female(j)?.rank()?)))
        .collect();
    let mut out = Vec::new();
    for &(i, ri) in &males {
        for &(j, rj) in &females {
            if ri < Rank::At(j) && rj < Rank::At(i) && oracle.is_compatible(i, j) {
                out.push((i, j));
            }
        }
    }
    out
}
