use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A set of individuals' indices: finite, a ray `(−∞, m]`, or a low set.
///
/// A low set is bounded above with complement bounded below. It is stored in
/// canonical form `(−∞, r] ∪ extras` where `r = r(A)` is the largest integer
/// with `(−∞, r] ⊆ A`, so `r + 1 ∉ A` and every extra is `>= r + 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexSet {
    Finite(Vec<i64>),
    SemiInfinite(i64),
    Low { r: i64, extras: Vec<i64> },
}

impl IndexSet {
    pub fn finite(items: impl IntoIterator<Item = i64>) -> Result<Self> {
        let mut v: Vec<i64> = items.into_iter().collect();
        v.sort_unstable();
        if v.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidIndexSet("duplicate index in finite set".into()));
        }
        Ok(IndexSet::Finite(v))
    }

    /// The integer interval `[lo, hi]`.
    pub fn interval(lo: i64, hi: i64) -> Self {
        IndexSet::Finite((lo..=hi).collect())
    }

    pub fn semi_infinite(top: i64) -> Self {
        IndexSet::SemiInfinite(top)
    }

    /// Low set `(−∞, r] ∪ extras`; `extras` may overlap the ray or touch it,
    /// the result is canonicalised.
    pub fn low(r: i64, extras: impl IntoIterator<Item = i64>) -> Self {
        let mut extras: Vec<i64> = extras.into_iter().filter(|&x| x > r).collect();
        extras.sort_unstable();
        extras.dedup();
        let mut r = r;
        let mut start = 0;
        while start < extras.len() && extras[start] == r + 1 {
            r += 1;
            start += 1;
        }
        extras.drain(..start);
        if extras.is_empty() {
            IndexSet::SemiInfinite(r)
        } else {
            IndexSet::Low { r, extras }
        }
    }

    /// The low set whose symmetric difference with `(−∞, 0]` is
    /// `added ∪ removed`, with `added ⊆ [1, ∞)` and `removed ⊆ (−∞, 0]`.
    pub fn low_from_sym_diff(added: &[i64], removed: &[i64]) -> Result<Self> {
        if added.iter().any(|&a| a <= 0) || removed.iter().any(|&r| r > 0) {
            return Err(Error::InvalidIndexSet(
                "added must be positive and removed non-positive".into(),
            ));
        }
        let floor = removed.iter().copied().min().map_or(0, |m| m - 1);
        let extras = (floor + 1..=0)
            .filter(|x| !removed.contains(x))
            .chain(added.iter().copied());
        Ok(IndexSet::low(floor, extras))
    }

    pub fn contains(&self, x: i64) -> bool {
        match self {
            IndexSet::Finite(v) => v.binary_search(&x).is_ok(),
            IndexSet::SemiInfinite(m) => x <= *m,
            IndexSet::Low { r, extras } => x <= *r || extras.binary_search(&x).is_ok(),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, IndexSet::Finite(_))
    }

    /// `r(A)` for low sets.
    pub fn r(&self) -> Option<i64> {
        match self {
            IndexSet::Finite(_) => None,
            IndexSet::SemiInfinite(m) => Some(*m),
            IndexSet::Low { r, .. } => Some(*r),
        }
    }

    pub fn max(&self) -> Option<i64> {
        match self {
            IndexSet::Finite(v) => v.last().copied(),
            IndexSet::SemiInfinite(m) => Some(*m),
            IndexSet::Low { r, extras } => extras.last().copied().or(Some(*r)),
        }
    }

    pub fn min(&self) -> Option<i64> {
        match self {
            IndexSet::Finite(v) => v.first().copied(),
            _ => None,
        }
    }

    /// Cardinality of a finite set.
    pub fn len(&self) -> Option<usize> {
        match self {
            IndexSet::Finite(v) => Some(v.len()),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, IndexSet::Finite(v) if v.is_empty())
    }

    /// `|A ∩ (t, ∞)|`, finite for every variant.
    pub fn count_above(&self, t: i64) -> u64 {
        let finite_part = |v: &[i64]| v.iter().filter(|&&x| x > t).count() as u64;
        match self {
            IndexSet::Finite(v) => finite_part(v),
            IndexSet::SemiInfinite(m) => (*m - t).max(0) as u64,
            IndexSet::Low { r, extras } => (*r - t).max(0) as u64 + finite_part(extras),
        }
    }

    /// Members in decreasing order (infinite for low sets).
    pub fn iter_desc(&self) -> Box<dyn Iterator<Item = i64> + '_> {
        match self {
            IndexSet::Finite(v) => Box::new(v.iter().rev().copied()),
            IndexSet::SemiInfinite(m) => Box::new((i64::MIN..=*m).rev()),
            IndexSet::Low { r, extras } => {
                Box::new(extras.iter().rev().copied().chain((i64::MIN..=*r).rev()))
            }
        }
    }

    /// Largest member strictly below `x`.
    pub fn pred(&self, x: i64) -> Option<i64> {
        let below = |v: &[i64]| {
            let k = v.partition_point(|&y| y < x);
            (k > 0).then(|| v[k - 1])
        };
        match self {
            IndexSet::Finite(v) => below(v),
            IndexSet::SemiInfinite(m) => Some((*m).min(x.checked_sub(1)?)),
            IndexSet::Low { r, extras } => {
                below(extras).or_else(|| Some((*r).min(x.checked_sub(1)?)))
            }
        }
    }
}

/// Whether the low sets `a` and `b` satisfy `|A∖B| = |B∖A|`.
pub fn is_balanced(a: &IndexSet, b: &IndexSet) -> Result<bool> {
    match (a.r(), b.r()) {
        (Some(ra), Some(rb)) => {
            let t = ra.min(rb);
            Ok(a.count_above(t) == b.count_above(t))
        }
        _ => Err(Error::InvalidIndexSet(
            "balance is defined for pairs of low sets".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_sorted_and_duplicate_free() {
        let s = IndexSet::finite([3, -1, 2]).unwrap();
        assert_eq!(s, IndexSet::Finite(vec![-1, 2, 3]));
        assert!(IndexSet::finite([1, 1]).is_err());
        assert_eq!(s.iter_desc().collect::<Vec<_>>(), vec![3, 2, -1]);
    }

    #[test]
    fn low_set_canonical_r() {
        // (−∞,0] ∪ {1, 3}: r = 1, extras = {3}
        let a = IndexSet::low(0, [1, 3]);
        assert_eq!(a, IndexSet::Low { r: 1, extras: vec![3] });
        assert_eq!(a.r(), Some(1));
        assert!(a.contains(-100) && a.contains(1) && !a.contains(2) && a.contains(3));
        assert_eq!(a.max(), Some(3));
        assert_eq!(IndexSet::low(0, [1, 2]), IndexSet::SemiInfinite(2));
    }

    #[test]
    fn low_from_sym_diff_matches_definition() {
        // (−∞,0] minus {0} plus {1}: (−∞,−1] ∪ {1}
        let b = IndexSet::low_from_sym_diff(&[1], &[0]).unwrap();
        assert_eq!(b, IndexSet::Low { r: -1, extras: vec![1] });
        // removing −3 and −1 leaves (−∞,−4] ∪ {−2, 0}
        let c = IndexSet::low_from_sym_diff(&[], &[-3, -1]).unwrap();
        assert_eq!(c, IndexSet::Low { r: -4, extras: vec![-2, 0] });
        for x in -10..5 {
            let expected = x <= 0 && x != -3 && x != -1;
            assert_eq!(c.contains(x), expected, "x = {x}");
        }
        assert!(IndexSet::low_from_sym_diff(&[0], &[]).is_err());
    }

    #[test]
    fn descending_iteration_of_low_set() {
        let a = IndexSet::low(-1, [1, 4]);
        let first: Vec<i64> = a.iter_desc().take(5).collect();
        assert_eq!(first, vec![4, 1, -1, -2, -3]);
    }

    #[test]
    fn balance() {
        let ray = IndexSet::semi_infinite(0);
        let b = IndexSet::low_from_sym_diff(&[1], &[0]).unwrap();
        assert!(is_balanced(&ray, &b).unwrap());
        assert!(!is_balanced(&ray, &IndexSet::semi_infinite(1)).unwrap());
        let c = IndexSet::low_from_sym_diff(&[2], &[]).unwrap();
        assert!(is_balanced(&c, &IndexSet::semi_infinite(1)).unwrap());
        assert!(is_balanced(&IndexSet::interval(0, 2), &ray).is_err());
    }

    #[test]
    fn pred_walks_members() {
        let a = IndexSet::low(-1, [1, 4]);
        let mut x = i64::MAX;
        let mut seen = vec![];
        for _ in 0..5 {
            x = a.pred(x).unwrap();
            seen.push(x);
        }
        assert_eq!(seen, vec![4, 1, -1, -2, -3]);
        let f = IndexSet::finite([0, 3]).unwrap();
        assert_eq!(f.pred(3), Some(0));
        assert_eq!(f.pred(0), None);
    }

    #[test]
    fn count_above() {
        let a = IndexSet::low(0, [2, 5]);
        assert_eq!(a.count_above(-3), 5);
        assert_eq!(a.count_above(2), 1);
        assert_eq!(IndexSet::semi_infinite(4).count_above(10), 0);
    }
}
