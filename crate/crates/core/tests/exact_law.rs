//! Exhaustive checks over every edge set of small complete bipartite graphs.

use std::collections::HashMap;

use mallows_core::analysis::{mallows_pmf, mallows_pmf_exact, verify_stable};
use mallows_core::oracle::GridEdges;
use mallows_core::permutation::{all_permutations, FinitePermutation};
use mallows_core::samplers::stable_match_finite;
use mallows_core::{Compatibility, IndexSet, Interval, WindowMatching};
use num::{BigInt, BigRational, One, Zero};

/// Every matching of `[0,n) × [0,n)` as a male → female-or-none vector.
fn all_matchings(n: usize) -> Vec<Vec<Option<usize>>> {
    fn go(i: usize, n: usize, used: &mut Vec<bool>, cur: &mut Vec<Option<usize>>, out: &mut Vec<Vec<Option<usize>>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        cur.push(None);
        go(i + 1, n, used, cur, out);
        cur.pop();
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                cur.push(Some(j));
                go(i + 1, n, used, cur, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(0, n, &mut vec![false; n], &mut Vec::new(), &mut out);
    out
}

/// Direct evaluation of the stability definition; `−1` stands for `−∞`.
fn is_stable(m: &[Option<usize>], edges: &GridEdges) -> bool {
    let n = m.len();
    let mut inv = vec![-1i64; n];
    for (i, p) in m.iter().enumerate() {
        if let Some(j) = p {
            if !edges.is_compatible(i as i64, *j as i64) {
                return false;
            }
            inv[*j] = i as i64;
        }
    }
    for i in 0..n {
        let si = m[i].map_or(-1, |j| j as i64);
        for j in 0..n {
            if si < j as i64 && inv[j] < i as i64 && edges.is_compatible(i as i64, j as i64) {
                return false;
            }
        }
    }
    true
}

fn as_vector(w: &WindowMatching, n: usize) -> Vec<Option<usize>> {
    (0..n as i64).map(|i| w.sigma(i).map(|j| j as usize)).collect()
}

#[test]
fn stable_match_is_the_unique_stable_matching() {
    for n in 1..=3usize {
        let candidates = all_matchings(n);
        let a = IndexSet::interval(0, n as i64 - 1);
        for mask in 0..(1u64 << (n * n)) {
            let edges = GridEdges::new(0, n, mask);
            let stable: Vec<_> = candidates.iter().filter(|m| is_stable(m, &edges)).collect();
            assert_eq!(stable.len(), 1, "n = {n}, mask = {mask:b}");
            let out = stable_match_finite(&a, &a, &edges).unwrap();
            assert_eq!(&as_vector(&out, n), stable[0]);
            let window = Interval::new(0, n as i64 - 1).unwrap();
            assert!(verify_stable(&out, &edges, window).is_empty());
        }
    }
}

#[test]
fn stable_match_is_unique_for_four() {
    let n = 4;
    let candidates = all_matchings(n);
    assert_eq!(candidates.len(), 209);
    let a = IndexSet::interval(0, 3);
    for mask in 0..(1u64 << 16) {
        let edges = GridEdges::new(0, n, mask);
        let out = as_vector(&stable_match_finite(&a, &a, &edges).unwrap(), n);
        let mut count = 0;
        for m in &candidates {
            if is_stable(m, &edges) {
                count += 1;
                assert_eq!(m, &out, "mask = {mask:b}");
            }
        }
        assert_eq!(count, 1);
    }
}

fn perm_of(w: &WindowMatching, n: usize) -> Option<FinitePermutation> {
    let values: Option<Vec<i64>> = (0..n as i64).map(|i| w.sigma(i)).collect();
    FinitePermutation::new(0, values?).ok()
}

fn exact_conditional_law(n: usize, q: &BigRational) -> HashMap<Vec<i64>, BigRational> {
    let p = BigRational::one() - q;
    let a = IndexSet::interval(0, n as i64 - 1);
    let mut law: HashMap<Vec<i64>, BigRational> = HashMap::new();
    let mut total = BigRational::zero();
    for mask in 0..(1u64 << (n * n)) {
        let edges = GridEdges::new(0, n, mask);
        let k = mask.count_ones() as usize;
        let w = num::pow(p.clone(), k) * num::pow(q.clone(), n * n - k);
        let out = stable_match_finite(&a, &a, &edges).unwrap();
        if let Some(perm) = perm_of(&out, n) {
            *law.entry(perm.values().to_vec()).or_insert_with(BigRational::zero) += &w;
            total += w;
        }
    }
    law.values_mut().for_each(|v| *v /= &total);
    law
}

#[test]
fn conditional_law_is_mallows_exactly() {
    let r = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
    for q in [r(1, 2), r(1, 3), r(4, 5)] {
        for n in 1..=3 {
            let law = exact_conditional_law(n, &q);
            for perm in all_permutations(n) {
                let got = law.get(perm.values()).cloned().unwrap_or_else(BigRational::zero);
                assert_eq!(got, mallows_pmf_exact(&perm, &q), "n = {n}, q = {q}, {perm:?}");
            }
        }
    }
}

#[test]
fn conditional_law_is_mallows_for_four_in_floats() {
    let n = 4;
    let a = IndexSet::interval(0, 3);
    for q in [0.5f64, 0.3] {
        let p = 1.0 - q;
        let mut law: HashMap<Vec<i64>, f64> = HashMap::new();
        let mut total = 0.0;
        for mask in 0..(1u64 << 16) {
            let edges = GridEdges::new(0, n, mask);
            let k = mask.count_ones() as i32;
            let w = p.powi(k) * q.powi(16 - k);
            if let Some(perm) = perm_of(&stable_match_finite(&a, &a, &edges).unwrap(), n) {
                *law.entry(perm.values().to_vec()).or_default() += w;
                total += w;
            }
        }
        for perm in all_permutations(n) {
            let got = law.get(perm.values()).copied().unwrap_or(0.0) / total;
            assert!((got - mallows_pmf(&perm, q)).abs() < 1e-12, "q = {q}, {perm:?}");
        }
    }
}
