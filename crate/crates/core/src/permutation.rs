use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bijection of `[lo, lo + n)` onto `[lo, lo + n)`, stored as the image
/// list `values[k] = σ(lo + k)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FinitePermutation {
    domain_lo: i64,
    values: Vec<i64>,
}

impl FinitePermutation {
    pub fn new(domain_lo: i64, values: Vec<i64>) -> Result<Self> {
        let n = values.len() as i64;
        let mut seen = vec![false; values.len()];
        for &v in &values {
            let k = v - domain_lo;
            if !(0..n).contains(&k) || std::mem::replace(&mut seen[k as usize], true) {
                return Err(Error::InvalidArgument(format!(
                    "{values:?} is not a permutation of [{domain_lo}, {})",
                    domain_lo + n
                )));
            }
        }
        Ok(Self { domain_lo, values })
    }

    pub fn identity(domain_lo: i64, n: usize) -> Self {
        Self {
            domain_lo,
            values: (domain_lo..domain_lo + n as i64).collect(),
        }
    }

    pub fn domain_lo(&self) -> i64 {
        self.domain_lo
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn apply(&self, i: i64) -> Option<i64> {
        usize::try_from(i - self.domain_lo)
            .ok()
            .and_then(|k| self.values.get(k).copied())
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.values.len()];
        for (k, &v) in self.values.iter().enumerate() {
            inv[(v - self.domain_lo) as usize] = self.domain_lo + k as i64;
        }
        Self {
            domain_lo: self.domain_lo,
            values: inv,
        }
    }

    /// Number of pairs `i < j` with `σ(i) > σ(j)`, by merge sort.
    pub fn inversion_number(&self) -> u64 {
        let mut v = self.values.clone();
        let mut buf = vec![0; v.len()];
        sort_count(&mut v, &mut buf)
    }
}

fn sort_count(v: &mut [i64], buf: &mut [i64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut count = sort_count(&mut v[..mid], &mut buf[..mid]) + sort_count(&mut v[mid..], &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[i] <= v[j] {
            buf[k] = v[i];
            i += 1;
        } else {
            buf[k] = v[j];
            count += (mid - i) as u64;
            j += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    count
}

/// All permutations of `[0, n)` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<FinitePermutation> {
    let mut out = Vec::new();
    let mut cur: Vec<i64> = (0..n as i64).collect();
    loop {
        out.push(FinitePermutation {
            domain_lo: 0,
            values: cur.clone(),
        });
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}
