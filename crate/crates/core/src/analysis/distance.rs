use crate::error::{Error, Result};
use crate::oracle::Compatibility;

/// `X_i = min{|i − j| : (i,♂) compatible with (j,♀)}`, scanning
/// `j = i, i+1, i−1, i+2, …` over at most `scan_cap` candidates.
pub fn min_compatible_distance<C: Compatibility + ?Sized>(oracle: &C, i: i64, scan_cap: u64) -> Result<u64> {
    let mut examined = 0;
    for d in 0u64.. {
        let candidates: &[i64] = if d == 0 { &[0] } else { &[1, -1] };
        for &s in candidates {
            if examined >= scan_cap {
                return Err(Error::ScanCapExceeded {
                    who: format!("distance scan at male {i}"),
                    examined,
                });
            }
            examined += 1;
            if oracle.is_compatible(i, i + s * d as i64) {
                return Ok(d);
            }
        }
    }
    unreachable!()
}

/// `P(X_i >= n) = q^{2n−1}` for `n >= 1`.
pub fn distance_tail(n: u64, q: f64) -> f64 {
    if n == 0 {
        1.0
    } else {
        q.powi(2 * n as i32 - 1)
    }
}
