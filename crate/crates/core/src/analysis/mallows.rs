use num::{BigRational, One, Zero};

use crate::permutation::FinitePermutation;

/// `Σ_τ q^{inv(τ)} = ∏_{i=1}^n (1 − q^i)/(1 − q)`.
pub fn mallows_normalizer(n: usize, q: f64) -> f64 {
    // ∏ (1 + q + … + q^{i−1}), which stays exact at q = 0
    let mut z = 1.0;
    let mut term = 1.0;
    let mut partial = 0.0;
    for _ in 0..n {
        partial += term;
        term *= q;
        z *= partial;
    }
    z
}

/// `q^{inv(σ)} (1−q)^n / ∏_{i=1}^n (1 − q^i)`.
pub fn mallows_pmf(perm: &FinitePermutation, q: f64) -> f64 {
    q.powi(perm.inversion_number() as i32) / mallows_normalizer(perm.len(), q)
}

pub fn mallows_normalizer_exact(n: usize, q: &BigRational) -> BigRational {
    let mut z = BigRational::one();
    let mut term = BigRational::one();
    let mut partial = BigRational::zero();
    for _ in 0..n {
        partial += &term;
        term *= q;
        z *= &partial;
    }
    z
}

/// [`mallows_pmf`] in exact rational arithmetic.
pub fn mallows_pmf_exact(perm: &FinitePermutation, q: &BigRational) -> BigRational {
    num::pow(q.clone(), perm.inversion_number() as usize) / mallows_normalizer_exact(perm.len(), q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permutation::all_permutations;
    use num::BigInt;

    fn half() -> BigRational {
        BigRational::new(BigInt::from(1), BigInt::from(2))
    }

    #[test]
    fn point_mass_at_zero() {
        assert_eq!(mallows_pmf(&FinitePermutation::identity(0, 5), 0.0), 1.0);
        let swap = FinitePermutation::new(0, vec![1, 0]).unwrap();
        assert_eq!(mallows_pmf(&swap, 0.0), 0.0);
    }

    #[test]
    fn n2_half() {
        let id = FinitePermutation::identity(0, 2);
        let swap = FinitePermutation::new(0, vec![1, 0]).unwrap();
        let r = |a, b| BigRational::new(BigInt::from(a), BigInt::from(b));
        assert_eq!(mallows_pmf_exact(&id, &half()), r(2, 3));
        assert_eq!(mallows_pmf_exact(&swap, &half()), r(1, 3));
    }

    #[test]
    fn n3_reversal() {
        let rev = FinitePermutation::new(0, vec![2, 1, 0]).unwrap();
        assert_eq!(
            mallows_pmf_exact(&rev, &half()),
            BigRational::new(BigInt::from(1), BigInt::from(21))
        );
        assert!((mallows_pmf(&rev, 0.5) - 1.0 / 21.0).abs() < 1e-15);
    }

    #[test]
    fn normalizer_matches_enumeration() {
        // exact sum for n <= 6, float sum for n <= 8
        for n in 0..=6 {
            let total: BigRational = all_permutations(n).iter().map(|p| mallows_pmf_exact(p, &half())).sum();
            assert_eq!(total, BigRational::one(), "n = {n}");
        }
        for n in 7..=8 {
            for q in [0.1, 0.5, 0.9] {
                let total: f64 = all_permutations(n).iter().map(|p| mallows_pmf(p, q)).sum();
                assert!((total - 1.0).abs() < 1e-12, "n = {n}, q = {q}");
            }
        }
    }
}
