//! Exact and certified scalar arithmetic.

pub mod interval;
pub mod linalg;
pub mod poly;
pub mod rational;
pub mod surd;

pub use interval::{certify_strict_gt, compare_intervals, default_schedule, Decision, FastInterval, Interval};
pub use poly::{eval_chebyshev, eval_poly, Scalar};
pub use rational::Q;
pub use surd::{MultiSurd, SurdScalar};

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Binomial coefficient with signed arguments: zero outside `0 <= k <= n`.
pub fn binomial_i(n: i64, k: i64) -> BigUint {
    if n < 0 || k < 0 || k > n {
        BigUint::zero()
    } else {
        binomial(n as u64, k as u64)
    }
}

/// Binomial coefficient as `u128`, saturating at `u128::MAX`.
pub fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(3, 4), BigUint::zero());
        assert_eq!(binomial_i(0, 0), BigUint::one());
        assert_eq!(binomial_i(-1, 0), BigUint::zero());
        assert_eq!(binomial_u128(64, 32), 1832624140942590534u128);
    }
}
