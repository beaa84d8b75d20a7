//! Primality for the small integers used as lattice parameters.

use crate::error::{Error, Result};

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut q = 3;
    while q * q <= p {
        if p % q == 0 {
            return false;
        }
        q += 2;
    }
    true
}

/// Largest prime `p <= x`.
pub fn largest_prime_leq(x: f64) -> Result<u64> {
    if !(x >= 2.0) {
        return Err(Error::Invalid(format!("no prime below {x}")));
    }
    let mut p = x.floor() as u64;
    while !is_prime(p) {
        p -= 1;
    }
    Ok(p)
}

/// Largest prime `p` with `p^e <= n`, decided exactly.
pub fn largest_prime_root(n: u64, e: u32) -> Result<u64> {
    let mut p = (n as f64).powf(1.0 / e as f64).floor() as u64 + 1;
    while p >= 2 && (p as u128).checked_pow(e).map_or(true, |v| v > n as u128) {
        p -= 1;
    }
    while p >= 2 && !is_prime(p) {
        p -= 1;
    }
    if p < 2 {
        return Err(Error::Invalid(format!("no prime p with p^{e} <= {n}")));
    }
    Ok(p)
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i64
}

pub fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0, |g, &x| gcd(g, x))
}

/// Extended gcd: `(g, s, t)` with `s*a + t*b = g >= 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        assert_eq!(largest_prime_leq(10.0).unwrap(), 7);
        assert_eq!(largest_prime_leq(13.0).unwrap(), 13);
        assert_eq!(largest_prime_leq(8.0).unwrap(), 7);
        assert!(largest_prime_leq(1.5).is_err());
        assert_eq!(largest_prime_root(4096, 4).unwrap(), 7);
        assert_eq!(largest_prime_root(64, 4).unwrap(), 2);
        assert_eq!(largest_prime_root(256, 4).unwrap(), 3);
        assert_eq!(largest_prime_root(16, 4).unwrap(), 2);
    }

    #[test]
    fn ext_gcd_identity() {
        for (a, b) in [(240i128, 46i128), (-7, 3), (0, 5), (5, 0)] {
            let (g, s, t) = ext_gcd(a, b);
            assert_eq!(s * a + t * b, g);
            assert_eq!(g, gcd(a as i64, b as i64) as i128);
        }
    }
}
