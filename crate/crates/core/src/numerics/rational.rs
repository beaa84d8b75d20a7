//! Helpers around `BigRational`: parsing, formatting, conversions and
//! directed approximations of irrational constants.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: &BigInt) -> Q {
    Q::from_integer(n.clone())
}

/// Formats a rational as `"p/q"` (always with an explicit denominator).
pub fn format_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"-1.25"`.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let n: BigInt = a.trim().parse().ok()?;
        let d: BigInt = b.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Q::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let digits = format!("{}{}", ip.trim_start_matches(['-', '+']), fp);
        let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
        let d = num_traits::pow(BigInt::from(10), fp.len());
        let v = Q::new(n, d);
        return Some(if neg { -v } else { v });
    }
    let n: BigInt = s.parse().ok()?;
    Some(Q::from_integer(n))
}

/// `serde_with` adapter writing rationals as `"p/q"` strings.
pub struct QStr;

impl serde_with::SerializeAs<Q> for QStr {
    fn serialize_as<S: serde::Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_q(x))
    }
}

impl<'de> serde_with::DeserializeAs<'de, Q> for QStr {
    fn deserialize_as<D: serde::Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s: String = serde::Deserialize::deserialize(d)?;
        parse_q(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational `{s}`")))
    }
}

pub fn to_f64(x: &Q) -> f64 {
    if let (Some(n), Some(d)) = (x.numer().to_f64(), x.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Large operands: shift both down to keep a 64-bit window.
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    let shift_n = (nb - 60).max(0);
    let shift_d = (db - 60).max(0);
    let n = (x.numer() >> shift_n as usize).to_f64().unwrap_or(0.0);
    let d = (x.denom() >> shift_d as usize).to_f64().unwrap_or(1.0);
    n / d * 2f64.powi((shift_n - shift_d) as i32)
}

/// Exact rational value of a finite `f64`.
pub fn from_f64_exact(v: f64) -> Q {
    Q::from_float(v).expect("finite float")
}

/// Rational approximation of `v` with denominator `2^bits`, rounded to nearest.
pub fn from_f64_dyadic(v: f64, bits: u32) -> Q {
    let scale = 2f64.powi(bits as i32);
    let n = (v * scale).round();
    Q::new(from_f64_exact(n).to_integer(), BigInt::one() << bits)
}

pub fn floor_q(x: &Q) -> BigInt {
    x.floor().to_integer()
}

pub fn ceil_q(x: &Q) -> BigInt {
    x.ceil().to_integer()
}

/// `floor(sqrt(x))` for a nonnegative rational.
pub fn isqrt_floor_q(x: &Q) -> BigInt {
    assert!(!x.is_negative());
    // floor(sqrt(n/d)) = floor(sqrt(n*d)/d) and the integer square root is monotone.
    let nd = x.numer() * x.denom();
    let r = nd.sqrt();
    r.div_floor(x.denom())
}

/// Lower and upper rational bounds on `sqrt(x)` with absolute error at most `2^-bits`.
pub fn sqrt_bounds(x: &Q, bits: u32) -> (Q, Q) {
    assert!(!x.is_negative());
    let scaled = x * Q::from_integer(BigInt::one() << (2 * bits as usize));
    let lo = isqrt_floor_q(&scaled);
    let den = BigInt::one() << bits as usize;
    let lo_q = Q::new(lo.clone(), den.clone());
    let hi_q = if &lo_q * &lo_q == *x { lo_q.clone() } else { Q::new(lo + 1, den) };
    (lo_q, hi_q)
}

/// Returns `Some(r)` when `x = r^2` for a rational `r >= 0`.
pub fn exact_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &n * &n == *x.numer() && &d * &d == *x.denom() {
        Some(Q::new(n, d))
    } else {
        None
    }
}

/// Rational upper bound on pi^2 with relative error below 1e-9.
pub fn pi_sq_upper() -> Q {
    // pi^2 = 9.869604401089358...
    Q::new(BigInt::from(9_869_604_402i64), BigInt::from(1_000_000_000i64))
}

/// Rational lower bound on pi^2 with relative error below 1e-9.
pub fn pi_sq_lower() -> Q {
    Q::new(BigInt::from(9_869_604_401i64), BigInt::from(1_000_000_000i64))
}

/// Smallest rational of the form `k / 2^bits` that is `>= v` (for `v` given as f64
/// with a safety margin of a few ulps).
pub fn upper_q_of_f64(v: f64, bits: u32) -> Q {
    let bumped = v * (1.0 + 4.0 * f64::EPSILON) + f64::MIN_POSITIVE;
    let scale = 2f64.powi(bits as i32);
    let n = (bumped * scale).ceil();
    Q::new(from_f64_exact(n).to_integer(), BigInt::one() << bits)
}

pub fn biguint_to_bigint(x: &BigUint) -> BigInt {
    BigInt::from_biguint(Sign::Plus, x.clone())
}

pub fn abs_q(x: &Q) -> Q {
    x.abs()
}

pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        let x = qf(-6, 4);
        assert_eq!(format_q(&x), "-3/2");
        assert_eq!(parse_q("-3/2"), Some(x));
        assert_eq!(parse_q("7"), Some(q(7)));
        assert_eq!(parse_q("-1.25"), Some(qf(-5, 4)));
        assert_eq!(parse_q("1/0"), None);
    }

    #[test]
    fn sqrt_helpers() {
        assert_eq!(exact_sqrt(&qf(9, 4)), Some(qf(3, 2)));
        assert_eq!(exact_sqrt(&q(2)), None);
        let (lo, hi) = sqrt_bounds(&q(2), 40);
        assert!(&lo * &lo <= q(2) && &hi * &hi >= q(2));
        assert!(hi - lo <= Q::new(BigInt::one(), BigInt::one() << 40usize));
        assert_eq!(isqrt_floor_q(&qf(17, 4)), BigInt::from(2));
    }

    #[test]
    fn pi_bounds_bracket() {
        let p2 = std::f64::consts::PI * std::f64::consts::PI;
        assert!(to_f64(&pi_sq_lower()) <= p2 && p2 <= to_f64(&pi_sq_upper()));
    }

    #[test]
    fn to_f64_handles_huge_operands() {
        let big = BigInt::one() << 3000usize;
        let x = Q::new(big.clone() * 3, big);
        assert!((to_f64(&x) - 3.0).abs() < 1e-12);
    }
}
