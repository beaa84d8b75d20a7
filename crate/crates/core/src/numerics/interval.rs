//! Outward-rounded interval arithmetic.
//!
//! `Interval` keeps binary endpoints `m * 2^e` with arbitrary-precision
//! mantissas, rounded outward to a fixed number of bits after every
//! operation. `FastInterval` is the same idea on `f64` endpoints and serves as
//! the cheap first pass of precision schedules.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rational::Q;

pub const DEFAULT_PRECISION: u32 = 128;
pub const MAX_PRECISION: u32 = 2048;

/// The default refinement schedule: 128 bits doubling to 2048.
pub fn default_schedule() -> Vec<u32> {
    let mut v = Vec::new();
    let mut p = DEFAULT_PRECISION;
    while p <= MAX_PRECISION {
        v.push(p);
        p *= 2;
    }
    v
}

/// Exact binary number `m * 2^e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    pub m: BigInt,
    pub e: i64,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Dir {
    Down,
    Up,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic { m: BigInt::zero(), e: 0 }
    }

    pub fn from_int(v: &BigInt) -> Self {
        Dyadic { m: v.clone(), e: 0 }
    }

    fn normalize(mut self) -> Self {
        if self.m.is_zero() {
            self.e = 0;
            return self;
        }
        let tz = self.m.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.m >>= tz as usize;
            self.e += tz as i64;
        }
        self
    }

    /// Round to at most `prec` significant bits in direction `dir`.
    fn round(self, prec: u32, dir: Dir) -> Self {
        let bits = self.m.bits() as i64;
        if bits <= prec as i64 {
            return self.normalize();
        }
        let shift = (bits - prec as i64) as usize;
        // floor division by 2^shift (BigInt >> is floor for negatives)
        let floor = &self.m >> shift;
        let exact = (&floor << shift) == self.m;
        let m = match dir {
            Dir::Down => floor,
            Dir::Up => {
                if exact {
                    floor
                } else {
                    floor + 1
                }
            }
        };
        Dyadic { m, e: self.e + shift as i64 }.normalize()
    }

    fn add(&self, o: &Self) -> Self {
        if self.m.is_zero() {
            return o.clone();
        }
        if o.m.is_zero() {
            return self.clone();
        }
        let e = self.e.min(o.e);
        let a = &self.m << (self.e - e) as usize;
        let b = &o.m << (o.e - e) as usize;
        Dyadic { m: a + b, e }
    }

    fn neg(&self) -> Self {
        Dyadic { m: -&self.m, e: self.e }
    }

    fn mul(&self, o: &Self) -> Self {
        Dyadic { m: &self.m * &o.m, e: self.e + o.e }
    }

    pub fn to_q(&self) -> Q {
        if self.e >= 0 {
            Q::from_integer(&self.m << self.e as usize)
        } else {
            Q::new(self.m.clone(), BigInt::one() << (-self.e) as usize)
        }
    }

    pub fn to_f64(&self) -> f64 {
        let bits = self.m.bits() as i64;
        let shift = (bits - 60).max(0);
        let top = (&self.m >> shift as usize).to_f64().unwrap_or(0.0);
        let exp = self.e + shift;
        if exp > 2000 {
            return if top > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
        }
        if exp < -2000 {
            return 0.0;
        }
        top * 2f64.powi(exp as i32)
    }

    /// Rational `x` rounded to a dyadic with `prec` bits in direction `dir`.
    fn from_q(x: &Q, prec: u32, dir: Dir) -> Self {
        if x.denom().is_one() {
            return Dyadic::from_int(x.numer()).round(prec, dir);
        }
        // choose k so that numer * 2^k / denom has about prec+2 bits
        let k = prec as i64 + 2 + x.denom().bits() as i64 - x.numer().bits() as i64;
        let (num, den) = if k >= 0 {
            (x.numer() << k as usize, x.denom().clone())
        } else {
            (x.numer().clone(), x.denom() << (-k) as usize)
        };
        let (qf, r) = num.div_mod_floor(&den);
        let m = match dir {
            Dir::Down => qf,
            Dir::Up => {
                if r.is_zero() {
                    qf
                } else {
                    qf + 1
                }
            }
        };
        Dyadic { m, e: -k }.round(prec, dir)
    }

    fn cmp_value(&self, o: &Self) -> Ordering {
        let e = self.e.min(o.e);
        let a = &self.m << (self.e - e) as usize;
        let b = &o.m << (o.e - e) as usize;
        a.cmp(&b)
    }

    fn is_negative(&self) -> bool {
        self.m.is_negative()
    }

    fn is_positive(&self) -> bool {
        self.m.is_positive()
    }
}

/// Closed interval `[lo, hi]` with dyadic endpoints and a working precision.
#[derive(Clone, Debug)]
pub struct Interval {
    pub lo: Dyadic,
    pub hi: Dyadic,
    pub prec: u32,
}

impl PartialEq for Interval {
    fn eq(&self, o: &Self) -> bool {
        self.lo.cmp_value(&o.lo) == Ordering::Equal && self.hi.cmp_value(&o.hi) == Ordering::Equal
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.17e}, {:.17e}]", self.lo.to_f64(), self.hi.to_f64())
    }
}

impl Interval {
    pub fn point_q(x: &Q, prec: u32) -> Self {
        Interval { lo: Dyadic::from_q(x, prec, Dir::Down), hi: Dyadic::from_q(x, prec, Dir::Up), prec }
    }

    pub fn point_int(x: i64, prec: u32) -> Self {
        let d = Dyadic::from_int(&BigInt::from(x));
        Interval { lo: d.clone().round(prec, Dir::Down), hi: d.round(prec, Dir::Up), prec }
    }

    pub fn from_bounds_q(lo: &Q, hi: &Q, prec: u32) -> Self {
        assert!(lo <= hi, "interval bounds out of order");
        Interval { lo: Dyadic::from_q(lo, prec, Dir::Down), hi: Dyadic::from_q(hi, prec, Dir::Up), prec }
    }

    /// Enclosure of the finite float interval `[lo, hi]`.
    pub fn from_f64_bounds(lo: f64, hi: f64, prec: u32) -> Self {
        Self::from_bounds_q(&Q::from_float(lo).unwrap(), &Q::from_float(hi).unwrap(), prec)
    }

    pub fn zero(prec: u32) -> Self {
        Interval { lo: Dyadic::zero(), hi: Dyadic::zero(), prec }
    }

    pub fn one(prec: u32) -> Self {
        Self::point_int(1, prec)
    }

    pub fn with_precision(&self, prec: u32) -> Self {
        Interval {
            lo: self.lo.clone().round(prec, Dir::Down),
            hi: self.hi.clone().round(prec, Dir::Up),
            prec,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let prec = self.prec.max(o.prec);
        Interval {
            lo: self.lo.add(&o.lo).round(prec, Dir::Down),
            hi: self.hi.add(&o.hi).round(prec, Dir::Up),
            prec,
        }
    }

    pub fn neg(&self) -> Self {
        Interval { lo: self.hi.neg(), hi: self.lo.neg(), prec: self.prec }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let prec = self.prec.max(o.prec);
        let c = [self.lo.mul(&o.lo), self.lo.mul(&o.hi), self.hi.mul(&o.lo), self.hi.mul(&o.hi)];
        let mut lo = c[0].clone();
        let mut hi = c[0].clone();
        for v in &c[1..] {
            if v.cmp_value(&lo) == Ordering::Less {
                lo = v.clone();
            }
            if v.cmp_value(&hi) == Ordering::Greater {
                hi = v.clone();
            }
        }
        Interval { lo: lo.round(prec, Dir::Down), hi: hi.round(prec, Dir::Up), prec }
    }

    pub fn mul_q(&self, x: &Q) -> Self {
        self.mul(&Interval::point_q(x, self.prec))
    }

    pub fn square(&self) -> Self {
        let s = self.mul(self);
        if self.contains_zero() {
            Interval { lo: Dyadic::zero(), hi: s.hi, prec: s.prec }
        } else {
            s
        }
    }

    fn div_dyadic(a: &Dyadic, b: &Dyadic, prec: u32, dir: Dir) -> Dyadic {
        // a / b with b != 0
        let k = prec as i64 + 2 + b.m.bits() as i64 - a.m.bits() as i64;
        let k = k.max(0);
        let num = &a.m << k as usize;
        let (mut qt, r) = num.div_mod_floor(&b.m);
        if dir == Dir::Up && !r.is_zero() {
            qt += 1;
        }
        Dyadic { m: qt, e: a.e - b.e - k }.round(prec, dir)
    }

    /// Division; `None` when the divisor contains zero.
    pub fn div(&self, o: &Self) -> Option<Self> {
        if o.contains_zero() {
            return None;
        }
        let prec = self.prec.max(o.prec);
        let mut cands_lo = Vec::new();
        let mut cands_hi = Vec::new();
        for a in [&self.lo, &self.hi] {
            for b in [&o.lo, &o.hi] {
                cands_lo.push(Self::div_dyadic(a, b, prec + 8, Dir::Down));
                cands_hi.push(Self::div_dyadic(a, b, prec + 8, Dir::Up));
            }
        }
        let lo = cands_lo.into_iter().min_by(|x, y| x.cmp_value(y)).unwrap();
        let hi = cands_hi.into_iter().max_by(|x, y| x.cmp_value(y)).unwrap();
        Some(Interval { lo: lo.round(prec, Dir::Down), hi: hi.round(prec, Dir::Up), prec })
    }

    fn sqrt_dyadic(a: &Dyadic, prec: u32, dir: Dir) -> Dyadic {
        if !a.is_positive() {
            return Dyadic::zero();
        }
        // scale so that the exponent is even and the mantissa has >= 2*prec+4 bits
        let mut m = a.m.clone();
        let mut e = a.e;
        let want = 2 * prec as i64 + 4;
        let mut shift = (want - m.bits() as i64).max(0);
        if (e - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        m <<= shift as usize;
        e -= shift;
        let r = m.sqrt();
        let exact = &r * &r == m;
        let r = if dir == Dir::Up && !exact { r + 1 } else { r };
        Dyadic { m: r, e: e / 2 }.round(prec, dir)
    }

    /// Square root of the nonnegative part of the interval.
    pub fn sqrt(&self) -> Self {
        Interval {
            lo: Self::sqrt_dyadic(&self.lo, self.prec, Dir::Down),
            hi: Self::sqrt_dyadic(&self.hi, self.prec, Dir::Up),
            prec: self.prec,
        }
    }

    pub fn abs(&self) -> Self {
        if self.lo.is_negative() && self.hi.is_positive() {
            let nl = self.lo.neg();
            let hi = if nl.cmp_value(&self.hi) == Ordering::Greater { nl } else { self.hi.clone() };
            Interval { lo: Dyadic::zero(), hi, prec: self.prec }
        } else if self.hi.is_negative() || (self.hi.m.is_zero() && self.lo.is_negative()) {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Interval::one(self.prec);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        if k % 2 == 0 && self.contains_zero() {
            acc.lo = Dyadic::zero();
        }
        acc
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn contains_q(&self, x: &Q) -> bool {
        self.lo.to_q() <= *x && *x <= self.hi.to_q()
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo.to_f64()
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.to_f64()
    }

    pub fn lo_q(&self) -> Q {
        self.lo.to_q()
    }

    pub fn hi_q(&self) -> Q {
        self.hi.to_q()
    }

    pub fn mid_f64(&self) -> f64 {
        0.5 * (self.lo_f64() + self.hi_f64())
    }

    pub fn width_f64(&self) -> f64 {
        self.hi_f64() - self.lo_f64()
    }

    /// Strictly positive for certain.
    pub fn is_pos(&self) -> bool {
        self.lo.is_positive()
    }

    /// Strictly negative for certain.
    pub fn is_neg(&self) -> bool {
        self.hi.is_negative()
    }

    /// Interval hull.
    pub fn hull(&self, o: &Self) -> Self {
        let lo = if self.lo.cmp_value(&o.lo) == Ordering::Less { self.lo.clone() } else { o.lo.clone() };
        let hi = if self.hi.cmp_value(&o.hi) == Ordering::Greater { self.hi.clone() } else { o.hi.clone() };
        Interval { lo, hi, prec: self.prec.max(o.prec) }
    }

    pub fn to_fast(&self) -> FastInterval {
        let lo = self.lo.to_f64();
        let hi = self.hi.to_f64();
        FastInterval { lo: lo.next_down(), hi: hi.next_up() }
    }
}

/// Outcome of a certified strict comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Decision {
    Gt,
    Le,
    Undecided,
}

/// Compares two enclosures: `Gt` when `a.lo > b.hi`, `Le` when `a.hi <= b.lo`.
pub fn compare_intervals(a: &Interval, b: &Interval) -> Decision {
    if a.lo.cmp_value(&b.hi) == Ordering::Greater {
        Decision::Gt
    } else if a.hi.cmp_value(&b.lo) != Ordering::Greater {
        Decision::Le
    } else {
        Decision::Undecided
    }
}

/// Certified strict comparison `a > b`, re-evaluating both sides at each
/// precision of `schedule` until the enclosures separate.
pub fn certify_strict_gt<F>(mut eval: F, schedule: &[u32]) -> (Decision, Option<(Interval, Interval)>)
where
    F: FnMut(u32) -> (Interval, Interval),
{
    let mut last = None;
    for &p in schedule {
        let (a, b) = eval(p);
        let dec = compare_intervals(&a, &b);
        if dec != Decision::Undecided {
            return (dec, Some((a, b)));
        }
        last = Some((a, b));
    }
    (Decision::Undecided, last)
}

/// Interval on `f64` endpoints with outward rounding by one ulp per operation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FastInterval {
    pub lo: f64,
    pub hi: f64,
}

impl FastInterval {
    pub fn point(x: f64) -> Self {
        FastInterval { lo: x, hi: x }
    }

    pub fn new(lo: f64, hi: f64) -> Self {
        FastInterval { lo, hi }
    }

    /// Enclosure of a rational.
    pub fn from_q(x: &Q) -> Self {
        let v = super::rational::to_f64(x);
        if v.is_finite() && super::rational::from_f64_exact(v) == *x {
            return FastInterval { lo: v, hi: v };
        }
        // Conversions near the ends of the exponent range lose the error bound.
        const TINY: f64 = 1e-290;
        if v.is_infinite() || v.abs() < TINY {
            return match (x.is_positive(), v.is_infinite()) {
                (true, true) => FastInterval { lo: f64::MAX, hi: f64::INFINITY },
                (false, true) => FastInterval { lo: f64::NEG_INFINITY, hi: f64::MIN },
                (true, false) => FastInterval { lo: 0.0, hi: TINY },
                (false, false) => FastInterval { lo: -TINY, hi: 0.0 },
            };
        }
        let lo = v.next_down().next_down();
        let hi = v.next_up().next_up();
        FastInterval { lo, hi }
    }

    pub fn add(self, o: Self) -> Self {
        FastInterval { lo: (self.lo + o.lo).next_down(), hi: (self.hi + o.hi).next_up() }
    }

    pub fn sub(self, o: Self) -> Self {
        FastInterval { lo: (self.lo - o.hi).next_down(), hi: (self.hi - o.lo).next_up() }
    }

    pub fn neg(self) -> Self {
        FastInterval { lo: -self.hi, hi: -self.lo }
    }

    pub fn mul(self, o: Self) -> Self {
        let a = self.lo * o.lo;
        let b = self.lo * o.hi;
        let c = self.hi * o.lo;
        let d = self.hi * o.hi;
        FastInterval { lo: a.min(b).min(c).min(d).next_down(), hi: a.max(b).max(c).max(d).next_up() }
    }

    pub fn scale(self, k: f64) -> Self {
        self.mul(FastInterval::point(k))
    }

    pub fn square(self) -> Self {
        let s = self.mul(self);
        if self.lo <= 0.0 && self.hi >= 0.0 {
            FastInterval { lo: 0.0, hi: s.hi }
        } else {
            FastInterval { lo: s.lo.max(0.0), hi: s.hi }
        }
    }

    pub fn div(self, o: Self) -> Option<Self> {
        if o.lo <= 0.0 && o.hi >= 0.0 {
            return None;
        }
        let a = self.lo / o.lo;
        let b = self.lo / o.hi;
        let c = self.hi / o.lo;
        let d = self.hi / o.hi;
        Some(FastInterval { lo: a.min(b).min(c).min(d).next_down(), hi: a.max(b).max(c).max(d).next_up() })
    }

    pub fn sqrt(self) -> Self {
        let lo = self.lo.max(0.0).sqrt().next_down().max(0.0);
        let hi = self.hi.max(0.0).sqrt().next_up();
        FastInterval { lo, hi }
    }

    pub fn abs(self) -> Self {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            self.neg()
        } else {
            FastInterval { lo: 0.0, hi: (-self.lo).max(self.hi) }
        }
    }

    /// Intersection with `[lo, hi]`, for callers that know the true value lies there.
    pub fn clamp_to(self, lo: f64, hi: f64) -> Self {
        let a = self.lo.clamp(lo, hi);
        let b = self.hi.clamp(lo, hi);
        FastInterval { lo: a, hi: b.max(a) }
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn to_interval(&self, prec: u32) -> Interval {
        Interval::from_f64_bounds(self.lo, self.hi, prec.max(64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::{q, qf};

    #[test]
    fn trivial_decisions() {
        let two = Interval::point_int(2, 128);
        let one = Interval::point_int(1, 128);
        assert_eq!(compare_intervals(&two, &one), Decision::Gt);
        assert_eq!(compare_intervals(&one, &one), Decision::Le);
        let a = Interval::from_bounds_q(&qf(9, 10), &qf(11, 10), 128);
        let b = Interval::from_bounds_q(&qf(95, 100), &qf(105, 100), 128);
        assert_eq!(compare_intervals(&a, &b), Decision::Undecided);
        let (d, _) = certify_strict_gt(|_| (a.clone(), b.clone()), &default_schedule());
        assert_eq!(d, Decision::Undecided);
    }

    #[test]
    fn rational_enclosure_and_sqrt() {
        let third = Interval::point_q(&qf(1, 3), 64);
        assert!(third.contains_q(&qf(1, 3)));
        assert!(third.width_f64() < 1e-18);
        let s = Interval::point_int(2, 200).sqrt();
        let lo = s.lo_q();
        let hi = s.hi_q();
        assert!(&lo * &lo <= q(2) && &hi * &hi >= q(2));
    }

    #[test]
    fn division_encloses() {
        let a = Interval::point_int(1, 100);
        let b = Interval::point_int(3, 100);
        let c = a.div(&b).unwrap();
        assert!(c.contains_q(&qf(1, 3)));
        assert!(Interval::point_int(0, 64).div(&Interval::zero(64)).is_none());
    }

    #[test]
    fn fast_interval_encloses() {
        let x = FastInterval::from_q(&qf(1, 3));
        let y = x.mul(x).sub(FastInterval::point(1.0 / 9.0));
        assert!(y.lo <= 0.0 && y.hi >= 0.0);
    }
}
