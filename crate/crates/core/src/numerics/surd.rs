//! Exact numbers of the form `u + v*sqrt(s)` and products of several such
//! extensions.

use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use crate::numerics::rational::QStr;

use super::interval::{FastInterval, Interval};
use super::rational::{exact_sqrt, Q};

fn sign_q(x: &Q) -> Ordering {
    if x.is_positive() {
        Ordering::Greater
    } else if x.is_negative() {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

/// `u + v*sqrt(s)` with `s >= 0` rational.
#[serde_with::serde_as]
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurdScalar {
    #[serde_as(as = "QStr")]
    pub u: Q,
    #[serde_as(as = "QStr")]
    pub v: Q,
    #[serde_as(as = "QStr")]
    pub s: Q,
}

impl SurdScalar {
    pub fn new(u: Q, v: Q, s: Q) -> Self {
        assert!(!s.is_negative(), "negative radicand");
        let mut x = SurdScalar { u, v, s };
        x.fold_square();
        x
    }

    pub fn rational(u: Q) -> Self {
        SurdScalar { u, v: Q::zero(), s: Q::zero() }
    }

    fn fold_square(&mut self) {
        if self.v.is_zero() {
            self.s = Q::zero();
            return;
        }
        if let Some(r) = exact_sqrt(&self.s) {
            self.u = &self.u + &self.v * r;
            self.v = Q::zero();
            self.s = Q::zero();
        }
    }

    fn radicand_with(&self, o: &Self) -> Q {
        if self.v.is_zero() {
            o.s.clone()
        } else if o.v.is_zero() || self.s == o.s {
            self.s.clone()
        } else {
            panic!("surd arithmetic across different radicands")
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let s = self.radicand_with(o);
        SurdScalar::new(&self.u + &o.u, &self.v + &o.v, s)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let s = self.radicand_with(o);
        SurdScalar::new(&self.u - &o.u, &self.v - &o.v, s)
    }

    pub fn neg(&self) -> Self {
        SurdScalar { u: -&self.u, v: -&self.v, s: self.s.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let s = self.radicand_with(o);
        let u = &self.u * &o.u + &self.v * &o.v * &s;
        let v = &self.u * &o.v + &self.v * &o.u;
        SurdScalar::new(u, v, s)
    }

    pub fn mul_q(&self, k: &Q) -> Self {
        SurdScalar::new(&self.u * k, &self.v * k, self.s.clone())
    }

    pub fn add_q(&self, k: &Q) -> Self {
        SurdScalar::new(&self.u + k, self.v.clone(), self.s.clone())
    }

    /// Exact sign.
    pub fn sign(&self) -> Ordering {
        let su = sign_q(&self.u);
        let sv = sign_q(&self.v);
        if sv == Ordering::Equal || self.s.is_zero() {
            return su;
        }
        if su == Ordering::Equal || su == sv {
            return sv;
        }
        // opposite signs: compare u^2 with v^2 s
        let d = &self.u * &self.u - &self.v * &self.v * &self.s;
        match sign_q(&d) {
            Ordering::Equal => Ordering::Equal,
            Ordering::Greater => su,
            Ordering::Less => sv,
        }
    }

    pub fn cmp_value(&self, o: &Self) -> Ordering {
        self.sub(o).sign()
    }

    pub fn is_zero(&self) -> bool {
        self.sign() == Ordering::Equal
    }

    pub fn abs(&self) -> Self {
        if self.sign() == Ordering::Less {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// The unique integer `m` with `self - m` in `(-1/2, 1/2]`.
    pub fn nearest_int_half_up(&self) -> BigInt {
        let approx = self.to_f64();
        let mut m = BigInt::from((approx - 0.5).ceil() as i64);
        // adjust until self - m lies in (-1/2, 1/2]
        let half = Q::new(BigInt::one(), BigInt::from(2));
        loop {
            let e = self.add_q(&-Q::from_integer(m.clone()));
            if e.cmp_value(&SurdScalar::rational(half.clone())) == Ordering::Greater {
                m += 1;
            } else if e.cmp_value(&SurdScalar::rational(-half.clone())) != Ordering::Greater {
                m -= 1;
            } else {
                return m;
            }
        }
    }

    pub fn to_interval(&self, prec: u32) -> Interval {
        let u = Interval::point_q(&self.u, prec);
        if self.v.is_zero() {
            return u;
        }
        let r = Interval::point_q(&self.s, prec + 16).sqrt();
        u.add(&Interval::point_q(&self.v, prec).mul(&r))
    }

    pub fn to_fast(&self) -> FastInterval {
        let u = FastInterval::from_q(&self.u);
        if self.v.is_zero() {
            return u;
        }
        u.add(FastInterval::from_q(&self.v).mul(FastInterval::from_q(&self.s).sqrt()))
    }

    pub fn to_f64(&self) -> f64 {
        let u = super::rational::to_f64(&self.u);
        if self.v.is_zero() {
            return u;
        }
        u + super::rational::to_f64(&self.v) * super::rational::to_f64(&self.s).sqrt()
    }
}

/// Element of `Q(sqrt(s_1), ..., sqrt(s_m))`, stored as `2^m` rational
/// coefficients of the products `prod_{k in mask} sqrt(s_k)`.
///
/// The radicands need not be independent; every operation and the sign test
/// are valid for arbitrary nonnegative radicands.
#[derive(Clone, Debug)]
pub struct MultiSurd {
    pub radicands: Arc<Vec<Q>>,
    pub comps: Vec<Q>,
}

impl PartialEq for MultiSurd {
    fn eq(&self, o: &Self) -> bool {
        self.sub(o).sign() == Ordering::Equal
    }
}

fn ms_mul(a: &[Q], b: &[Q], rads: &[Q]) -> Vec<Q> {
    let n = a.len();
    let mut out = vec![Q::zero(); n];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if bj.is_zero() {
                continue;
            }
            let mut c = ai * bj;
            let both = i & j;
            for (k, r) in rads.iter().enumerate() {
                if both >> k & 1 == 1 {
                    c *= r;
                }
            }
            out[i ^ j] += c;
        }
    }
    out
}

fn ms_sign(c: &[Q], rads: &[Q]) -> Ordering {
    if rads.is_empty() {
        return sign_q(&c[0]);
    }
    let m = rads.len();
    let half = c.len() / 2;
    let (a, b) = c.split_at(half);
    let sub = &rads[..m - 1];
    let sa = ms_sign(a, sub);
    let sb = if rads[m - 1].is_zero() { Ordering::Equal } else { ms_sign(b, sub) };
    if sb == Ordering::Equal {
        return sa;
    }
    if sa == Ordering::Equal || sa == sb {
        return sb;
    }
    // A and B*sqrt(s) have opposite signs: compare A^2 with B^2 s.
    let a2 = ms_mul(a, a, sub);
    let b2 = ms_mul(b, b, sub);
    let s = &rads[m - 1];
    let diff: Vec<Q> = a2.iter().zip(b2.iter()).map(|(x, y)| x - y * s).collect();
    match ms_sign(&diff, sub) {
        Ordering::Equal => Ordering::Equal,
        Ordering::Greater => sa,
        Ordering::Less => sb,
    }
}

impl MultiSurd {
    pub fn zero(radicands: Arc<Vec<Q>>) -> Self {
        let n = 1usize << radicands.len();
        MultiSurd { radicands, comps: vec![Q::zero(); n] }
    }

    pub fn from_q(radicands: Arc<Vec<Q>>, x: Q) -> Self {
        let mut z = Self::zero(radicands);
        z.comps[0] = x;
        z
    }

    /// Embeds `u + v*sqrt(s_k)` where `s_k` is `radicands[k]`.
    pub fn from_surd(radicands: Arc<Vec<Q>>, k: usize, u: Q, v: Q) -> Self {
        let mut z = Self::zero(radicands);
        z.comps[0] = u;
        z.comps[1 << k] = v;
        z
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.radicands, o.radicands);
        MultiSurd {
            radicands: self.radicands.clone(),
            comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        debug_assert_eq!(self.radicands, o.radicands);
        MultiSurd {
            radicands: self.radicands.clone(),
            comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        MultiSurd { radicands: self.radicands.clone(), comps: self.comps.iter().map(|a| -a).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        MultiSurd { radicands: self.radicands.clone(), comps: ms_mul(&self.comps, &o.comps, &self.radicands) }
    }

    pub fn mul_q(&self, k: &Q) -> Self {
        MultiSurd { radicands: self.radicands.clone(), comps: self.comps.iter().map(|a| a * k).collect() }
    }

    pub fn sign(&self) -> Ordering {
        let e = self.to_fast();
        if e.lo > 0.0 {
            Ordering::Greater
        } else if e.hi < 0.0 {
            Ordering::Less
        } else {
            ms_sign(&self.comps, &self.radicands)
        }
    }

    /// Certified `f64` enclosure.
    pub fn to_fast(&self) -> FastInterval {
        let roots: Vec<FastInterval> = self.radicands.iter().map(|s| FastInterval::from_q(s).sqrt()).collect();
        let mut acc = FastInterval::point(0.0);
        for (mask, c) in self.comps.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut t = FastInterval::from_q(c);
            for (k, r) in roots.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    t = t.mul(*r);
                }
            }
            acc = acc.add(t);
        }
        acc
    }

    pub fn abs(&self) -> Self {
        if self.sign() == Ordering::Less {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign() == Ordering::Equal
    }

    pub fn to_interval(&self, prec: u32) -> Interval {
        let roots: Vec<Interval> =
            self.radicands.iter().map(|s| Interval::point_q(s, prec + 16).sqrt()).collect();
        let mut acc = Interval::zero(prec);
        for (mask, c) in self.comps.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut t = Interval::point_q(c, prec);
            for (k, r) in roots.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    t = t.mul(r);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        let roots: Vec<f64> = self.radicands.iter().map(|s| super::rational::to_f64(s).sqrt()).collect();
        let mut acc = 0.0;
        for (mask, c) in self.comps.iter().enumerate() {
            let mut t = super::rational::to_f64(c);
            for (k, r) in roots.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    t *= r;
                }
            }
            acc += t;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::{q, qf};

    #[test]
    fn surd_sign_cases() {
        // 1 - sqrt(2) < 0
        assert_eq!(SurdScalar::new(q(1), q(-1), q(2)).sign(), Ordering::Less);
        // 3/2 - sqrt(2) > 0
        assert_eq!(SurdScalar::new(qf(3, 2), q(-1), q(2)).sign(), Ordering::Greater);
        // 2 - sqrt(4) folds to 0
        assert!(SurdScalar::new(q(2), q(-1), q(4)).is_zero());
    }

    #[test]
    fn nearest_int_rounding() {
        let x = SurdScalar::new(q(0), q(1), q(2)); // 1.414..
        assert_eq!(x.nearest_int_half_up(), BigInt::from(1));
        let h = SurdScalar::rational(qf(1, 2));
        assert_eq!(h.nearest_int_half_up(), BigInt::from(0));
        let mh = SurdScalar::rational(qf(-1, 2));
        assert_eq!(mh.nearest_int_half_up(), BigInt::from(-1));
    }

    #[test]
    fn multisurd_dependent_radicands() {
        // sqrt(2)*sqrt(8) - 4 == 0 even though the radicands are dependent
        let rads = Arc::new(vec![q(2), q(8)]);
        let a = MultiSurd::from_surd(rads.clone(), 0, q(0), q(1));
        let b = MultiSurd::from_surd(rads.clone(), 1, q(0), q(1));
        let p = a.mul(&b).sub(&MultiSurd::from_q(rads.clone(), q(4)));
        assert!(p.is_zero());
        // sqrt(2) + sqrt(3) - sqrt(10) < 0 (3.146 < 3.162)
        let rads = Arc::new(vec![q(2), q(3), q(10)]);
        let mut z = MultiSurd::zero(rads);
        z.comps[1] = q(1);
        z.comps[2] = q(1);
        z.comps[4] = q(-1);
        assert_eq!(z.sign(), Ordering::Less);
    }
}
