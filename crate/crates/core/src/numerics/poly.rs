//! Polynomial evaluation over every scalar kind used in the crate.

use super::interval::{FastInterval, Interval};
use super::rational::Q;
use super::surd::{MultiSurd, SurdScalar};
use num_traits::{One, Zero};

/// Minimal ring interface needed for Horner and Clenshaw evaluation.
/// `lift` embeds a rational into the same ring (and precision) as `self`.
pub trait Scalar: Clone {
    fn lift(&self, c: &Q) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
}

impl Scalar for Q {
    fn lift(&self, c: &Q) -> Self {
        c.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
}

impl Scalar for SurdScalar {
    fn lift(&self, c: &Q) -> Self {
        SurdScalar::rational(c.clone())
    }
    fn add(&self, o: &Self) -> Self {
        SurdScalar::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        SurdScalar::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        SurdScalar::mul(self, o)
    }
}

impl Scalar for MultiSurd {
    fn lift(&self, c: &Q) -> Self {
        MultiSurd::from_q(self.radicands.clone(), c.clone())
    }
    fn add(&self, o: &Self) -> Self {
        MultiSurd::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        MultiSurd::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        MultiSurd::mul(self, o)
    }
}

impl Scalar for Interval {
    fn lift(&self, c: &Q) -> Self {
        Interval::point_q(c, self.prec)
    }
    fn add(&self, o: &Self) -> Self {
        Interval::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Interval::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Interval::mul(self, o)
    }
}

impl Scalar for FastInterval {
    fn lift(&self, c: &Q) -> Self {
        FastInterval::from_q(c)
    }
    fn add(&self, o: &Self) -> Self {
        FastInterval::add(*self, *o)
    }
    fn sub(&self, o: &Self) -> Self {
        FastInterval::sub(*self, *o)
    }
    fn mul(&self, o: &Self) -> Self {
        FastInterval::mul(*self, *o)
    }
}

/// Horner evaluation of `sum_i f[i] x^i`.
pub fn eval_poly<S: Scalar>(f: &[Q], x: &S) -> S {
    let mut acc = x.lift(&Q::zero());
    for c in f.iter().rev() {
        acc = acc.mul(x).add(&x.lift(c));
    }
    acc
}

/// Clenshaw evaluation of `sum_j c[j] T_j(t)`.
pub fn eval_chebyshev<S: Scalar>(c: &[Q], t: &S) -> S {
    let zero = t.lift(&Q::zero());
    if c.is_empty() {
        return zero;
    }
    let two_t = t.add(t);
    let mut b1 = zero.clone();
    let mut b2 = zero;
    for cj in c.iter().skip(1).rev() {
        let b0 = two_t.mul(&b1).sub(&b2).add(&t.lift(cj));
        b2 = b1;
        b1 = b0;
    }
    t.mul(&b1).sub(&b2).add(&t.lift(&c[0]))
}

/// Monomial coefficients of `sum_j c[j] T_j(t)` where `t = alpha*x + beta`.
pub fn chebyshev_to_monomial(c: &[Q], alpha: &Q, beta: &Q) -> Vec<Q> {
    let n = c.len();
    if n == 0 {
        return vec![Q::zero()];
    }
    // T_j as polynomials in x via the recurrence, accumulated on the fly
    let t1 = vec![beta.clone(), alpha.clone()];
    let mut out = vec![Q::zero(); n];
    let mut prev: Vec<Q> = vec![Q::one()];
    let mut cur: Vec<Q> = t1.clone();
    out[0] += &c[0];
    if n > 1 {
        for (k, v) in cur.iter().enumerate() {
            out[k] += &c[1] * v;
        }
    }
    for cj in c.iter().skip(2) {
        // next = 2 t cur - prev
        let mut next = vec![Q::zero(); cur.len() + 1];
        for (k, v) in cur.iter().enumerate() {
            let tv = v * Q::from_integer(2.into());
            next[k] += &tv * beta;
            next[k + 1] += &tv * alpha;
        }
        for (k, v) in prev.iter().enumerate() {
            next[k] -= v;
        }
        for (k, v) in next.iter().enumerate() {
            out[k] += cj * v;
        }
        prev = cur;
        cur = next;
    }
    while out.len() > 1 && out.last().map(|v| v.is_zero()).unwrap_or(false) {
        out.pop();
    }
    out
}

/// Degree of a coefficient list after trimming trailing zeros.
pub fn degree(f: &[Q]) -> usize {
    let mut d = f.len().saturating_sub(1);
    while d > 0 && f[d].is_zero() {
        d -= 1;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::{q, qf};

    #[test]
    fn horner_examples() {
        assert_eq!(eval_poly(&[q(1)], &q(17)), q(1));
        assert_eq!(eval_poly(&[q(0), q(1)], &qf(3, 2)), qf(3, 2));
        // (1+sqrt2)^2 - 1 = 2 + 2 sqrt2
        let x = SurdScalar::new(q(1), q(1), q(2));
        let v = eval_poly(&[q(-1), q(0), q(1)], &x);
        assert_eq!(v, SurdScalar::new(q(2), q(2), q(2)));
    }

    #[test]
    fn clenshaw_matches_monomial() {
        let c = vec![q(1), qf(1, 2), q(-3), qf(2, 7)];
        let alpha = qf(2, 5);
        let beta = qf(-1, 3);
        let mono = chebyshev_to_monomial(&c, &alpha, &beta);
        for xv in [q(0), q(1), qf(-7, 3), q(5)] {
            let t = &alpha * &xv + &beta;
            assert_eq!(eval_chebyshev(&c, &t), eval_poly(&mono, &xv));
        }
    }
}
