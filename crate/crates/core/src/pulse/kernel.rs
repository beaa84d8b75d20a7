//! Fourth-power Dirichlet kernels.
//!
//! `W_M` is defined by `W_0 = 1`, `W_1 = 2y + 1`, `W_{k+1} = 2y W_k - W_{k-1}`,
//! so that `W_M(cos θ) = sin((2M+1)θ/2) / sin(θ/2)`. On `[-1, 1]` it is bounded
//! by `2M + 1` and by `1/|sin(θ/2)|`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::numerics::{FastInterval, Scalar, Q};

const UNIT_ROUNDOFF: f64 = 1.0 / 9_007_199_254_740_992.0;

/// Plain `f64` recurrence.
pub fn w_f64(y: f64, m: u32) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let two_y = 2.0 * y;
    let mut prev = 1.0;
    let mut cur = two_y + 1.0;
    for _ in 1..m {
        let next = two_y * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Rounding-error bound for [`w_f64`] at a point of `[-1, 1]`.
///
/// Each step injects at most `u(6k+8)` and injections propagate through
/// Chebyshev polynomials of the second kind (bounded by `t+1`), giving
/// `u·M(M+1)(M+3)`; the bound below doubles that.
pub fn w_rounding_bound(m: u32) -> f64 {
    let m = m as f64;
    (2.0 * UNIT_ROUNDOFF * (m + 1.0) * (m + 1.0) * (m + 3.0)).next_up()
}

/// Certified enclosure of `W_M` over `z ∩ [-1, 1]`. The caller guarantees the
/// true argument lies in `[-1, 1]`.
pub fn w_enclose(z: FastInterval, m: u32) -> FastInterval {
    let lo = z.lo.max(-1.0);
    let hi = z.hi.min(1.0);
    let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, hi) };
    let mid = (0.5 * (lo + hi)).clamp(-1.0, 1.0);
    let radius = (hi - mid).max(mid - lo).max(0.0).next_up();
    let mf = m as f64;
    // Markov: |W'| <= M^2 max|W| = M^2 (2M+1) on [-1, 1].
    let lipschitz = mf * mf * (2.0 * mf + 1.0);
    let err = (w_rounding_bound(m) + (lipschitz * radius).next_up()).next_up();
    let w = w_f64(mid, m);
    FastInterval::new((w - err).next_down(), (w + err).next_up())
}

/// Exact recurrence over any scalar ring.
pub fn w_exact<S: Scalar>(y: &S, m: u32) -> S {
    let one = y.lift(&Q::one());
    if m == 0 {
        return one;
    }
    let two_y = y.add(y);
    let mut prev = one.clone();
    let mut cur = two_y.add(&one);
    for _ in 1..m {
        let next = two_y.mul(&cur).sub(&prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// `W_M(p/q)` with an integer recurrence on `V_k = q^k W_k`, avoiding gcds.
pub fn w_rational(y: &Q, m: u32) -> Q {
    let p = y.numer().clone();
    let q = y.denom().clone();
    if m == 0 {
        return Q::one();
    }
    let q2 = &q * &q;
    let two_p: BigInt = &p * 2;
    let mut prev = BigInt::one();
    let mut cur = &two_p + &q;
    for _ in 1..m {
        let next = &two_p * &cur - &q2 * &prev;
        prev = cur;
        cur = next;
    }
    Q::new(cur, num_traits::pow(q, m as usize))
}

/// `A + B·t` with `t² = r`, for evaluating at `c ± √r` without leaving `S`.
#[derive(Clone)]
struct Adjoined<S: Scalar> {
    a: S,
    b: S,
    r: S,
}

impl<S: Scalar> Adjoined<S> {
    fn mul(&self, o: &Self) -> Self {
        Adjoined {
            a: self.a.mul(&o.a).add(&self.b.mul(&o.b).mul(&self.r)),
            b: self.a.mul(&o.b).add(&self.b.mul(&o.a)),
            r: self.r.clone(),
        }
    }
    fn sub(&self, o: &Self) -> Self {
        Adjoined { a: self.a.sub(&o.a), b: self.b.sub(&o.b), r: self.r.clone() }
    }
    fn add_plain(&self, c: &S) -> Self {
        Adjoined { a: self.a.add(c), b: self.b.clone(), r: self.r.clone() }
    }
}

/// `W(c + t)^4 + W(c - t)^4` with `t² = r`, exactly in `S`.
pub fn w4_pair<S: Scalar>(c: &S, r: &S, m: u32) -> S {
    let zero = c.lift(&Q::zero());
    let one = c.lift(&Q::one());
    let (p, qq) = if m == 0 {
        (one, zero)
    } else {
        let two = Adjoined { a: c.add(c), b: one.add(&one), r: r.clone() };
        let mut prev = Adjoined { a: one.clone(), b: zero.clone(), r: r.clone() };
        let mut cur = two.add_plain(&one);
        for _ in 1..m {
            let next = two.mul(&cur).sub(&prev);
            prev = cur;
            cur = next;
        }
        (cur.a, cur.b)
    };
    // (P + Q t)^4 + (P - Q t)^4 = 2 (P^4 + 6 P^2 Q^2 r + Q^4 r^2)
    let p2 = p.mul(&p);
    let q2r = qq.mul(&qq).mul(r);
    let six = c.lift(&Q::from_integer(6.into()));
    let two = c.lift(&Q::from_integer(2.into()));
    two.mul(&p2.mul(&p2).add(&six.mul(&p2).mul(&q2r)).add(&q2r.mul(&q2r)))
}

/// Odd `N = 2M + 1` from `M`.
pub fn order_width(m: u32) -> u64 {
    2 * m as u64 + 1
}
