//! Univariate pulse polynomials peaked at 0.
//!
//! Four families: a one-sided kernel on `[0, b0]` (`F0`), a two-sided kernel on
//! `[-a, b]` (`FPULSE`), a zero-product family for integer grids (`FK`), and
//! linear-programming fits on explicit point sets (`LP`).

mod check;
mod fk;
pub mod kernel;
mod lp;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_with::serde_as;

use crate::error::{Error, Result};
use crate::numerics::poly::{chebyshev_to_monomial, eval_chebyshev, eval_poly};
use crate::numerics::rational::{exact_sqrt, to_f64, QStr};
use crate::numerics::{FastInterval, Scalar, Q};
use kernel::{order_width, w4_pair, w_enclose, w_exact, w_rational};

pub use check::{check_pulse_properties, CertOptions, PropertyCheck, PulseReport};
pub use fk::{build_fk, fk_exact_check, fk_zeros, FkCheck};
pub use lp::{lp_candidate, lp_peak_polynomial, lp_solve, LpFit};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    F0,
    #[serde(rename = "FPULSE")]
    Fpulse,
    #[serde(rename = "FK")]
    Fk,
    #[serde(rename = "LP")]
    Lp,
}

#[serde_as]
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PulseParams {
    Window {
        #[serde_as(as = "QStr")]
        b0: Q,
        #[serde_as(as = "QStr")]
        m0: Q,
    },
    Interval {
        #[serde_as(as = "QStr")]
        a: Q,
        #[serde_as(as = "QStr")]
        b: Q,
        #[serde_as(as = "QStr")]
        m: Q,
    },
    Grid {
        n: u64,
    },
    Points {
        count: usize,
        #[serde_as(as = "QStr")]
        slack: Q,
    },
}

/// How the polynomial is represented.
#[serde_as]
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PulseForm {
    /// `Σ c_j x^j`.
    Coefficients {
        #[serde_as(as = "Vec<QStr>")]
        coefficients: Vec<Q>,
    },
    /// `Σ c_j T_j(t)` with `t = (2x - lo - hi)/(hi - lo)`.
    Chebyshev {
        #[serde_as(as = "Vec<QStr>")]
        coefficients: Vec<Q>,
        #[serde_as(as = "QStr")]
        lo: Q,
        #[serde_as(as = "QStr")]
        hi: Q,
    },
    /// `Π (1 - x/z_j)`.
    Zeros { zeros: Vec<u64> },
    /// `m0 · (W_M(1 - 2x/b0) / (2M+1))^4`.
    OneSided { order: u32 },
    /// `m · K(y) / K(y0)` with `y = (2x - b + a)/(a + b)`, `y0 = y(0)` and
    /// `K(y) = (W_M(y y0 + s)/(2M+1))^4 + (W_M(y y0 - s)/(2M+1))^4`,
    /// `s = √((1 - y²)(1 - y0²))`.
    TwoSided { order: u32 },
}

#[serde_as]
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PulsePolynomial {
    pub family: Family,
    pub params: PulseParams,
    pub form: PulseForm,
    pub degree: usize,
    /// Prescribed value at 0.
    #[serde_as(as = "QStr")]
    pub peak: Q,
    /// Set when the closed-form constructor was replaced by a fallback.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fallback: Option<String>,
}

impl PulsePolynomial {
    /// The constant polynomial `c`.
    pub fn constant(family: Family, params: PulseParams, c: Q) -> Self {
        PulsePolynomial {
            family,
            params,
            form: PulseForm::Coefficients { coefficients: vec![c.clone()] },
            degree: 0,
            peak: c,
            fallback: None,
        }
    }

    fn window(&self) -> (Q, Q) {
        match &self.params {
            PulseParams::Window { b0, m0 } => (b0.clone(), m0.clone()),
            _ => panic!("one-sided form requires window params"),
        }
    }

    fn interval(&self) -> (Q, Q, Q) {
        match &self.params {
            PulseParams::Interval { a, b, m } => (a.clone(), b.clone(), m.clone()),
            _ => panic!("two-sided form requires interval params"),
        }
    }

    /// Exact (or naive-enclosure, for interval scalars) evaluation.
    pub fn eval<S: Scalar>(&self, x: &S) -> S {
        match &self.form {
            PulseForm::Coefficients { coefficients } => eval_poly(coefficients, x),
            PulseForm::Chebyshev { coefficients, lo, hi } => {
                let (alpha, beta) = cheb_affine(lo, hi);
                let t = x.mul(&x.lift(&alpha)).add(&x.lift(&beta));
                eval_chebyshev(coefficients, &t)
            }
            PulseForm::Zeros { zeros } => {
                let one = x.lift(&Q::one());
                zeros.iter().fold(one.clone(), |acc, &z| {
                    let inv = Q::new(BigInt::one(), BigInt::from(z));
                    acc.mul(&one.sub(&x.mul(&x.lift(&inv))))
                })
            }
            PulseForm::OneSided { order } => {
                let (b0, m0) = self.window();
                let y = x.lift(&Q::one()).sub(&x.mul(&x.lift(&(Q::from_integer(2.into()) / &b0))));
                let w = w_exact(&y, *order);
                let w2 = w.mul(&w);
                w2.mul(&w2).mul(&x.lift(&(m0 / width_pow4(*order))))
            }
            PulseForm::TwoSided { order } => {
                let (a, b, m) = self.interval();
                let (y0, alpha, beta) = two_sided_affine(&a, &b);
                let y = x.mul(&x.lift(&alpha)).add(&x.lift(&beta));
                let c = y.mul(&x.lift(&y0));
                let one = x.lift(&Q::one());
                let r = one.sub(&y.mul(&y)).mul(&x.lift(&(Q::one() - &y0 * &y0)));
                let pair = w4_pair(&c, &r, *order);
                pair.mul(&x.lift(&(m / k_at_peak(&y0, *order) / width_pow4(*order))))
            }
        }
    }

    /// Exact rational evaluation, with shortcuts for the kernel forms.
    pub fn eval_q(&self, x: &Q) -> Q {
        // W_M(1) = 2M + 1, so both kernels equal their peak parameter at 0.
        if x.is_zero() {
            match (&self.form, &self.params) {
                (PulseForm::OneSided { .. }, PulseParams::Window { m0, .. }) => return m0.clone(),
                (PulseForm::TwoSided { .. }, PulseParams::Interval { m, .. }) => return m.clone(),
                _ => {}
            }
        }
        match &self.form {
            PulseForm::OneSided { order } => {
                let (b0, m0) = self.window();
                let y = Q::one() - x * Q::from_integer(2.into()) / b0;
                let w = w_rational(&y, *order);
                let w2 = &w * &w;
                m0 * &w2 * &w2 / width_pow4(*order)
            }
            PulseForm::TwoSided { order } => {
                let (a, b, m) = self.interval();
                let (y0, alpha, beta) = two_sided_affine(&a, &b);
                let y = x * &alpha + beta;
                let c = &y * &y0;
                let r = (Q::one() - &y * &y) * (Q::one() - &y0 * &y0);
                match exact_sqrt(&r) {
                    Some(t) => {
                        let p = w_rational(&(&c + &t), *order);
                        let q = w_rational(&(&c - &t), *order);
                        let (p2, q2) = (&p * &p, &q * &q);
                        (&p2 * &p2 + &q2 * &q2) * m / k_at_peak(&y0, *order) / width_pow4(*order)
                    }
                    None => self.eval(x),
                }
            }
            _ => self.eval(x),
        }
    }

    /// Certified enclosure of `f(x)` for every real `x` in `x`.
    pub fn enclose(&self, x: FastInterval) -> FastInterval {
        self.evaluator().enclose(x)
    }

    /// Precomputed `f64` constants for bulk enclosure.
    pub fn evaluator(&self) -> PulseEval {
        let kind = match &self.form {
            PulseForm::Coefficients { coefficients } => {
                EvalKind::Coefficients(coefficients.iter().map(FastInterval::from_q).collect())
            }
            PulseForm::Chebyshev { coefficients, lo, hi } => {
                let (alpha, beta) = cheb_affine(lo, hi);
                EvalKind::Chebyshev {
                    coefficients: coefficients.iter().map(FastInterval::from_q).collect(),
                    alpha: FastInterval::from_q(&alpha),
                    beta: FastInterval::from_q(&beta),
                }
            }
            PulseForm::Zeros { zeros } => EvalKind::Zeros(zeros.iter().map(|&z| z as f64).collect()),
            PulseForm::OneSided { order } => {
                let (b0, m0) = self.window();
                let n = order_width(*order) as f64;
                EvalKind::OneSided {
                    order: *order,
                    b0: FastInterval::from_q(&b0),
                    m0: FastInterval::from_q(&m0),
                    n,
                }
            }
            PulseForm::TwoSided { order } => {
                let (a, b, m) = self.interval();
                let (y0, alpha, beta) = two_sided_affine(&a, &b);
                let n = order_width(*order) as f64;
                let y0f = FastInterval::from_q(&y0);
                let z0 = y0f.square().scale(2.0).sub(FastInterval::point(1.0));
                let w0 = w_enclose(z0, *order).scale(1.0 / n);
                let w0 = w0.square().square();
                EvalKind::TwoSided {
                    order: *order,
                    a: FastInterval::from_q(&a),
                    b: FastInterval::from_q(&b),
                    alpha: FastInterval::from_q(&alpha),
                    beta: FastInterval::from_q(&beta),
                    y0: y0f,
                    one_minus_y0_sq: FastInterval::from_q(&(Q::one() - &y0 * &y0)),
                    m_over_k0: FastInterval::from_q(&m).div(w0.add(FastInterval::point(1.0))).expect("K(y0) >= 1"),
                    n,
                    exact: self.clone(),
                }
            }
        };
        PulseEval { kind }
    }

    /// Monomial coefficients, expanded exactly. Expensive for the kernel forms.
    pub fn coefficients(&self) -> Vec<Q> {
        match &self.form {
            PulseForm::Coefficients { coefficients } => coefficients.clone(),
            PulseForm::Chebyshev { coefficients, lo, hi } => {
                let (alpha, beta) = cheb_affine(lo, hi);
                chebyshev_to_monomial(coefficients, &alpha, &beta)
            }
            _ => interpolate_coefficients(self),
        }
    }
}

/// Affine map `x ↦ αx + β` from `[lo, hi]` onto `[-1, 1]`.
pub fn cheb_affine(lo: &Q, hi: &Q) -> (Q, Q) {
    let w = hi - lo;
    if w.is_zero() {
        return (Q::zero(), Q::zero());
    }
    let two = Q::from_integer(2.into());
    (&two / &w, -(hi + lo) / w)
}

/// `(y0, α, β)` for the two-sided kernel: `y = αx + β` sends `[-a, b]` to `[-1, 1]`.
fn two_sided_affine(a: &Q, b: &Q) -> (Q, Q, Q) {
    let s = a + b;
    let y0 = (a - b) / &s;
    let alpha = Q::from_integer(2.into()) / &s;
    (y0.clone(), alpha, y0)
}

fn width_pow4(order: u32) -> Q {
    Q::from_integer(BigInt::from(order_width(order)).pow(4))
}

/// `K(y0) = 1 + (W_M(2y0² - 1)/(2M+1))^4`.
fn k_at_peak(y0: &Q, order: u32) -> Q {
    let z = Q::from_integer(2.into()) * y0 * y0 - Q::one();
    let w = w_rational(&z, order) / Q::from_integer(BigInt::from(order_width(order)));
    let w2 = &w * &w;
    Q::one() + &w2 * &w2
}

/// Newton interpolation through `degree + 1` integer nodes.
fn interpolate_coefficients(f: &PulsePolynomial) -> Vec<Q> {
    let n = f.degree + 1;
    let xs: Vec<Q> = (0..n as i64).map(|v| Q::from_integer(BigInt::from(v))).collect();
    let mut dd: Vec<Q> = xs.iter().map(|x| f.eval_q(x)).collect();
    for j in 1..n {
        for i in (j..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    let mut out = vec![Q::zero(); n];
    for i in (0..n).rev() {
        // out = out * (x - xs[i]) + dd[i]
        let mut next = vec![Q::zero(); n];
        for k in 0..n {
            if out[k].is_zero() {
                continue;
            }
            if k + 1 < n {
                next[k + 1] += &out[k];
            }
            next[k] -= &out[k] * &xs[i];
        }
        next[0] += &dd[i];
        out = next;
    }
    while out.len() > 1 && out.last().map(|v| v.is_zero()).unwrap_or(false) {
        out.pop();
    }
    out
}

enum EvalKind {
    Coefficients(Vec<FastInterval>),
    Chebyshev { coefficients: Vec<FastInterval>, alpha: FastInterval, beta: FastInterval },
    Zeros(Vec<f64>),
    OneSided { order: u32, b0: FastInterval, m0: FastInterval, n: f64 },
    TwoSided {
        order: u32,
        a: FastInterval,
        b: FastInterval,
        alpha: FastInterval,
        beta: FastInterval,
        y0: FastInterval,
        one_minus_y0_sq: FastInterval,
        m_over_k0: FastInterval,
        n: f64,
        exact: PulsePolynomial,
    },
}

/// Bulk certified evaluator; see [`PulsePolynomial::evaluator`].
pub struct PulseEval {
    kind: EvalKind,
}

impl PulseEval {
    pub fn enclose(&self, x: FastInterval) -> FastInterval {
        match &self.kind {
            EvalKind::Coefficients(c) => {
                let mut acc = FastInterval::point(0.0);
                for cj in c.iter().rev() {
                    acc = acc.mul(x).add(*cj);
                }
                acc
            }
            EvalKind::Chebyshev { coefficients, alpha, beta } => {
                let t = x.mul(*alpha).add(*beta);
                clenshaw(coefficients, t)
            }
            EvalKind::Zeros(zeros) => {
                let one = FastInterval::point(1.0);
                zeros.iter().fold(one, |acc, &z| {
                    let zf = FastInterval::point(z);
                    acc.mul(zf.sub(x).div(zf).expect("zeros are positive"))
                })
            }
            EvalKind::OneSided { order, b0, m0, n } => {
                let mut y = FastInterval::point(1.0).sub(x.scale(2.0).div(*b0).expect("b0 > 0"));
                if x.lo >= 0.0 && x.hi <= b0.lo {
                    y = y.clamp_to(-1.0, 1.0);
                }
                let w = if y.lo >= -1.0 && y.hi <= 1.0 {
                    w_enclose(y, *order)
                } else {
                    w_exact(&y, *order)
                };
                let w4 = w.scale(1.0 / n).square().square();
                FastInterval::mul(*m0, w4)
            }
            EvalKind::TwoSided { order, a, b, alpha, beta, y0, one_minus_y0_sq, m_over_k0, n, exact } => {
                let mut y = x.mul(*alpha).add(*beta);
                if x.lo >= -a.lo && x.hi <= b.lo {
                    y = y.clamp_to(-1.0, 1.0);
                }
                if y.lo < -1.0 || y.hi > 1.0 {
                    // Outside the kernel's window: naive interval evaluation.
                    return exact.eval(&x);
                }
                let c = y.mul(*y0);
                let s = FastInterval::point(1.0).sub(y.square()).mul(*one_minus_y0_sq).sqrt();
                let wp = w_enclose(c.add(s), *order).scale(1.0 / n).square().square();
                let wm = w_enclose(c.sub(s), *order).scale(1.0 / n).square().square();
                wp.add(wm).mul(*m_over_k0)
            }
        }
    }
}

fn clenshaw(c: &[FastInterval], t: FastInterval) -> FastInterval {
    if c.is_empty() {
        return FastInterval::point(0.0);
    }
    let two_t = t.scale(2.0);
    let mut b1 = FastInterval::point(0.0);
    let mut b2 = FastInterval::point(0.0);
    for cj in c.iter().skip(1).rev() {
        let b0 = two_t.mul(b1).sub(b2).add(*cj);
        b2 = b1;
        b1 = b0;
    }
    t.mul(b1).sub(b2).add(c[0])
}

/// Validates that a polynomial's peak is reproduced exactly at 0.
pub fn peak_matches(f: &PulsePolynomial) -> bool {
    f.eval_q(&Q::zero()) == f.peak
}

/// Smallest multiple of `10^-6` that is `>= v`.
pub fn round_up_micro(v: &Q) -> Q {
    let scale = Q::from_integer(BigInt::from(1_000_000));
    let scaled = v * &scale;
    let c = scaled.ceil();
    c / scale
}

/// `F0`: one-sided kernel with peak `m0` on `[0, b0]`.
///
/// With `N = 2M + 1` and `N^4 >= m0·b0²`, the bound `|W_M(cos θ)| <= 1/sin(θ/2)`
/// at `sin²(θ/2) = x/b0` gives `|f(x)| <= min(m0, 1/x²)` on the whole window.
pub fn build_f0(b0: &Q, m0: &Q) -> Result<PulsePolynomial> {
    if !b0.is_positive() || !m0.is_positive() {
        return Err(Error::Invalid("b0 and m0 must be positive".into()));
    }
    let target = m0 * b0 * b0;
    let est = to_f64(&target).powf(0.25);
    let mut n = (est.floor() as u64).max(1);
    if n % 2 == 0 {
        n -= 1;
    }
    while Q::from_integer(BigInt::from(n).pow(4)) < target {
        n += 2;
    }
    let order = ((n - 1) / 2) as u32;
    Ok(PulsePolynomial {
        family: Family::F0,
        params: PulseParams::Window { b0: b0.clone(), m0: m0.clone() },
        form: PulseForm::OneSided { order },
        degree: 4 * order as usize,
        peak: m0.clone(),
        fallback: None,
    })
}

/// `FPULSE` with an explicit kernel order (no certification).
pub fn fpulse_with_order(a: &Q, b: &Q, m: &Q, order: u32) -> PulsePolynomial {
    PulsePolynomial {
        family: Family::Fpulse,
        params: PulseParams::Interval { a: a.clone(), b: b.clone(), m: m.clone() },
        form: PulseForm::TwoSided { order },
        degree: 4 * order as usize,
        peak: m.clone(),
        fallback: None,
    }
}

/// `FPULSE`: two-sided kernel with peak `m` on `[-a, b]`. The kernel order is
/// located by geometric growth from a small start followed by bisection on the
/// coarse grid (integers plus a few offsets), then confirmed on the full grid
/// described by `opts`.
pub fn build_fpulse(a: &Q, b: &Q, m: &Q, opts: &CertOptions) -> Result<PulsePolynomial> {
    let one = Q::one();
    if a < &one || b < &one || m < &one {
        return Err(Error::Invalid("a, b, m must be at least 1".into()));
    }
    let est = 2.0 * (2.0 * to_f64(m) * to_f64(a) * to_f64(b)).sqrt();
    let limit = (8.0 * est) as u32 + 64;
    let coarse = CertOptions { offsets: opts.offsets.min(8), random_reals: 0, ..opts.clone() };
    let passes = |order: u32, o: &CertOptions| check::envelope_passes(&fpulse_with_order(a, b, m, order), o);
    let mut hi = ((est / 16.0) as u32).max(1);
    let mut lo = 0;
    while !passes(hi, &coarse) {
        lo = hi;
        hi = hi + hi / 4 + 1;
        if hi > limit {
            return Err(Error::Construction {
                step: "build_fpulse".into(),
                detail: format!("no kernel order up to {limit}"),
            });
        }
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if passes(mid, &coarse) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut order = hi;
    while order <= limit {
        if passes(order, opts) {
            return Ok(fpulse_with_order(a, b, m, order));
        }
        order += order / 32 + 1;
    }
    Err(Error::Construction { step: "build_fpulse".into(), detail: format!("full grid failed up to order {limit}") })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::{q, qf};

    #[test]
    fn f0_peak_and_envelope_on_small_window() {
        let f = build_f0(&q(50), &qf(1053, 10)).unwrap();
        assert!(peak_matches(&f));
        for x in 1..=50 {
            let v = f.eval_q(&q(x)).abs();
            assert!(v <= Q::new(1.into(), (x * x).into()), "x={x}");
        }
        let e = f.enclose(FastInterval::point(7.0));
        let exact = to_f64(&f.eval_q(&q(7)));
        assert!(e.lo <= exact && exact <= e.hi);
    }

    #[test]
    fn two_sided_exact_paths_agree() {
        let f = fpulse_with_order(&q(3), &q(11), &q(2), 6);
        assert!(peak_matches(&f));
        // y = 0 at x = 4: s = √(1 - y0²) is irrational, so eval_q takes the generic path.
        for x in [q(1), q(4), qf(-5, 2), q(11)] {
            let v = f.eval_q(&x);
            let e = f.enclose(FastInterval::from_q(&x));
            let vf = to_f64(&v);
            assert!(e.lo <= vf && vf <= e.hi, "x={x} v={vf} e={e:?}");
        }
    }

    #[test]
    fn kernel_peaks_match_generic_evaluation() {
        let f = fpulse_with_order(&q(3), &q(11), &q(2), 7);
        assert_eq!(f.eval(&q(0)), q(2));
        let g = build_f0(&q(40), &qf(7, 2)).unwrap();
        assert_eq!(g.eval(&q(0)), qf(7, 2));
    }

    #[test]
    fn coefficients_reproduce_values() {
        let f = fpulse_with_order(&q(2), &q(5), &q(3), 2);
        let c = f.coefficients();
        assert_eq!(c.len() - 1, f.degree);
        for x in [qf(1, 3), q(-2), q(4)] {
            assert_eq!(eval_poly(&c, &x), f.eval_q(&x));
        }
    }

    #[test]
    fn serialization_round_trip() {
        let f = build_f0(&q(100), &q(3)).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.contains("\"b0\":\"100/1\""));
        let g: PulsePolynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
    }
}
