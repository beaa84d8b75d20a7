//! Peak polynomials from linear programming: minimize `Σ w_x |f(x)|` subject
//! to `f(0) = 1`, with `f` in a Chebyshev basis on the hull of the points.

use std::collections::BTreeMap;

use microlp::{ComparisonOp, OptimizationDirection, Problem, Variable};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::{cheb_affine, Family, PulseForm, PulseParams, PulsePolynomial};
use crate::error::{Error, Result};
use crate::numerics::poly::eval_chebyshev;
use crate::numerics::rational::{format_q, from_f64_exact, to_f64};
use crate::numerics::Q;

#[derive(Clone, Debug)]
pub struct LpFit {
    /// Chebyshev coefficients on `[lo, hi]`.
    pub coefficients: Vec<f64>,
    pub objective: f64,
}

fn chebyshev_row(t: f64, degree: usize) -> Vec<f64> {
    let mut row = Vec::with_capacity(degree + 1);
    row.push(1.0);
    if degree >= 1 {
        row.push(t);
    }
    for j in 2..=degree {
        row.push(2.0 * t * row[j - 1] - row[j - 2]);
    }
    row
}

fn to_unit(x: f64, lo: f64, hi: f64) -> f64 {
    if hi == lo {
        0.0
    } else {
        ((2.0 * x - lo - hi) / (hi - lo)).clamp(-1.0, 1.0)
    }
}

/// Solves the weighted LP in floating point. `caps[i]` optionally bounds
/// `|f(points[i])|`.
pub fn lp_solve(
    points: &[f64],
    weights: &[f64],
    caps: Option<&[f64]>,
    degree: usize,
    lo: f64,
    hi: f64,
) -> Option<LpFit> {
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let coeffs: Vec<Variable> = (0..=degree).map(|_| p.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY))).collect();
    let peak = chebyshev_row(to_unit(0.0, lo, hi), degree);
    p.add_constraint(coeffs.iter().copied().zip(peak.iter().copied()), ComparisonOp::Eq, 1.0);
    for (i, (&x, &w)) in points.iter().zip(weights).enumerate() {
        let cap = caps.map(|c| c[i]).unwrap_or(f64::INFINITY);
        let s = p.add_var(w, (0.0, cap));
        let row = chebyshev_row(to_unit(x, lo, hi), degree);
        let terms: Vec<(Variable, f64)> = coeffs.iter().copied().zip(row.iter().copied()).collect();
        let mut upper = terms.clone();
        upper.push((s, -1.0));
        p.add_constraint(upper, ComparisonOp::Le, 0.0);
        let mut lower = terms;
        lower.push((s, 1.0));
        p.add_constraint(lower, ComparisonOp::Ge, 0.0);
    }
    let outcome = p.solve().ok()?;
    let sol = outcome.solution()?;
    Some(LpFit { coefficients: coeffs.iter().map(|&v| sol.var_value(v)).collect(), objective: sol.objective() })
}

/// Rationalizes an LP fit into a polynomial with `f(0) = 1` exactly.
pub fn lp_candidate(fit: &LpFit, lo: &Q, hi: &Q, params: PulseParams) -> Option<PulsePolynomial> {
    let raw: Vec<Q> = fit.coefficients.iter().map(|&c| from_f64_exact(c)).collect();
    let (alpha, beta) = cheb_affine(lo, hi);
    let t0 = &alpha * Q::zero() + &beta;
    let at_zero = eval_chebyshev(&raw, &t0);
    if at_zero.is_zero() {
        return None;
    }
    let mut coefficients: Vec<Q> = raw.iter().map(|c| c / &at_zero).collect();
    while coefficients.len() > 1 && coefficients.last().map(|c| c.is_zero()).unwrap_or(false) {
        coefficients.pop();
    }
    Some(PulsePolynomial {
        family: Family::Lp,
        params,
        degree: coefficients.len() - 1,
        form: PulseForm::Chebyshev { coefficients, lo: lo.clone(), hi: hi.clone() },
        peak: Q::one(),
        fallback: None,
    })
}

fn weighted_sum(f: &PulsePolynomial, points: &[(Q, usize)]) -> Q {
    points
        .par_iter()
        .map(|(x, c)| f.eval_q(x).abs() * Q::from_integer((*c).into()))
        .reduce(Q::zero, |a, b| a + b)
}

/// Minimal-degree polynomial with `f(0) = 1` and `Σ_{x ∈ points} |f(x)| <= slack`
/// (points counted with multiplicity), re-verified in exact arithmetic.
pub fn lp_peak_polynomial(points: &[Q], degree_cap: usize, slack: &Q) -> Result<PulsePolynomial> {
    if slack >= &Q::one() || slack.is_negative() {
        return Err(Error::Invalid(format!("slack {} must lie in [0, 1)", format_q(slack))));
    }
    if points.iter().any(|x| x.is_zero()) {
        return Err(Error::Invalid("evaluation points must exclude 0".into()));
    }
    let params = PulseParams::Points { count: points.len(), slack: slack.clone() };
    if points.is_empty() {
        return Ok(PulsePolynomial::constant(Family::Lp, params, Q::one()));
    }
    let mut counts: BTreeMap<Q, usize> = BTreeMap::new();
    for x in points {
        *counts.entry(x.clone()).or_default() += 1;
    }
    let distinct: Vec<(Q, usize)> = counts.into_iter().collect();
    let lo = distinct.first().map(|p| p.0.clone()).unwrap().min(Q::zero());
    let hi = distinct.last().map(|p| p.0.clone()).unwrap().max(Q::zero());
    let xs: Vec<f64> = distinct.iter().map(|p| to_f64(&p.0)).collect();
    let ws: Vec<f64> = distinct.iter().map(|p| p.1 as f64).collect();
    let (lof, hif) = (to_f64(&lo), to_f64(&hi));

    let attempt = |degree: usize| -> std::result::Result<PulsePolynomial, f64> {
        let fit = lp_solve(&xs, &ws, None, degree, lof, hif).ok_or(f64::INFINITY)?;
        let f = lp_candidate(&fit, &lo, &hi, params.clone()).ok_or(fit.objective)?;
        if &weighted_sum(&f, &distinct) <= slack {
            Ok(f)
        } else {
            Err(fit.objective)
        }
    };
    let mut best = match attempt(degree_cap) {
        Ok(f) => f,
        Err(obj) => {
            return Err(Error::LpInfeasible(format!(
                "degree {degree_cap}: optimal weighted sum {obj:.6e} exceeds slack {}",
                format_q(slack)
            )))
        }
    };
    let (mut lo_deg, mut hi_deg) = (0usize, best.degree.min(degree_cap));
    while lo_deg < hi_deg {
        let mid = (lo_deg + hi_deg) / 2;
        match attempt(mid) {
            Ok(f) => {
                hi_deg = f.degree.min(mid);
                best = f;
            }
            Err(_) => lo_deg = mid + 1,
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::{q, qf};

    #[test]
    fn empty_points_give_constant() {
        let f = lp_peak_polynomial(&[], 5, &qf(1, 2)).unwrap();
        assert_eq!(f.degree, 0);
        assert_eq!(f.eval_q(&q(7)), q(1));
    }

    #[test]
    fn two_points_interpolate() {
        let f = lp_peak_polynomial(&[q(1), q(2)], 2, &qf(1, 2)).unwrap();
        assert!(f.degree <= 2);
        assert!(f.eval_q(&q(1)).abs() + f.eval_q(&q(2)).abs() <= qf(1, 2));
        assert_eq!(f.eval_q(&q(0)), q(1));
    }

    #[test]
    fn hundred_points_within_degree_value() {
        let pts: Vec<Q> = (1..=100).map(q).collect();
        let f = lp_peak_polynomial(&pts, 30, &qf(1, 2)).unwrap();
        assert!(f.degree <= 18, "degree {}", f.degree);
    }

    #[test]
    fn rejects_zero_point() {
        assert!(lp_peak_polynomial(&[q(0)], 3, &qf(1, 2)).is_err());
    }
}
