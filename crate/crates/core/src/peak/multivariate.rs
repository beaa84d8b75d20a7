//! Small multivariate peak polynomials from linear programming, for support
//! sets where the total degree must stay tiny.

use microlp::{ComparisonOp, OptimizationDirection, Problem, Variable};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numerics::rational::{format_q, from_f64_exact};
use crate::numerics::{binomial, Q};
use crate::oracle::MultiPoly;

#[derive(Clone, Debug, PartialEq)]
pub struct MultiPeak {
    pub h: Vec<i64>,
    pub poly: MultiPoly,
    pub degree: u32,
    /// `p(h) - Σ_{x ∈ H∖h} |p(x)|`, exactly.
    pub margin: Q,
}

/// Exponent vectors in `vars` variables with total degree at most `degree`.
pub fn monomials(vars: usize, degree: u32) -> Vec<Vec<u32>> {
    fn rec(vars: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == vars {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(vars, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(vars, degree, &mut Vec::new(), &mut out);
    out.sort_by_key(|e| (e.iter().sum::<u32>(), e.clone()));
    out
}

fn mono_f64(e: &[u32], x: &[i64], h: &[i64]) -> f64 {
    e.iter().zip(x.iter().zip(h)).map(|(&p, (&a, &b))| ((a - b) as f64).powi(p as i32)).product()
}

fn mono_q(e: &[u32], x: &[i64], h: &[i64]) -> Q {
    let v: BigInt = e.iter().zip(x.iter().zip(h)).map(|(&p, (&a, &b))| num_traits::pow(BigInt::from(a - b), p as usize)).product();
    Q::from_integer(v)
}

/// Coefficients in the shifted monomials `(x - h)^e`, with the constant term
/// fixed at 1, minimizing `Σ |p(x)|` over the other points.
fn solve(points: &[&Vec<i64>], h: &[i64], monos: &[Vec<u32>]) -> Option<Vec<f64>> {
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let c: Vec<Variable> = monos
        .iter()
        .map(|e| if e.iter().all(|&v| v == 0) { p.add_var(0.0, (1.0, 1.0)) } else { p.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY)) })
        .collect();
    for x in points {
        let s = p.add_var(1.0, (0.0, f64::INFINITY));
        let row: Vec<(Variable, f64)> = c.iter().zip(monos).map(|(&v, e)| (v, mono_f64(e, x, h))).collect();
        let mut up = row.clone();
        up.push((s, -1.0));
        p.add_constraint(up, ComparisonOp::Le, 0.0);
        let mut dn = row;
        dn.push((s, 1.0));
        p.add_constraint(dn, ComparisonOp::Ge, 0.0);
    }
    let sol = p.solve().ok()?;
    let sol = sol.solution()?;
    Some(c.iter().map(|&v| sol.var_value(v)).collect())
}

fn to_absolute(h: &[i64], monos: &[Vec<u32>], coeffs: &[Q]) -> MultiPoly {
    // (x - h)^e expanded per variable.
    let vars = h.len();
    let mut terms: std::collections::BTreeMap<Vec<u32>, Q> = Default::default();
    for (e, c) in monos.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        let mut partial: Vec<(Vec<u32>, Q)> = vec![(vec![0; vars], c.clone())];
        for j in 0..vars {
            let mut next = Vec::new();
            for (ex, v) in &partial {
                for t in 0..=e[j] {
                    let coef = Q::from_integer(BigInt::from(binomial(e[j] as u64, t as u64)))
                        * Q::from_integer(num_traits::pow(BigInt::from(-h[j]), (e[j] - t) as usize));
                    let mut ex2 = ex.clone();
                    ex2[j] = t;
                    next.push((ex2, v * coef));
                }
            }
            partial = next;
        }
        for (ex, v) in partial {
            *terms.entry(ex).or_insert_with(Q::zero) += v;
        }
    }
    MultiPoly { vars, terms: terms.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
}

/// Lowest total degree (at most `degree_cap`) for which some `h ∈ H` admits a
/// polynomial with `p(h) = 1 > 1 - slack >= Σ_{x ≠ h} |p(x)|`, verified exactly.
pub fn multivariate_lp_peak(points: &[Vec<i64>], degree_cap: u32, slack: &Q) -> Result<MultiPeak> {
    if points.is_empty() {
        return Err(Error::Invalid("empty point set".into()));
    }
    if slack.is_negative() || slack >= &Q::one() {
        return Err(Error::Invalid(format!("slack {} must lie in [0, 1)", format_q(slack))));
    }
    let vars = points[0].len();
    for degree in 0..=degree_cap {
        let monos = monomials(vars, degree);
        for h in points {
            let rest: Vec<&Vec<i64>> = points.iter().filter(|x| *x != h).collect();
            let Some(fit) = solve(&rest, h, &monos) else { continue };
            let mut coeffs: Vec<Q> = fit.iter().map(|&c| from_f64_exact(c)).collect();
            coeffs[0] = Q::one();
            let total = rest.iter().fold(Q::zero(), |acc, x| {
                let v = monos.iter().zip(&coeffs).fold(Q::zero(), |s, (e, c)| s + c * mono_q(e, x, h));
                acc + v.abs()
            });
            if &total <= slack {
                let poly = to_absolute(h, &monos, &coeffs);
                return Ok(MultiPeak { h: h.clone(), degree: poly.total_degree(), poly, margin: Q::one() - total });
            }
        }
    }
    Err(Error::LpInfeasible(format!("no peak of total degree <= {degree_cap}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::qf;

    #[test]
    fn monomial_count() {
        assert_eq!(monomials(3, 2).len(), 10);
        assert_eq!(monomials(2, 0), vec![vec![0, 0]]);
    }

    #[test]
    fn two_points_need_degree_one() {
        let pts = vec![vec![1, 1, 1], vec![2, 1, 1]];
        let p = multivariate_lp_peak(&pts, 3, &qf(1, 2)).unwrap();
        assert_eq!(p.degree, 1);
        let at = |x: &Vec<i64>| p.poly.eval_int(&x.iter().map(|&v| v as usize).collect::<Vec<_>>());
        assert_eq!(at(&p.h), Q::one());
        let other = pts.iter().find(|x| **x != p.h).unwrap();
        assert!(at(other).abs() <= qf(1, 2));
    }

    #[test]
    fn single_point_is_constant() {
        let p = multivariate_lp_peak(&[vec![3, 2, 1]], 2, &qf(1, 2)).unwrap();
        assert_eq!(p.degree, 0);
        assert_eq!(p.margin, Q::one());
    }
}
