//! Primitive direction sets: all primitive points in a ball, the
//! divisibility-patterned subset used for dense directions, and the explicit
//! nearest-direction construction.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use crate::numerics::rational::QStr;

use super::primes::{gcd, gcd_all, is_prime, largest_prime_leq, largest_prime_root};
use crate::error::{Error, Result};
use crate::numerics::rational::{format_q, to_f64};
use crate::numerics::Q;

/// Largest number of box points scanned by [`primitive_points`].
pub const ENUMERATION_BUDGET: f64 = 2.0e8;

/// A radius `R` given exactly by `R^{2e} = x` for a rational `x`.
#[serde_with::serde_as]
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Radius {
    pub e: u32,
    #[serde_as(as = "QStr")]
    pub x: Q,
}

impl Radius {
    /// `R = sqrt(r2)`.
    pub fn from_sq(r2: Q) -> Self {
        Radius { e: 1, x: r2 }
    }

    pub fn from_int(r: i64) -> Self {
        Radius::from_sq(Q::from_integer(BigInt::from(r * r)))
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.x).powf(1.0 / (2.0 * self.e as f64))
    }

    pub fn sq_f64(&self) -> f64 {
        to_f64(&self.x).powf(1.0 / self.e as f64)
    }

    /// Whether a vector with squared norm `ns` lies in the closed ball.
    pub fn contains_norm_sq(&self, ns: &BigInt) -> bool {
        Q::from_integer(num_traits::pow(ns.clone(), self.e as usize)) <= self.x
    }

    /// Largest integer `m` with `m <= R^2`.
    pub fn floor_sq(&self) -> u64 {
        let mut m = self.sq_f64().floor().max(0.0) as u64 + 1;
        while m > 0 && !self.contains_norm_sq(&BigInt::from(m)) {
            m -= 1;
        }
        while self.contains_norm_sq(&BigInt::from(m + 1)) {
            m += 1;
        }
        m
    }

    /// Largest integer `m <= R`.
    pub fn floor(&self) -> u64 {
        let s = self.floor_sq();
        let mut m = (s as f64).sqrt() as u64 + 1;
        while m * m > s {
            m -= 1;
        }
        m
    }

    pub fn describe(&self) -> String {
        if self.e == 1 {
            format!("sqrt({})", format_q(&self.x))
        } else {
            format!("({})^(1/{})", format_q(&self.x), 2 * self.e)
        }
    }
}

/// `n`, `d`, the radius `R = sqrt(d)·n^{(d-1)/(d+1)}` and the prime `λ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionParams {
    pub n: u64,
    pub d: usize,
    pub lambda: u64,
    pub radius: Radius,
}

impl DirectionParams {
    pub fn new(n: u64, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::Invalid("direction parameters need d >= 2".into()));
        }
        let e = d as u32 + 1;
        let lambda = largest_prime_root(n, e)?;
        let x = num_traits::pow(BigInt::from(d), d + 1) * num_traits::pow(BigInt::from(n), 2 * (d - 1));
        Ok(DirectionParams { n, d, lambda, radius: Radius { e, x: Q::from_integer(x) } })
    }

    /// Synthetic parameters with an explicit `λ` and radius.
    pub fn synthetic(n: u64, d: usize, lambda: u64, radius: Radius) -> Result<Self> {
        if !is_prime(lambda) {
            return Err(Error::Invalid(format!("{lambda} is not prime")));
        }
        Ok(DirectionParams { n, d, lambda, radius })
    }

    /// Squared radius of the sphere enclosing the cube, `d·n²/4`.
    pub fn sphere_radius_sq(&self) -> Q {
        Q::new(BigInt::from(self.d as u64 * self.n * self.n), BigInt::from(4))
    }

    fn lam_pow(&self, e: usize) -> i64 {
        (self.lambda as i64).pow(e as u32)
    }
}

fn norm_sq(a: &[i64]) -> BigInt {
    a.iter().map(|&x| BigInt::from(x) * x).sum()
}

/// All primitive integer vectors with `‖a‖ <= R`, sorted.
pub fn primitive_points(radius: &Radius, d: usize) -> Result<Vec<Vec<i64>>> {
    let m = radius.floor() as i64;
    if m < 1 {
        return Err(Error::Invalid("radius below 1".into()));
    }
    if ((2 * m + 1) as f64).powi(d as i32) > ENUMERATION_BUDGET {
        return Err(Error::Budget(format!("box of side {} in dimension {d}", 2 * m + 1)));
    }
    let max_sq = radius.floor_sq() as i64;
    let mut out: Vec<Vec<i64>> = (-m..=m)
        .into_par_iter()
        .flat_map_iter(|first| {
            let mut local = Vec::new();
            let mut cur = vec![first];
            collect_ball(&mut cur, d, max_sq - first * first, m, &mut local);
            local
        })
        .filter(|a| gcd_all(a) == 1 && radius.contains_norm_sq(&norm_sq(a)))
        .collect();
    out.sort();
    Ok(out)
}

fn collect_ball(cur: &mut Vec<i64>, d: usize, budget: i64, m: i64, out: &mut Vec<Vec<i64>>) {
    if budget < 0 {
        return;
    }
    if cur.len() == d {
        out.push(cur.clone());
        return;
    }
    let lim = ((budget as f64).sqrt() as i64 + 1).min(m);
    for x in -lim..=lim {
        if x * x > budget {
            continue;
        }
        cur.push(x);
        collect_ball(cur, d, budget - x * x, m, out);
        cur.pop();
    }
}

/// Membership in the patterned set, in the given coordinate order: `gcd(a₁,a₂) = λ^{d-2}`,
/// `a₁² + a₂² >= λ^{2(d-1)}`, `gcd(λ^d, a_i) = λ^{d-i}` for `i >= 3`, `‖a‖ <= R`.
pub fn in_n_lambda_prime(a: &[i64], params: &DirectionParams) -> bool {
    let d = params.d;
    if a.len() != d || d < 3 {
        return false;
    }
    let lam = params.lambda as i64;
    if gcd(a[0], a[1]) != params.lam_pow(d - 2) {
        return false;
    }
    let planar = BigInt::from(a[0]) * a[0] + BigInt::from(a[1]) * a[1];
    if planar < BigInt::from(lam).pow(2 * (d as u32 - 1)) {
        return false;
    }
    for i in 3..=d {
        let ld = BigInt::from(lam).pow(d as u32);
        let g = num_integer::Integer::gcd(&ld, &BigInt::from(a[i - 1]));
        if g != BigInt::from(lam).pow((d - i) as u32) {
            return false;
        }
    }
    params.radius.contains_norm_sq(&norm_sq(a))
}

/// Membership in the permutation closure of the patterned set.
pub fn in_n_lambda(a: &[i64], params: &DirectionParams) -> bool {
    permutations(a.len()).iter().any(|p| {
        let b: Vec<i64> = p.iter().map(|&j| a[j]).collect();
        in_n_lambda_prime(&b, params)
    })
}

/// All permutations of `0..d` in lexicographic order.
pub fn permutations(d: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                cur.push(j);
                rec(cur, used, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; d], &mut out);
    out
}

/// The patterned set in its canonical coordinate order, sorted.
pub fn n_lambda_prime_set(params: &DirectionParams) -> Result<Vec<Vec<i64>>> {
    let d = params.d;
    if d < 3 {
        return Err(Error::Invalid("patterned directions need d >= 3".into()));
    }
    let max_sq = params.radius.floor_sq() as i64;
    let step = params.lam_pow(d - 2);
    let lim = (max_sq as f64).sqrt() as i64 / step;
    let lam = params.lambda as i64;
    let heads: Vec<(i64, i64)> = (-lim..=lim)
        .flat_map(|p| (-lim..=lim).map(move |q| (p, q)))
        .filter(|&(p, q)| gcd(p, q) == 1 && p * p + q * q >= lam * lam)
        .collect();
    let mut out: Vec<Vec<i64>> = heads
        .par_iter()
        .flat_map_iter(|&(p, q)| {
            let head = vec![p * step, q * step];
            let used = (p * p + q * q) * step * step;
            let mut local = Vec::new();
            if used <= max_sq {
                extend_tail(head, max_sq - used, params, &mut local);
            }
            local
        })
        .filter(|a| params.radius.contains_norm_sq(&norm_sq(a)))
        .collect();
    out.sort();
    Ok(out)
}

fn extend_tail(cur: Vec<i64>, budget: i64, params: &DirectionParams, out: &mut Vec<Vec<i64>>) {
    let d = params.d;
    let i = cur.len() + 1;
    if i > d {
        out.push(cur);
        return;
    }
    let unit = params.lam_pow(d - i);
    let lam = params.lambda as i64;
    let lim = ((budget as f64).sqrt() as i64 + 1) / unit;
    for c in -lim..=lim {
        if c % lam == 0 {
            continue;
        }
        let v = c * unit;
        if v * v > budget {
            continue;
        }
        let mut next = cur.clone();
        next.push(v);
        extend_tail(next, budget - v * v, params, out);
    }
}

/// All coordinate permutations of the patterned set, sorted and deduplicated.
pub fn n_lambda_set(params: &DirectionParams) -> Result<Vec<Vec<i64>>> {
    let base = n_lambda_prime_set(params)?;
    let perms = permutations(params.d);
    let mut out: Vec<Vec<i64>> = base
        .par_iter()
        .flat_map_iter(|a| perms.iter().map(move |p| p.iter().map(|&j| a[j]).collect::<Vec<i64>>()))
        .collect();
    out.par_sort_unstable();
    out.dedup();
    if out.is_empty() {
        return Err(Error::EmptyDirections(format!(
            "no patterned directions for lambda={} within R={}",
            params.lambda,
            params.radius.describe()
        )));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearestDirection {
    pub b: Vec<i64>,
    pub norm: f64,
    /// Euclidean distance from `b` to the line.
    pub distance: f64,
    /// `distance / λ^{d-2}`.
    pub ratio: f64,
    /// Per-coordinate lifting bounds held exactly.
    pub coordinate_bounds_hold: bool,
}

/// Builds a member of the patterned direction set close to the line spanned
/// by `l`: scale a point of the line just inside the ball, replace the two
/// largest coordinates by a primitive pair `(p, i₀)·λ^{d-2}` with `p` prime,
/// and round each remaining coordinate onto the right divisibility class.
pub fn nearest_direction(l: &[f64], params: &DirectionParams) -> Result<NearestDirection> {
    let d = params.d;
    let fail = |step: &str, detail: String| Error::Construction { step: step.into(), detail };
    if d < 3 || l.len() != d {
        return Err(fail("input", format!("need a {d}-vector with d >= 3")));
    }
    let len = l.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(len > 0.0) || !len.is_finite() {
        return Err(fail("input", "line direction must be a nonzero finite vector".into()));
    }
    let r = params.radius.to_f64();
    let unit2 = params.lam_pow(d - 2) as f64;
    let eps = 2.0 * unit2 / r;
    if eps >= 1.0 {
        return Err(fail("scale", format!("radius {r:.3} too small for lambda^(d-2) = {unit2}")));
    }
    // sort absolute coordinates descending, keep the permutation and signs
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| l[j].abs().partial_cmp(&l[i].abs()).unwrap().then(i.cmp(&j)));
    let signs: Vec<i64> = order.iter().map(|&j| if l[j] < 0.0 { -1 } else { 1 }).collect();
    let a1: Vec<f64> = order.iter().map(|&j| (1.0 - eps) * r * l[j].abs() / len).collect();
    let x1 = a1[0] / unit2;
    let x2 = a1[1] / unit2;
    let p = largest_prime_leq(x1).map_err(|_| fail("prime", format!("scaled leading coordinate {x1:.3} < 2")))?;
    let qv = p as f64 * x2 / x1;
    let i0 = (qv.round() as i64).clamp(1, p as i64 - 1);
    let scale = p as f64 / x1;
    let y: Vec<f64> = a1.iter().map(|v| v * scale).collect();
    let mut b = vec![p as i64 * unit2 as i64, i0 * unit2 as i64];
    let lam = params.lambda as i64;
    let mut bounds = (b[1] as f64 - y[1]).abs() <= unit2;
    for i in 3..=d {
        let unit = params.lam_pow(d - i);
        let mut c = (y[i - 1] / unit as f64).floor() as i64;
        if c % lam == 0 {
            c += 1;
        }
        let bi = c * unit;
        bounds &= (bi as f64 - y[i - 1]).abs() <= unit as f64;
        b.push(bi);
    }
    bounds &= b[d - 1] % lam != 0;
    let sorted = b.clone();
    if !in_n_lambda_prime(&sorted, params) {
        return Err(fail(
            "membership",
            format!("lifted vector {sorted:?} violates the divisibility or norm conditions"),
        ));
    }
    let mut out = vec![0i64; d];
    for (pos, &j) in order.iter().enumerate() {
        out[j] = signs[pos] * sorted[pos];
    }
    let norm = out.iter().map(|&v| (v as f64) * (v as f64)).sum::<f64>().sqrt();
    let dot: f64 = out.iter().zip(l).map(|(&v, &w)| v as f64 * w / len).sum();
    let distance = (norm * norm - dot * dot).max(0.0).sqrt();
    Ok(NearestDirection { b: out, norm, distance, ratio: distance / unit2, coordinate_bounds_hold: bounds })
}

/// Exact squared norm of an integer vector.
pub fn norm_sq_int(a: &[i64]) -> BigInt {
    norm_sq(a)
}

/// Whether `a` is primitive (entries coprime, not all zero).
pub fn is_primitive(a: &[i64]) -> bool {
    gcd_all(a) == 1
}

pub fn negated(a: &[i64]) -> Vec<i64> {
    a.iter().map(|x| -x).collect()
}
