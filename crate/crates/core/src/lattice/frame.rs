//! Tangent translation of the circumscribed polytope, the rotated direction
//! functions and the slice frames they induce.

use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use crate::numerics::rational::QStr;

use super::basis::{height_vectors, kernel_basis, reduce_basis, to_q_vec, HeightData, LatticeBasis, ReducedBasis};
use super::directions::Radius;
use crate::error::{Error, Result};
use crate::numerics::linalg::dot;
use crate::numerics::rational::to_f64;
use crate::numerics::{MultiSurd, SurdScalar, Q};

fn qi(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

fn idot(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

fn q128(x: i128) -> Q {
    Q::from_integer(BigInt::from(x))
}

/// Exact comparison of surds with possibly different radicands.
pub fn cmp_surds(x: &SurdScalar, y: &SurdScalar) -> Ordering {
    let rads = Arc::new(vec![x.s.clone(), y.s.clone()]);
    let a = MultiSurd::from_surd(rads.clone(), 0, x.u.clone(), x.v.clone());
    let b = MultiSurd::from_surd(rads, 1, y.u.clone(), y.v.clone());
    a.sub(&b).sign()
}

/// Result of translating the circumscribed polytope until a facet touches `H`.
#[serde_with::serde_as]
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tangent {
    /// Inward normal of the tight facet.
    pub a0: Vec<i64>,
    /// Point of `H` on the tight facet.
    pub h: Vec<i64>,
    /// Shooting direction `a'`; the center moves along `-a'`.
    pub shoot: Vec<i64>,
    #[serde_as(as = "Vec<QStr>")]
    pub start: Vec<Q>,
    /// Step length: the sphere center is `start - sigma·a'`.
    pub sigma: SurdScalar,
    /// Squared sphere radius.
    #[serde_as(as = "QStr")]
    pub r_sq: Q,
}

impl Tangent {
    pub fn center(&self) -> Vec<SurdScalar> {
        self.start
            .iter()
            .zip(&self.shoot)
            .map(|(t, &a)| SurdScalar::rational(t.clone()).sub(&self.sigma.mul_q(&qi(a))))
            .collect()
    }

    pub fn center_f64(&self) -> Vec<f64> {
        let s = self.sigma.to_f64();
        self.start.iter().zip(&self.shoot).map(|(t, &a)| to_f64(t) - s * a as f64).collect()
    }

    /// `u·(t_c - h)` for a rational vector `u`, exactly.
    pub fn offset_dot(&self, u: &[Q]) -> SurdScalar {
        let base = self
            .start
            .iter()
            .zip(&self.h)
            .zip(u)
            .fold(Q::zero(), |acc, ((t, &h), ui)| acc + (t - qi(h)) * ui);
        let along = self.shoot.iter().zip(u).fold(Q::zero(), |acc, (&a, ui)| acc + qi(a) * ui);
        SurdScalar::rational(base).sub(&self.sigma.mul_q(&along))
    }
}

/// Support constraint slack `a·t_c + r‖a‖ - max_{x∈H} a·x`, exactly.
fn slack_exact(a: &[i64], support: i128, t: &Tangent) -> MultiSurd {
    let a_dot_start = t.start.iter().zip(a).fold(Q::zero(), |acc, (s, &x)| acc + s * qi(x));
    let aa = q128(idot(a, &t.shoot));
    let ra = &t.r_sq * q128(idot(a, a));
    let rads = Arc::new(vec![t.sigma.s.clone(), ra]);
    let shift = MultiSurd::from_surd(rads.clone(), 0, t.sigma.u.clone(), t.sigma.v.clone()).mul_q(&aa);
    let base = MultiSurd::from_q(rads.clone(), a_dot_start - q128(support));
    let radial = MultiSurd::from_surd(rads, 1, Q::zero(), Q::from_integer(1.into()));
    base.sub(&shift).add(&radial)
}

fn supports(h: &[Vec<i64>], dirs: &[Vec<i64>]) -> Vec<i128> {
    dirs.par_iter().map(|a| h.iter().map(|x| idot(a, x)).max().unwrap()).collect()
}

/// Moves the sphere center from `start` along `-a'` (with `a' = dirs[shoot]`)
/// as far as all support constraints allow. The binding constraint gives the
/// tight facet; ties go to the lexicographically smallest inward normal, and
/// the touching point is the lexicographically smallest minimizer in `H`.
pub fn support_tangent(h: &[Vec<i64>], dirs: &[Vec<i64>], r_sq: &Q, start: &[Q], shoot: usize) -> Result<Tangent> {
    if dirs.is_empty() {
        return Err(Error::EmptyDirections("no directions for the tangent translation".into()));
    }
    if h.is_empty() {
        return Err(Error::Invalid("empty point set".into()));
    }
    let shoot_dir = dirs[shoot % dirs.len()].clone();
    let sup = supports(h, dirs);
    let r = to_f64(r_sq).sqrt();
    let start_f: Vec<f64> = start.iter().map(to_f64).collect();
    let steps: Vec<(usize, f64)> = dirs
        .par_iter()
        .enumerate()
        .filter_map(|(j, a)| {
            let aa = idot(a, &shoot_dir);
            if aa <= 0 {
                return None;
            }
            let at: f64 = a.iter().zip(&start_f).map(|(&x, t)| x as f64 * t).sum();
            let na = (idot(a, a) as f64).sqrt();
            Some((j, (at - sup[j] as f64 + r * na) / aa as f64))
        })
        .collect();
    if steps.iter().any(|&(_, s)| s < -1e-6) {
        return Err(Error::Invalid("start point is outside the circumscribed polytope".into()));
    }
    let min = steps.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    if !min.is_finite() {
        return Err(Error::Invalid("shooting direction is unbounded".into()));
    }
    let tol = 1e-7 * (1.0 + min.abs());
    let exact_step = |j: usize| {
        let a = &dirs[j];
        let at = start.iter().zip(a).fold(Q::zero(), |acc, (s, &x)| acc + s * qi(x));
        let aa = q128(idot(a, &shoot_dir));
        let u = (at - q128(sup[j])) / &aa;
        let v = Q::from_integer(1.into()) / &aa;
        SurdScalar::new(u, v, r_sq * q128(idot(a, a)))
    };
    let mut best: Option<(SurdScalar, Vec<i64>)> = None;
    for &(j, s) in &steps {
        if s > min + tol {
            continue;
        }
        let sig = exact_step(j);
        let a0: Vec<i64> = dirs[j].iter().map(|x| -x).collect();
        best = match best {
            None => Some((sig, a0)),
            Some((bs, ba)) => match cmp_surds(&sig, &bs) {
                Ordering::Less => Some((sig, a0)),
                Ordering::Equal if a0 < ba => Some((sig, a0)),
                _ => Some((bs, ba)),
            },
        };
    }
    let (sigma, a0) = best.expect("a bounded step exists");
    let hmin = h.iter().map(|x| idot(&a0, x)).min().unwrap();
    let hpt = h.iter().filter(|x| idot(&a0, x) == hmin).min().unwrap().clone();
    Ok(Tangent { a0, h: hpt, shoot: shoot_dir, start: start.to_vec(), sigma, r_sq: r_sq.clone() })
}

/// Checks that every point of `H` lies in the translated polytope; the
/// floating prefilter sends only near-tight constraints to exact arithmetic.
pub fn tangent_contains(t: &Tangent, h: &[Vec<i64>], dirs: &[Vec<i64>]) -> bool {
    let sup = supports(h, dirs);
    let center = t.center_f64();
    let r = to_f64(&t.r_sq).sqrt();
    dirs.par_iter().zip(sup.par_iter()).all(|(a, &s)| {
        let at: f64 = a.iter().zip(&center).map(|(&x, c)| x as f64 * c).sum();
        let slack = at + r * (idot(a, a) as f64).sqrt() - s as f64;
        if slack > 1e-6 * (1.0 + at.abs()) {
            return true;
        }
        slack_exact(a, s, t).sign() != Ordering::Less
    })
}

/// `g(x) = a·(x - h)` for the integral normal, or the rotated form
/// `μ·(a₀·(x-h)) + ν·(h_i·(x-h))` with `μ = sqrt(mu_sq)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionFunction {
    pub base: Vec<i64>,
    pub a0: Vec<i64>,
    pub kind: DirKind,
}

#[serde_with::serde_as]
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DirKind {
    Integral,
    Rotated {
        index: usize,
        #[serde_as(as = "QStr")]
        nu: Q,
        #[serde_as(as = "QStr")]
        mu_sq: Q,
        #[serde_as(as = "Vec<QStr>")]
        height: Vec<Q>,
    },
}

impl DirectionFunction {
    pub fn integral(a0: Vec<i64>, base: Vec<i64>) -> Self {
        DirectionFunction { base, a0, kind: DirKind::Integral }
    }

    pub fn g0(&self, x: &[i64]) -> i128 {
        let diff: Vec<i64> = x.iter().zip(&self.base).map(|(a, b)| a - b).collect();
        idot(&self.a0, &diff)
    }

    pub fn eval(&self, x: &[i64]) -> SurdScalar {
        let g0 = q128(self.g0(x));
        match &self.kind {
            DirKind::Integral => SurdScalar::rational(g0),
            DirKind::Rotated { nu, mu_sq, height, .. } => {
                let hx = x
                    .iter()
                    .zip(&self.base)
                    .zip(height)
                    .fold(Q::zero(), |acc, ((&a, &b), hv)| acc + qi(a - b) * hv);
                SurdScalar::new(nu * hx, g0, mu_sq.clone())
            }
        }
    }

    pub fn eval_f64(&self, x: &[i64]) -> f64 {
        self.eval(x).to_f64()
    }

    pub fn radicand(&self) -> Q {
        match &self.kind {
            DirKind::Integral => Q::zero(),
            DirKind::Rotated { mu_sq, .. } => mu_sq.clone(),
        }
    }

    /// `‖a‖²`: `a₀·a₀` for the integral form, `μ²‖a₀‖² + ν²‖h_i‖²` rotated.
    pub fn vector_norm_sq(&self) -> Q {
        let a0sq = q128(idot(&self.a0, &self.a0));
        match &self.kind {
            DirKind::Integral => a0sq,
            DirKind::Rotated { nu, mu_sq, height, .. } => mu_sq * a0sq + nu * nu * dot(height, height),
        }
    }

    /// `a·y` for an integer vector `y` in the kernel of `a₀`.
    pub fn dot_kernel(&self, y: &[i64]) -> Q {
        match &self.kind {
            DirKind::Integral => q128(idot(&self.a0, y)),
            DirKind::Rotated { nu, height, .. } => nu * dot(height, &to_q_vec(y)),
        }
    }

    /// The direction vector as surds `μ·a₀_j + ν·h_j` per coordinate.
    pub fn vector(&self) -> Vec<SurdScalar> {
        match &self.kind {
            DirKind::Integral => self.a0.iter().map(|&a| SurdScalar::rational(qi(a))).collect(),
            DirKind::Rotated { nu, mu_sq, height, .. } => self
                .a0
                .iter()
                .zip(height)
                .map(|(&a, hv)| SurdScalar::new(nu * hv, qi(a), mu_sq.clone()))
                .collect(),
        }
    }
}

/// Tilts `a₀/‖a₀‖` towards `h_i` by `θ_i = arcsin ‖h_i‖⁻¹`.
pub fn rotate_direction(a0: &[i64], base: &[i64], heights: &HeightData, i: usize) -> Result<DirectionFunction> {
    let ns = &heights.norm_sq[i];
    if *ns <= Q::from_integer(1.into()) {
        return Err(Error::DegenerateRotation(crate::numerics::rational::format_q(ns)));
    }
    let a0sq = q128(idot(a0, a0));
    Ok(DirectionFunction {
        base: base.to_vec(),
        a0: a0.to_vec(),
        kind: DirKind::Rotated {
            index: i,
            nu: heights.sin_sq[i].clone(),
            mu_sq: &heights.cos_sq[i] / a0sq,
            height: heights.h[i].clone(),
        },
    })
}

/// Everything derived from a tight facet: reduced kernel basis oriented
/// towards the tangent point, heights, the unit vector and rotated forms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeFrame {
    pub a0: Vec<i64>,
    pub h: Vec<i64>,
    pub reduced: ReducedBasis,
    pub heights: HeightData,
    /// Integer vector with `a₀·unit = 1`.
    pub unit: Vec<i64>,
    pub g0: DirectionFunction,
    pub rotated: Vec<DirectionFunction>,
}

impl LatticeFrame {
    pub fn basis(&self) -> &LatticeBasis {
        &self.reduced.basis
    }
}

/// Builds the frame for `a₀` and base point `h`; when a tangent is given,
/// each `y_i` is flipped so that `h_i·(t - h) >= 0` for the tangent point `t`.
pub fn build_frame(a0: &[i64], h: &[i64], tangent: Option<&Tangent>) -> Result<LatticeFrame> {
    let kern = kernel_basis(a0)?;
    let mut reduced = reduce_basis(&kern.basis)?;
    let mut heights = height_vectors(&reduced.basis)?;
    if let Some(t) = tangent {
        let mut vectors = reduced.basis.vectors.clone();
        let mut flipped = false;
        for (i, hv) in heights.h.iter().enumerate() {
            if t.offset_dot(hv).sign() == Ordering::Less {
                vectors[i] = vectors[i].iter().map(|x| -x).collect();
                flipped = true;
            }
        }
        if flipped {
            reduced.basis = LatticeBasis::new(vectors);
            heights = height_vectors(&reduced.basis)?;
        }
    }
    let rotated = (0..reduced.basis.rank())
        .map(|i| rotate_direction(a0, h, &heights, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(LatticeFrame {
        a0: a0.to_vec(),
        h: h.to_vec(),
        reduced,
        heights,
        unit: kern.unit,
        g0: DirectionFunction::integral(a0.to_vec(), h.to_vec()),
        rotated,
    })
}

/// Level set `g₀ = k` with origin `o_k` and offsets `ε_ik = g_i(o_k) ∈ (-1/2, 1/2]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceFrame {
    pub k: i64,
    pub origin: Vec<i64>,
    pub eps: Vec<SurdScalar>,
}

pub fn slice_frame(k: i64, frame: &LatticeFrame) -> Result<SliceFrame> {
    let level = k as i128 + idot(&frame.a0, &frame.h);
    let xk: Vec<i64> = frame
        .unit
        .iter()
        .map(|&u| i64::try_from(level * u as i128).map_err(|_| Error::TooLarge("slice origin overflow".into())))
        .collect::<Result<_>>()?;
    let mut origin = xk.clone();
    for (g, y) in frame.rotated.iter().zip(&frame.basis().vectors) {
        let m = g.eval(&xk).nearest_int_half_up();
        let m = m.to_i64().ok_or_else(|| Error::TooLarge("slice shift overflow".into()))?;
        for (o, &yj) in origin.iter_mut().zip(y) {
            *o -= m * yj;
        }
    }
    let eps = frame.rotated.iter().map(|g| g.eval(&origin)).collect();
    Ok(SliceFrame { k, origin, eps })
}

/// Integer coordinates of `x ∈ L_k` relative to `(o_k; y_1, …, y_{d-1})`.
pub fn slice_coordinates(frame: &LatticeFrame, sf: &SliceFrame, x: &[i64]) -> Result<Vec<i64>> {
    let diff: Vec<Q> = x.iter().zip(&sf.origin).map(|(a, b)| qi(a - b)).collect();
    frame
        .heights
        .dual
        .iter()
        .map(|ys| {
            let c = dot(ys, &diff);
            if !c.is_integer() {
                return Err(Error::Invalid("point is not on the slice lattice".into()));
            }
            c.to_integer().to_i64().ok_or_else(|| Error::TooLarge("coordinate overflow".into()))
        })
        .collect()
}

/// Whether `max g₀(H) < sqrt(d)·n·R`, decided exactly.
pub fn g0_range_ok(max_g0: i128, d: usize, n: u64, radius: &Radius) -> bool {
    if max_g0 < 0 {
        return false;
    }
    let e = radius.e as usize;
    let lhs = Q::from_integer(num_traits::pow(BigInt::from(max_g0).pow(2), e));
    let rhs = Q::from_integer(num_traits::pow(BigInt::from(d as u64 * n * n), e)) * &radius.x;
    lhs < rhs
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangencyGap {
    pub samples: usize,
    pub max_gap: f64,
    /// `2 · n^{(d-1)/(d+1)} / (4 sqrt(d))`.
    pub bound: f64,
    pub within_bound: bool,
}

/// Largest sampled radial distance between the circumscribed polytope and
/// its sphere (diagnostic only).
pub fn tangency_gap(dirs: &[Vec<i64>], n: u64, d: usize, samples: usize, seed: u64) -> TangencyGap {
    let r = (d as f64).sqrt() * n as f64 / 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let units: Vec<Vec<f64>> = (0..samples)
        .map(|_| {
            let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let l = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
            v.into_iter().map(|x| x / l).collect()
        })
        .collect();
    let max_gap = units
        .par_iter()
        .map(|u| {
            let rho = dirs
                .iter()
                .filter_map(|a| {
                    let au: f64 = a.iter().zip(u).map(|(&x, y)| x as f64 * y).sum();
                    (au > 0.0).then(|| r * (idot(a, a) as f64).sqrt() / au)
                })
                .fold(f64::INFINITY, f64::min);
            rho - r
        })
        .reduce(|| 0.0, f64::max);
    let bound = 2.0 * (n as f64).powf((d as f64 - 1.0) / (d as f64 + 1.0)) / (4.0 * (d as f64).sqrt());
    TangencyGap { samples, max_gap, bound, within_bound: max_gap <= bound }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn single_point_tangent() {
        let dirs: Vec<Vec<i64>> = vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]];
        let h = vec![vec![2, 2]];
        let t = support_tangent(&h, &dirs, &qi(2), &[qi(2), qi(2)], 0).unwrap();
        assert_eq!(t.h, vec![2, 2]);
        assert!(tangent_contains(&t, &h, &dirs));
        let g = DirectionFunction::integral(t.a0.clone(), t.h.clone());
        assert_eq!(g.g0(&[2, 2]), 0);
    }

    #[test]
    fn rotated_forms_are_dual_to_basis() {
        let a0 = vec![4i64, 2, 1];
        let frame = build_frame(&a0, &[1, 1, 1], None).unwrap();
        for (i, g) in frame.rotated.iter().enumerate() {
            assert!(g.vector_norm_sq().is_one());
            for (j, y) in frame.basis().vectors.iter().enumerate() {
                assert_eq!(g.dot_kernel(y), if i == j { Q::one() } else { Q::zero() });
            }
        }
        let s0 = slice_frame(0, &frame).unwrap();
        assert_eq!(s0.origin, vec![1, 1, 1]);
        assert!(s0.eps.iter().all(|e| e.is_zero()));
        let s3 = slice_frame(3, &frame).unwrap();
        assert_eq!(frame.g0.g0(&s3.origin), 3);
        let y1 = &frame.basis().vectors[0];
        let x: Vec<i64> = s3.origin.iter().zip(y1).map(|(o, y)| o + 2 * y).collect();
        let g1 = frame.rotated[0].eval(&x);
        assert_eq!(g1, s3.eps[0].add_q(&qi(2)));
        assert_eq!(slice_coordinates(&frame, &s3, &x).unwrap(), vec![2, 0]);
    }
}
