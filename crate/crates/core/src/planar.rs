//! Planar peaks: convex hull, primitive edge statistics, the two-direction
//! search at a hull vertex and the product `f(g₁)·f(g₂)`.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_with::serde_as;

use crate::error::{Error, Result};
use crate::lattice::{primitive_points, DirectionFunction, PointSet, Radius};
use crate::numerics::rational::{from_f64_exact, isqrt_floor_q, QStr};
use crate::numerics::Q;
use crate::peak::{Factor, PeakParams, PeakProduct};
use crate::pulse::{build_fk, round_up_micro};

fn cross(o: &[i64], a: &[i64], b: &[i64]) -> i128 {
    (a[0] - o[0]) as i128 * (b[1] - o[1]) as i128 - (a[1] - o[1]) as i128 * (b[0] - o[0]) as i128
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimitiveEdge {
    pub direction: Vec<i64>,
    pub multiple: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HullData {
    /// Counterclockwise from the lexicographically smallest point, without
    /// collinear interior points.
    pub vertices: Vec<Vec<i64>>,
    pub edges: Vec<(Vec<i64>, Vec<i64>)>,
    pub primitive_edges: Vec<PrimitiveEdge>,
}

/// Monotone-chain hull. A collinear set gives its two endpoints, a single
/// point itself.
pub fn convex_hull(points: &[Vec<i64>]) -> HullData {
    let mut pts: Vec<Vec<i64>> = points.to_vec();
    pts.sort();
    pts.dedup();
    let vertices = if pts.len() <= 2 {
        pts
    } else {
        let mut lower: Vec<Vec<i64>> = Vec::new();
        for p in &pts {
            while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0 {
                lower.pop();
            }
            lower.push(p.clone());
        }
        let mut upper: Vec<Vec<i64>> = Vec::new();
        for p in pts.iter().rev() {
            while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0 {
                upper.pop();
            }
            upper.push(p.clone());
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        lower
    };
    let k = vertices.len();
    let edges: Vec<(Vec<i64>, Vec<i64>)> = match k {
        0 | 1 => Vec::new(),
        2 => vec![(vertices[0].clone(), vertices[1].clone())],
        _ => (0..k).map(|i| (vertices[i].clone(), vertices[(i + 1) % k].clone())).collect(),
    };
    let primitive_edges = edges
        .iter()
        .map(|(a, b)| {
            let e = [b[0] - a[0], b[1] - a[1]];
            let g = e[0].gcd(&e[1]);
            PrimitiveEdge { direction: vec![e[0] / g, e[1] / g], multiple: g }
        })
        .collect();
    HullData { vertices, edges, primitive_edges }
}

/// `(6/π^{1/3})·n^{2/3}`, the leading term of the vertex bound.
pub fn hull_vertex_bound(n: u64) -> f64 {
    6.0 / std::f64::consts::PI.cbrt() * (n as f64).powf(2.0 / 3.0)
}

#[serde_as]
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeStats {
    #[serde_as(as = "QStr")]
    pub radius_sq: Q,
    /// `N(R)`: primitive vectors with `‖a‖ <= R`.
    pub count: u64,
    /// `l(R) = Σ ‖a‖`, summed in `f64`.
    pub length: f64,
    /// Bound on the rounding error of `length`.
    pub length_error: f64,
}

pub fn primitive_edge_stats(radius_sq: &Q) -> Result<EdgeStats> {
    let dirs = primitive_points(&Radius::from_sq(radius_sq.clone()), 2)?;
    let count = dirs.len() as u64;
    let length: f64 = dirs.iter().map(|a| ((a[0] * a[0] + a[1] * a[1]) as f64).sqrt()).sum();
    // One rounding per square root and per addition.
    let length_error = length * f64::EPSILON * (count as f64 + 1.0);
    Ok(EdgeStats { radius_sq: radius_sq.clone(), count, length, length_error })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportTriple {
    pub a: Vec<i64>,
    /// `min_{x ∈ H} a·x`.
    pub l: i64,
    pub h: Vec<i64>,
    /// The supporting line contains a hull edge.
    pub edge_collinear: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoDirections {
    pub h: Vec<i64>,
    pub u1: Vec<i64>,
    pub u2: Vec<i64>,
    pub triples: Vec<SupportTriple>,
    /// `N(R)`.
    pub directions: usize,
    pub vertices: usize,
    /// `N(R) > 3|V(P)|`.
    pub pigeonhole: bool,
    /// Triples carried by the chosen vertex.
    pub multiplicity: usize,
    /// Number of vertices carrying each triple count.
    pub histogram: BTreeMap<usize, usize>,
}

fn norm_key(a: &[i64]) -> (i64, Vec<i64>) {
    (a[0] * a[0] + a[1] * a[1], a.to_vec())
}

fn dot(a: &[i64], x: &[i64]) -> i64 {
    a[0] * x[0] + a[1] * x[1]
}

/// Finds a hull vertex `h` carrying at least four support triples and two
/// independent directions whose lines touch `H` only at `h`.
pub fn two_directions(points: &[Vec<i64>], radius_sq: &Q) -> Result<TwoDirections> {
    if points.is_empty() {
        return Err(Error::Invalid("empty point set".into()));
    }
    let hull = convex_hull(points);
    let dirs = primitive_points(&Radius::from_sq(radius_sq.clone()), 2)?;
    let triples: Vec<Vec<SupportTriple>> = dirs
        .par_iter()
        .map(|a| {
            let l = hull.vertices.iter().map(|v| dot(a, v)).min().unwrap();
            let touching: Vec<&Vec<i64>> = hull.vertices.iter().filter(|v| dot(a, v) == l).collect();
            let edge = touching.len() > 1;
            touching
                .into_iter()
                .map(|h| SupportTriple { a: a.clone(), l, h: h.clone(), edge_collinear: edge })
                .collect()
        })
        .collect();
    let mut by_vertex: BTreeMap<Vec<i64>, Vec<SupportTriple>> = BTreeMap::new();
    for t in triples.into_iter().flatten() {
        by_vertex.entry(t.h.clone()).or_default().push(t);
    }
    let mut histogram = BTreeMap::new();
    for v in &hull.vertices {
        *histogram.entry(by_vertex.get(v).map_or(0, |t| t.len())).or_insert(0) += 1;
    }
    let pigeonhole = dirs.len() > 3 * hull.vertices.len();
    for (h, ts) in &by_vertex {
        if ts.len() < 4 {
            continue;
        }
        let mut strict: Vec<&SupportTriple> = ts.iter().filter(|t| !t.edge_collinear).collect();
        strict.sort_by_key(|t| norm_key(&t.a));
        let Some(first) = strict.first() else { continue };
        let u1 = first.a.clone();
        let Some(second) = strict.iter().find(|t| u1[0] * t.a[1] - u1[1] * t.a[0] != 0) else { continue };
        return Ok(TwoDirections {
            h: h.clone(),
            u1,
            u2: second.a.clone(),
            multiplicity: ts.len(),
            triples: ts.clone(),
            directions: dirs.len(),
            vertices: hull.vertices.len(),
            pigeonhole,
            histogram,
        });
    }
    Err(Error::NotFound(format!(
        "no vertex with two strict supporting directions among {} at R^2 = {}",
        dirs.len(),
        crate::numerics::rational::format_q(radius_sq)
    )))
}

#[derive(Clone, Debug)]
pub struct PlanarOptions {
    /// `R = sqrt(3)·t·(πn)^{1/3}` before doubling.
    pub t: f64,
}

impl Default for PlanarOptions {
    fn default() -> Self {
        PlanarOptions { t: 1.001 }
    }
}

#[serde_as]
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarReport {
    #[serde_as(as = "QStr")]
    pub radius_sq: Q,
    pub doublings: u32,
    pub directions: usize,
    pub vertices: usize,
    pub pigeonhole: bool,
    pub multiplicity: usize,
    pub histogram: BTreeMap<usize, usize>,
    /// Every hull edge is an integer multiple of a primitive vector.
    pub edges_decompose: bool,
    /// `0 < g_i(x) < sqrt(2)·n·R` on `H ∖ h`.
    pub ranges_ok: bool,
    /// `x ↦ (g₁(x), g₂(x))` is injective on `H ∖ h`.
    pub injective: bool,
    /// `N` with `N + 1 = ⌊sqrt(2)·n·R⌋`.
    pub grid: u64,
    pub fk_fallback: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarBuild {
    pub product: PeakProduct,
    pub directions: TwoDirections,
    pub report: PlanarReport,
}

/// Initial squared radius `3 t² (πn)^{2/3}`, rounded up.
pub fn initial_radius_sq(n: u64, t: f64) -> Q {
    let r2 = 3.0 * t * t * (std::f64::consts::PI * n as f64).powf(2.0 / 3.0);
    round_up_micro(&from_f64_exact(r2 * (1.0 + 1e-12)))
}

pub fn construct_peak_2(h: &PointSet, opts: &PlanarOptions) -> Result<PlanarBuild> {
    if h.d != 2 {
        return Err(Error::Invalid("construct_peak_2 needs d = 2".into()));
    }
    let n = h.n;
    let mut r2 = initial_radius_sq(n, opts.t);
    let mut doublings = 0;
    let two = loop {
        match two_directions(&h.points, &r2) {
            Ok(t) => break t,
            Err(Error::NotFound(_)) => {
                r2 *= Q::from_integer(BigInt::from(4));
                doublings += 1;
            }
            Err(e) => return Err(e),
        }
    };
    // N + 1 = ⌊sqrt(2 n² R²)⌋.
    let top = isqrt_floor_q(&(Q::from_integer(BigInt::from(2 * n * n)) * &r2));
    let grid: u64 = u64::try_from(top).map_err(|_| Error::TooLarge("grid size".into()))?.saturating_sub(1).max(1);
    let g1 = DirectionFunction::integral(two.u1.clone(), two.h.clone());
    let g2 = DirectionFunction::integral(two.u2.clone(), two.h.clone());
    let rest: Vec<&Vec<i64>> = h.points.iter().filter(|x| **x != two.h).collect();
    let ranges_ok = rest.iter().all(|x| {
        [&g1, &g2].iter().all(|g| {
            let v = g.g0(x);
            v > 0 && v <= grid as i128 + 1
        })
    });
    let mut seen = HashSet::with_capacity(rest.len());
    let injective = rest.iter().all(|x| seen.insert((g1.g0(x), g2.g0(x))));
    let hull = convex_hull(&h.points);
    let edges_decompose = hull.edges.iter().zip(&hull.primitive_edges).all(|((a, b), pe)| {
        pe.direction[0].gcd(&pe.direction[1]) == 1
            && b[0] - a[0] == pe.multiple * pe.direction[0]
            && b[1] - a[1] == pe.multiple * pe.direction[1]
    });
    let f = build_fk(grid)?;
    let fk_fallback = f.fallback.clone();
    let product = PeakProduct::new(
        2,
        n,
        two.h.clone(),
        vec![Factor { pulse: f.clone(), direction: g1 }, Factor { pulse: f, direction: g2 }],
        PeakParams::Planar { radius_sq: r2.clone(), grid },
    );
    let report = PlanarReport {
        radius_sq: r2,
        doublings,
        directions: two.directions,
        vertices: two.vertices,
        pigeonhole: two.pigeonhole,
        multiplicity: two.multiplicity,
        histogram: two.histogram.clone(),
        edges_decompose,
        ranges_ok,
        injective,
        grid,
        fk_fallback,
    };
    Ok(PlanarBuild { product, directions: two, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::q;
    use crate::peak::verify_peak;

    #[test]
    fn hull_small_cases() {
        let tri = vec![vec![1, 1], vec![5, 2], vec![2, 7]];
        assert_eq!(convex_hull(&tri).vertices.len(), 3);
        let seg = vec![vec![1, 1], vec![2, 2], vec![3, 3]];
        assert_eq!(convex_hull(&seg).vertices, vec![vec![1, 1], vec![3, 3]]);
        assert_eq!(convex_hull(&[vec![4, 4]]).vertices.len(), 1);
    }

    #[test]
    fn edge_stats_small_radii() {
        let s = primitive_edge_stats(&q(1)).unwrap();
        assert_eq!((s.count, s.length), (4, 4.0));
        let s = primitive_edge_stats(&q(2)).unwrap();
        assert_eq!(s.count, 8);
        assert!((s.length - (4.0 + 4.0 * 2f64.sqrt())).abs() <= s.length_error + 1e-12);
    }

    #[test]
    fn single_point_gives_square() {
        let h = PointSet::new(2, 10, vec![vec![3, 4]]).unwrap();
        let b = construct_peak_2(&h, &PlanarOptions::default()).unwrap();
        assert_eq!(b.product.factors.len(), 2);
        assert!(verify_peak(&b.product, &h.points).unwrap().certified());
    }

    #[test]
    fn triangle_directions_are_strict() {
        let pts = vec![vec![1, 1], vec![50, 2], vec![3, 60]];
        let t = two_directions(&pts, &q(400)).unwrap();
        for x in pts.iter().filter(|x| **x != t.h) {
            assert!(dot(&t.u1, x) > dot(&t.u1, &t.h));
            assert!(dot(&t.u2, x) > dot(&t.u2, &t.h));
        }
    }

    #[test]
    fn full_grid_corner() {
        let h = PointSet::cube(2, 12, 12).unwrap();
        let b = construct_peak_2(&h, &PlanarOptions::default()).unwrap();
        assert!(b.report.injective && b.report.ranges_ok);
        assert!(verify_peak(&b.product, &h.points).unwrap().certified());
    }
}
