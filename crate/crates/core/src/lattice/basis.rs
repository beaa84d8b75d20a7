//! Kernel lattices `{x ∈ Z^d : a·x = 0}`: integer bases, reduction, short
//! vector enumeration and height vectors.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use crate::numerics::rational::QStr;

use super::primes::{ext_gcd, gcd_all};
use crate::error::{Error, Result};
use crate::numerics::linalg::{det, dot, gram, inverse, minor, Matrix};
use crate::numerics::rational::{pi_sq_upper, to_f64};
use crate::numerics::Q;

/// Node budget for short-vector enumeration.
pub const ENUMERATION_NODE_BUDGET: u64 = 50_000_000;

fn qi(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

pub fn to_q_vec(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| qi(x)).collect()
}

fn idot(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

/// An integer basis of a rank-`m` lattice in `Z^d` with exact Gram data.
#[serde_with::serde_as]
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeBasis {
    pub vectors: Vec<Vec<i64>>,
    #[serde_as(as = "Vec<Vec<QStr>>")]
    pub gram: Matrix,
    #[serde_as(as = "QStr")]
    pub det_sq: Q,
}

impl LatticeBasis {
    pub fn new(vectors: Vec<Vec<i64>>) -> Self {
        let qv: Vec<Vec<Q>> = vectors.iter().map(|v| to_q_vec(v)).collect();
        let g = gram(&qv);
        let det_sq = det(&g);
        LatticeBasis { vectors, gram: g, det_sq }
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn ambient(&self) -> usize {
        self.vectors.first().map_or(0, |v| v.len())
    }

    /// Integer combination `Σ c_i y_i`.
    pub fn combine(&self, c: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; self.ambient()];
        for (ci, y) in c.iter().zip(&self.vectors) {
            for (o, &yj) in out.iter_mut().zip(y) {
                *o += ci * yj;
            }
        }
        out
    }

    /// Coordinates of `x` in this basis, when `x` lies in the real span.
    pub fn coordinates(&self, x: &[i64]) -> Option<Vec<Q>> {
        let inv = inverse(&self.gram)?;
        let rhs: Vec<Q> = self.vectors.iter().map(|y| qi(idot(y, x) as i64)).collect();
        let c: Vec<Q> = inv.iter().map(|row| dot(row, &rhs)).collect();
        let back: Vec<Q> = (0..self.ambient())
            .map(|j| c.iter().zip(&self.vectors).fold(Q::zero(), |a, (ci, y)| a + ci * qi(y[j])))
            .collect();
        (back == to_q_vec(x)).then_some(c)
    }

    /// Whether `x` is an integer combination of the basis.
    pub fn contains(&self, x: &[i64]) -> bool {
        self.coordinates(x).map_or(false, |c| c.iter().all(|v| v.is_integer()))
    }
}

/// Kernel basis of a primitive `a`, together with a vector `w` with `a·w = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelData {
    pub basis: LatticeBasis,
    pub unit: Vec<i64>,
}

/// Integer column reduction: builds a unimodular `U` with `a·U = (1, 0, …, 0)`;
/// the remaining columns of `U` span the whole kernel lattice.
pub fn kernel_basis(a: &[i64]) -> Result<KernelData> {
    let d = a.len();
    if d < 2 || gcd_all(a) != 1 {
        return Err(Error::Invalid(format!("{a:?} is not a primitive vector of length >= 2")));
    }
    let mut v: Vec<i128> = a.iter().map(|&x| x as i128).collect();
    let mut u: Vec<Vec<i128>> = (0..d).map(|i| (0..d).map(|j| (i == j) as i128).collect()).collect();
    for j in 1..d {
        if v[j] == 0 {
            continue;
        }
        let (g, s, t) = ext_gcd(v[0], v[j]);
        let (p, q) = (v[0] / g, v[j] / g);
        for row in u.iter_mut() {
            let (c0, cj) = (row[0], row[j]);
            row[0] = s * c0 + t * cj;
            row[j] = -q * c0 + p * cj;
        }
        v[0] = g;
        v[j] = 0;
    }
    if v[0] != 1 {
        return Err(Error::Invalid("column reduction did not reach gcd 1".into()));
    }
    let conv = |x: i128| i64::try_from(x).map_err(|_| Error::TooLarge("kernel basis entry overflow".into()));
    let col = |j: usize| -> Result<Vec<i64>> { u.iter().map(|row| conv(row[j])).collect() };
    let vectors = (1..d).map(col).collect::<Result<Vec<_>>>()?;
    let basis = lll(&vectors, 0.99);
    let unit = size_reduce(&col(0)?, &basis);
    Ok(KernelData { basis: LatticeBasis::new(basis), unit })
}

/// Gram–Schmidt data in floating point: `(b*_i·b*_i, μ_ij)`.
fn gso(b: &[Vec<i64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let m = b.len();
    let bf: Vec<Vec<f64>> = b.iter().map(|v| v.iter().map(|&x| x as f64).collect()).collect();
    let mut star: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut bsq = vec![0.0; m];
    let mut mu = vec![vec![0.0; m]; m];
    for i in 0..m {
        let mut v = bf[i].clone();
        for j in 0..i {
            let mij = bf[i].iter().zip(&star[j]).map(|(x, y)| x * y).sum::<f64>() / bsq[j];
            mu[i][j] = mij;
            for (vk, sk) in v.iter_mut().zip(&star[j]) {
                *vk -= mij * sk;
            }
        }
        bsq[i] = v.iter().map(|x| x * x).sum();
        star.push(v);
    }
    (bsq, mu)
}

fn sub_mult(a: &mut [i64], b: &[i64], k: i64) {
    for (x, &y) in a.iter_mut().zip(b) {
        *x -= k * y;
    }
}

/// Lenstra–Lenstra–Lovász reduction with parameter `delta`. Only unimodular
/// integer operations are applied, so the lattice is preserved exactly.
pub fn lll(basis: &[Vec<i64>], delta: f64) -> Vec<Vec<i64>> {
    let mut b = basis.to_vec();
    let m = b.len();
    let mut k = 1;
    let mut guard = 0u32;
    while k < m && guard < 100_000 {
        guard += 1;
        for j in (0..k).rev() {
            let (_, mu) = gso(&b);
            let r = mu[k][j].round() as i64;
            if r != 0 {
                let bj = b[j].clone();
                sub_mult(&mut b[k], &bj, r);
            }
        }
        let (bsq, mu) = gso(&b);
        if bsq[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * bsq[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    b
}

/// Reduces `x` modulo the lattice spanned by `basis` (nearest-plane rounding).
pub fn size_reduce(x: &[i64], basis: &[Vec<i64>]) -> Vec<i64> {
    let mut out = x.to_vec();
    let m = basis.len();
    for j in (0..m).rev() {
        let mut all = basis.to_vec();
        all.push(out.clone());
        let (_, mu) = gso(&all);
        let r = mu[m][j].round() as i64;
        if r != 0 {
            sub_mult(&mut out, &basis[j], r);
        }
    }
    out
}

/// `ϑ_d² = 128·d^{3d} / (6561·π²·d·(d-1)³)`, with `π²` replaced by an upper
/// bound so that the returned value never exceeds the true one.
pub fn theta_sq_lower(d: usize) -> Q {
    let d3d = num_traits::pow(BigInt::from(d), 3 * d);
    let num = Q::from_integer(BigInt::from(128) * d3d);
    let den = Q::from_integer(BigInt::from(6561u32) * BigInt::from(d) * num_traits::pow(BigInt::from(d - 1), 3))
        * pi_sq_upper();
    num / den
}

pub fn theta(d: usize) -> f64 {
    let d = d as f64;
    8.0 * 2f64.sqrt() / (81.0 * std::f64::consts::PI) * d.powf(1.5 * d) / (d.sqrt() * (d - 1.0).powf(1.5))
}

#[serde_with::serde_as]
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedBasis {
    pub basis: LatticeBasis,
    /// `∏ ‖y_i‖²`.
    #[serde_as(as = "QStr")]
    pub product_sq: Q,
    /// `∏ ‖y_i‖ <= ϑ_d · sqrt(det Gram)`, certified exactly.
    pub theta_bound_holds: bool,
    /// The exhaustive short-vector refinement ran.
    pub fallback_used: bool,
}

fn product_sq(b: &LatticeBasis) -> Q {
    (0..b.rank()).fold(Q::one(), |acc, i| acc * &b.gram[i][i])
}

/// Reduces a kernel basis of `Z^d` (rank `d-1`) and checks the `ϑ_d` bound.
/// If the bound fails, tries a greedy basis from exhaustively enumerated
/// short vectors (rank at most 4).
pub fn reduce_basis(b: &LatticeBasis) -> Result<ReducedBasis> {
    let d = b.ambient();
    let th = theta_sq_lower(d);
    let reduced = LatticeBasis::new(lll(&b.vectors, 0.99));
    let ps = product_sq(&reduced);
    if ps <= &th * &reduced.det_sq {
        return Ok(ReducedBasis { basis: reduced, product_sq: ps, theta_bound_holds: true, fallback_used: false });
    }
    if reduced.rank() <= 4 {
        if let Some(better) = greedy_short_basis(&reduced)? {
            let ps2 = product_sq(&better);
            if ps2 < ps {
                let holds = ps2 <= &th * &better.det_sq;
                return Ok(ReducedBasis { basis: better, product_sq: ps2, theta_bound_holds: holds, fallback_used: true });
            }
        }
    }
    Ok(ReducedBasis { basis: reduced, product_sq: ps, theta_bound_holds: false, fallback_used: true })
}

/// Enumerates coefficient vectors `c ≠ 0` (up to sign) of lattice vectors
/// with squared norm `<= r2` (floating point with a small safety margin;
/// callers recheck exactly).
pub fn enumerate_short(b: &LatticeBasis, r2: f64) -> Result<Vec<Vec<i64>>> {
    let m = b.rank();
    let (bsq, mu) = gso(&b.vectors);
    let r2 = r2 * (1.0 + 1e-9) + 1e-9;
    let mut out = Vec::new();
    let mut c = vec![0i64; m];
    let mut nodes = 0u64;
    fn rec(
        i: usize,
        partial: f64,
        c: &mut Vec<i64>,
        bsq: &[f64],
        mu: &[Vec<f64>],
        r2: f64,
        out: &mut Vec<Vec<i64>>,
        nodes: &mut u64,
    ) -> bool {
        *nodes += 1;
        if *nodes > ENUMERATION_NODE_BUDGET {
            return false;
        }
        let m = c.len();
        let center: f64 = -((i + 1)..m).map(|j| c[j] as f64 * mu[j][i]).sum::<f64>();
        let rem = r2 - partial;
        if rem < 0.0 {
            return true;
        }
        let span = (rem / bsq[i]).sqrt();
        let lo = (center - span).ceil() as i64;
        let hi = (center + span).floor() as i64;
        for v in lo..=hi {
            c[i] = v;
            let t = (v as f64 - center).powi(2) * bsq[i];
            if partial + t > r2 {
                continue;
            }
            if i == 0 {
                if c.iter().any(|&x| x != 0) {
                    out.push(c.clone());
                }
            } else if !rec(i - 1, partial + t, c, bsq, mu, r2, out, nodes) {
                return false;
            }
        }
        c[i] = 0;
        true
    }
    if m == 0 {
        return Ok(out);
    }
    if !rec(m - 1, 0.0, &mut c, &bsq, &mu, r2, &mut out, &mut nodes) {
        return Err(Error::Budget(format!("short vector enumeration exceeded {ENUMERATION_NODE_BUDGET} nodes")));
    }
    // keep one of each ± pair
    out.retain(|c| c.iter().find(|&&x| x != 0).map_or(false, |&x| x > 0));
    Ok(out)
}

/// True iff every nonzero lattice vector has norm at least `bound`.
pub fn shortest_vector_at_least(b: &LatticeBasis, bound: u64) -> Result<bool> {
    let r2 = (bound * bound) as f64;
    let cands = enumerate_short(b, r2)?;
    let limit = BigInt::from(bound) * bound;
    Ok(cands.iter().all(|c| {
        let v = b.combine(c);
        v.iter().map(|&x| BigInt::from(x) * x).sum::<BigInt>() >= limit
    }))
}

fn int_det(m: &[Vec<i64>]) -> BigInt {
    let qm: Matrix = m.iter().map(|r| to_q_vec(r)).collect();
    det(&qm).to_integer()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    crate::hypermatrix::combinations(n, k).into_iter().map(|s| s.into_iter().map(|x| x - 1).collect()).collect()
}

/// gcd of the maximal minors of a `k × m` integer matrix (0 if rank < k).
fn minor_gcd(rows: &[Vec<i64>], m: usize) -> BigInt {
    let k = rows.len();
    let mut g = BigInt::zero();
    for cols in subsets(m, k) {
        let sub: Vec<Vec<i64>> = rows.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect();
        g = num_integer::Integer::gcd(&g, &int_det(&sub));
    }
    g
}

/// Greedily picks short lattice vectors that extend to a basis.
fn greedy_short_basis(b: &LatticeBasis) -> Result<Option<LatticeBasis>> {
    let m = b.rank();
    let longest = (0..m).map(|i| to_f64(&b.gram[i][i])).fold(0.0, f64::max);
    let mut cands = enumerate_short(b, longest)?;
    cands.sort_by_key(|c| {
        let v = b.combine(c);
        (v.iter().map(|&x| x as i128 * x as i128).sum::<i128>(), c.clone())
    });
    let mut chosen: Vec<Vec<i64>> = Vec::new();
    for c in cands {
        let mut trial = chosen.clone();
        trial.push(c);
        if minor_gcd(&trial, m).is_one() {
            chosen = trial;
            if chosen.len() == m {
                break;
            }
        }
    }
    if chosen.len() < m || !int_det(&chosen).abs().is_one() {
        return Ok(None);
    }
    Ok(Some(LatticeBasis::new(chosen.iter().map(|c| b.combine(c)).collect())))
}

/// Height vectors: `h_i` is the component of `y_i` orthogonal to all other
/// basis vectors, `‖h_i‖² = det G / det G_(ii)`.
#[serde_with::serde_as]
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightData {
    #[serde_as(as = "Vec<Vec<QStr>>")]
    pub h: Vec<Vec<Q>>,
    #[serde_as(as = "Vec<QStr>")]
    pub norm_sq: Vec<Q>,
    /// `sin²θ_i = ‖h_i‖⁻²`.
    #[serde_as(as = "Vec<QStr>")]
    pub sin_sq: Vec<Q>,
    /// `cos²θ_i = 1 - ‖h_i‖⁻²`.
    #[serde_as(as = "Vec<QStr>")]
    pub cos_sq: Vec<Q>,
    /// Dual basis `y*_i` with `y*_i·y_j = δ_ij`.
    #[serde_as(as = "Vec<Vec<QStr>>")]
    pub dual: Vec<Vec<Q>>,
}

pub fn height_vectors(b: &LatticeBasis) -> Result<HeightData> {
    let inv = inverse(&b.gram).ok_or_else(|| Error::Invalid("basis vectors are dependent".into()))?;
    let m = b.rank();
    let d = b.ambient();
    let mut h = Vec::with_capacity(m);
    let mut norm_sq = Vec::with_capacity(m);
    let mut dual = Vec::with_capacity(m);
    for i in 0..m {
        let yi: Vec<Q> = (0..d)
            .map(|c| (0..m).fold(Q::zero(), |acc, j| acc + &inv[i][j] * qi(b.vectors[j][c])))
            .collect();
        let gii = inv[i][i].clone();
        h.push(yi.iter().map(|v| v / &gii).collect::<Vec<Q>>());
        norm_sq.push(Q::one() / &gii);
        dual.push(yi);
    }
    let sin_sq: Vec<Q> = norm_sq.iter().map(|v| Q::one() / v).collect();
    let cos_sq = sin_sq.iter().map(|s| Q::one() - s).collect();
    Ok(HeightData { h, norm_sq, sin_sq, cos_sq, dual })
}

/// `det G / det G_(ii)` for checking `‖h_i‖²`.
pub fn height_sq_by_minors(b: &LatticeBasis, i: usize) -> Q {
    if b.rank() == 1 {
        return b.det_sq.clone();
    }
    &b.det_sq / det(&minor(&b.gram, i))
}

/// Exact squared Euclidean norm of a rational vector.
pub fn norm_sq_q(v: &[Q]) -> Q {
    dot(v, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_examples() {
        for a in [vec![1i64, 1, 1], vec![4, 2, 1], vec![7, -3, 5, 11], vec![0, 0, 1]] {
            let k = kernel_basis(&a).unwrap();
            for y in &k.basis.vectors {
                assert_eq!(idot(y, &a), 0);
            }
            assert_eq!(idot(&k.unit, &a), 1);
            let na: i64 = a.iter().map(|x| x * x).sum();
            assert_eq!(k.basis.det_sq, qi(na));
        }
    }

    #[test]
    fn theta_three() {
        assert!((theta(3) - 1.2733).abs() < 1e-4);
        assert!(theta_sq_lower(3) < Q::new(BigInt::from(16214), BigInt::from(10000)));
    }

    #[test]
    fn orthogonal_heights() {
        let b = LatticeBasis::new(vec![vec![2, 0, 0], vec![0, 3, 0]]);
        let h = height_vectors(&b).unwrap();
        assert_eq!(h.h[0], to_q_vec(&[2, 0, 0]));
        assert_eq!(h.norm_sq[1], qi(9));
        let r = reduce_basis(&b).unwrap();
        assert!(r.theta_bound_holds);
        assert_eq!(r.product_sq, r.basis.det_sq);
    }

    #[test]
    fn plane_height() {
        let b = LatticeBasis::new(vec![vec![1, 0], vec![1, 1]]);
        let h = height_vectors(&b).unwrap();
        assert_eq!(h.h[1], to_q_vec(&[0, 1]));
        assert_eq!(h.norm_sq[1], qi(1));
        assert_eq!(height_sq_by_minors(&b, 1), qi(1));
    }

    #[test]
    fn short_vectors() {
        let k = kernel_basis(&[4, 2, 1]).unwrap();
        assert!(shortest_vector_at_least(&k.basis, 2).unwrap());
        let z = LatticeBasis::new(vec![vec![1, 0, 0], vec![0, 1, 0]]);
        assert!(!shortest_vector_at_least(&z, 2).unwrap());
    }
}
