//! Integer-grid pulses `f(x) = Π (1 - x/z_j)` with zeros clustered like the
//! nodes of a Chebyshev polynomial on `[0, N+1]`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use super::lp::lp_peak_polynomial;
use super::{Family, PulseForm, PulseParams, PulsePolynomial};
use crate::error::{Error, Result};
use crate::numerics::Q;

const SHIFTS: [f64; 5] = [0.6, 0.7, 0.75, 0.8, 0.9];

/// `z_j = round((N+1) sin²(π(j+δ)/(2(D+1))))`, clipped to `[1, N+1]`.
pub fn fk_zeros(n: u64, degree: usize, delta: f64) -> Vec<u64> {
    let top = (n + 1) as f64;
    (1..=degree)
        .map(|j| {
            let s = (std::f64::consts::PI * (j as f64 + delta) / (2.0 * (degree as f64 + 1.0))).sin();
            (top * s * s).round().clamp(1.0, top) as u64
        })
        .collect()
}

/// `Σ_{i=1}^{N+1} |F(i)| / F(0)` in floating point (for screening only).
fn ratio_f64(zeros: &[u64], n: u64) -> f64 {
    let log_f0: f64 = zeros.iter().map(|&z| (z as f64).ln()).sum();
    (1..=n + 1)
        .map(|i| {
            let mut acc = 0.0;
            for &z in zeros {
                if z == i {
                    return 0.0;
                }
                acc += (z as f64 - i as f64).abs().ln();
            }
            (acc - log_f0).exp()
        })
        .sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FkCheck {
    pub passed: bool,
    /// `1 - Σ|F(i)|/F(0)`, rounded to `f64`.
    pub margin: f64,
}

fn product(zeros: &[u64], i: u64) -> BigInt {
    let mut acc = BigInt::from(1);
    let mut chunk: i128 = 1;
    for &z in zeros {
        let f = z as i128 - i as i128;
        if f == 0 {
            return BigInt::zero();
        }
        match chunk.checked_mul(f) {
            Some(c) if c.unsigned_abs() < (1u128 << 100) => chunk = c,
            _ => {
                acc *= chunk;
                chunk = f;
            }
        }
    }
    acc * chunk
}

/// Exact check of `F(0) > Σ_{i=1}^{N+1} |F(i)|` for `F(x) = Π (z_j - x)`.
pub fn fk_exact_check(zeros: &[u64], n: u64) -> FkCheck {
    let f0 = product(zeros, 0);
    let total: BigInt = (1..=n + 1).into_par_iter().map(|i| product(zeros, i).abs()).sum();
    let passed = total < f0;
    let margin = 1.0 - Q::new(total, f0).to_f64().unwrap_or(f64::INFINITY);
    FkCheck { passed, margin }
}

fn cache() -> &'static Mutex<HashMap<u64, PulsePolynomial>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, PulsePolynomial>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn from_zeros(n: u64, zeros: Vec<u64>) -> PulsePolynomial {
    PulsePolynomial {
        family: Family::Fk,
        params: PulseParams::Grid { n },
        degree: zeros.len(),
        form: PulseForm::Zeros { zeros },
        peak: Q::from_integer(1.into()),
        fallback: None,
    }
}

/// Smallest-degree member of the zero family passing the exact grid check,
/// found by increasing the degree from `1.4√N`; falls back to an LP fit.
pub fn build_fk(n: u64) -> Result<PulsePolynomial> {
    if n == 0 {
        return Err(Error::Invalid("N must be at least 1".into()));
    }
    if let Some(f) = cache().lock().expect("cache lock").get(&n) {
        return Ok(f.clone());
    }
    let f = search(n)?;
    cache().lock().expect("cache lock").insert(n, f.clone());
    Ok(f)
}

fn search(n: u64) -> Result<PulsePolynomial> {
    let start = ((1.4 * (n as f64).sqrt()) as usize).max(1);
    let cap = (4.0 * (n as f64).sqrt()) as usize + 4;
    for degree in start..=cap.min(n as usize + 1) {
        let mut candidates: Vec<(f64, Vec<u64>)> = SHIFTS
            .iter()
            .map(|&delta| {
                let z = fk_zeros(n, degree, delta);
                (ratio_f64(&z, n), z)
            })
            .filter(|(r, _)| *r < 0.999)
            .collect();
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (_, z) in candidates {
            if fk_exact_check(&z, n).passed {
                return Ok(from_zeros(n, z));
            }
        }
    }
    // Zeros at every grid point always pass; prefer a low-degree LP fit.
    let points: Vec<Q> = (1..=n + 1).map(|i| Q::from_integer(i.into())).collect();
    match lp_peak_polynomial(&points, cap.min(n as usize + 1), &Q::new(1.into(), 2.into())) {
        Ok(mut f) => {
            f.family = Family::Fk;
            f.params = PulseParams::Grid { n };
            f.fallback = Some("zero family missed the grid check; LP fit used".into());
            Ok(f)
        }
        Err(_) => {
            let mut f = from_zeros(n, (1..=n + 1).collect());
            f.fallback = Some("interpolating zeros at every grid point".into());
            Ok(f)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grids_pass_exactly() {
        for n in 1..=60 {
            let f = build_fk(n).unwrap();
            let PulseForm::Zeros { zeros } = &f.form else { panic!("zero form expected") };
            assert!(fk_exact_check(zeros, n).passed, "N = {n}");
        }
    }

    #[test]
    fn hundred_point_grid_meets_degree_value() {
        let f = build_fk(99).unwrap();
        assert!(f.degree <= 18, "degree {}", f.degree);
    }

    #[test]
    fn full_interpolation_passes() {
        let z: Vec<u64> = (1..=5).collect();
        let c = fk_exact_check(&z, 4);
        assert!(c.passed && c.margin == 1.0);
    }
}
