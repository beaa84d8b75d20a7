use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fk::fk_exact_check;
use super::{peak_matches, Family, PulseForm, PulseParams, PulsePolynomial};
use crate::numerics::rational::{format_q, to_f64};
use crate::numerics::{FastInterval, Q};
use num_traits::{Signed, Zero};

/// Which points a property check visits.
#[derive(Clone, Debug)]
pub struct CertOptions {
    /// Random reals sampled over the window (diagnostic).
    pub random_reals: usize,
    /// Random offsets `ε ∈ (-1/2, 1/2]` for the `Z + ε` grids of the two-sided
    /// kernel; the offset 0 is always included.
    pub offsets: usize,
    pub seed: u64,
    /// Evaluation set for the `LP` family.
    pub points: Option<Vec<Q>>,
}

impl Default for CertOptions {
    fn default() -> Self {
        CertOptions { random_reals: 1000, offsets: 1000, seed: 0, points: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub name: String,
    pub passed: bool,
    /// `exact`, `interval`, or `report` (informational, never fails the pulse).
    pub method: String,
    /// Smallest relative slack `1 - |f(x)|/bound(x)` seen, when meaningful.
    pub worst_margin: Option<f64>,
    pub points: usize,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseReport {
    pub family: Family,
    pub degree: usize,
    pub degree_bound: Option<f64>,
    pub checks: Vec<PropertyCheck>,
    pub passed: bool,
}

fn sup_abs(e: FastInterval) -> f64 {
    e.lo.abs().max(e.hi.abs())
}

/// Worst relative slack of `|f| <= min(cap, 1/x²)` (strict if `strict`) over
/// `xs`, or `None` if some point fails.
fn envelope_scan(f: &PulsePolynomial, xs: &[f64], cap: f64, strict: bool) -> (bool, f64) {
    let ev = f.evaluator();
    let results: Vec<(bool, f64)> = xs
        .par_iter()
        .map(|&x| {
            let e = ev.enclose(FastInterval::point(x));
            if !e.is_finite() {
                return (false, f64::NEG_INFINITY);
            }
            let s = sup_abs(e);
            let x2 = FastInterval::point(x).square().hi;
            let scaled = if x == 0.0 { 0.0 } else { (s * x2).next_up() };
            let ok_cap = if strict { s < cap } else { s <= cap };
            let ok_inv = if strict { scaled < 1.0 } else { scaled <= 1.0 };
            let margin = (1.0 - s / cap).min(if x == 0.0 { 1.0 } else { 1.0 - scaled });
            (ok_cap && ok_inv, margin)
        })
        .collect();
    let ok = results.iter().all(|r| r.0);
    let worst = results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    (ok, worst)
}

fn offsets(opts: &CertOptions) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = vec![0.0];
    for _ in 0..opts.offsets {
        // (-1/2, 1/2]
        out.push(0.5 - rng.gen::<f64>());
    }
    out
}

fn two_sided_grid(a: f64, b: f64, eps: f64) -> Vec<f64> {
    let lo = (-a - eps).ceil() as i64;
    let hi = (b - eps).floor() as i64;
    (lo..=hi).map(|k| k as f64 + eps).filter(|&x| x >= -a && x <= b).collect()
}

/// Property (b) of the two-sided kernel on every `(Z + ε) ∩ [-a, b]` grid.
pub(crate) fn envelope_passes(f: &PulsePolynomial, opts: &CertOptions) -> bool {
    let PulseParams::Interval { a, b, m } = &f.params else {
        return false;
    };
    let (a, b, cap) = (to_f64(a), to_f64(b), 4.0 * to_f64(m));
    offsets(opts).iter().all(|&eps| envelope_scan(f, &two_sided_grid(a, b, eps), cap, true).0)
}

fn report_degree(f: &PulsePolynomial, bound: Option<f64>) -> PropertyCheck {
    let (passed, detail) = match bound {
        Some(b) => ((f.degree as f64) < b, format!("degree {} vs bound {:.3}", f.degree, b)),
        None => (true, format!("degree {}", f.degree)),
    };
    PropertyCheck { name: "(c) degree".into(), passed, method: "report".into(), worst_margin: None, points: 0, detail }
}

fn peak_check(f: &PulsePolynomial) -> PropertyCheck {
    let ok = peak_matches(f);
    PropertyCheck {
        name: "(a) peak value".into(),
        passed: ok,
        method: "exact".into(),
        worst_margin: None,
        points: 1,
        detail: format!("f(0) = {} required", format_q(&f.peak)),
    }
}

/// Per-property certification of a pulse polynomial.
pub fn check_pulse_properties(f: &PulsePolynomial, opts: &CertOptions) -> PulseReport {
    let mut checks = Vec::new();
    let degree_bound;
    match (&f.family, &f.params) {
        (Family::F0, PulseParams::Window { b0, m0 }) => {
            let (b0f, m0f) = (to_f64(b0), to_f64(m0));
            degree_bound = Some(std::f64::consts::PI.sqrt() * b0f.sqrt() * m0f.powf(0.25) + 2.0);
            checks.push(peak_check(f));
            let top = crate::numerics::rational::floor_q(b0);
            let top: i64 = top.try_into().unwrap_or(i64::MAX);
            let grid: Vec<f64> = (1..=top).map(|x| x as f64).collect();
            let (ok, worst) = envelope_scan(f, &grid, m0f, false);
            checks.push(PropertyCheck {
                name: "(b) |f(x)| <= min(m0, 1/x^2) on integers of (0, b0]".into(),
                passed: ok,
                method: "interval".into(),
                worst_margin: Some(worst),
                points: grid.len(),
                detail: String::new(),
            });
            if opts.random_reals > 0 && !matches!(f.form, PulseForm::Chebyshev { .. }) {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xf0);
                let xs: Vec<f64> = (0..opts.random_reals).map(|_| b0f * (1.0 - rng.gen::<f64>())).collect();
                let (ok, worst) = envelope_scan(f, &xs, m0f, false);
                checks.push(PropertyCheck {
                    name: "(b) random reals in (0, b0]".into(),
                    passed: ok,
                    method: "interval".into(),
                    worst_margin: Some(worst),
                    points: xs.len(),
                    detail: "diagnostic".into(),
                });
            }
        }
        (Family::Fpulse, PulseParams::Interval { a, b, m }) => {
            let (af, bf, mf) = (to_f64(a), to_f64(b), to_f64(m));
            degree_bound = Some(7.0 * (af * bf * mf).sqrt() + 2.0);
            checks.push(peak_check(f));
            let mut ok = true;
            let mut worst = f64::INFINITY;
            let mut count = 0;
            for eps in offsets(opts) {
                let grid = two_sided_grid(af, bf, eps);
                count += grid.len();
                let (o, w) = envelope_scan(f, &grid, 4.0 * mf, true);
                ok &= o;
                worst = worst.min(w);
            }
            checks.push(PropertyCheck {
                name: "(b) |f(x)| < min(4m, 1/x^2) on (Z+eps) ∩ [-a, b]".into(),
                passed: ok,
                method: "interval".into(),
                worst_margin: Some(worst),
                points: count,
                detail: format!("{} offsets", opts.offsets + 1),
            });
            if opts.random_reals > 0 {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xf1);
                let xs: Vec<f64> = (0..opts.random_reals).map(|_| -af + (af + bf) * rng.gen::<f64>()).collect();
                let (ok, worst) = envelope_scan(f, &xs, 4.0 * mf, true);
                checks.push(PropertyCheck {
                    name: "(b) random reals in [-a, b]".into(),
                    passed: ok,
                    method: "interval".into(),
                    worst_margin: Some(worst),
                    points: xs.len(),
                    detail: "diagnostic".into(),
                });
            }
        }
        (Family::Fk, PulseParams::Grid { n }) => {
            let n = *n;
            let ln2 = std::f64::consts::LN_2;
            degree_bound = Some(2.0 * ((n as f64 * ln2).sqrt().floor()) + 2.0 + 1e-9);
            let (passed, margin) = match &f.form {
                PulseForm::Zeros { zeros } => {
                    let c = fk_exact_check(zeros, n);
                    (c.passed, c.margin)
                }
                _ => {
                    let pts: Vec<Q> = (1..=n + 1).map(|i| Q::from_integer(i.into())).collect();
                    let (ok, slack) = exact_sum_below(f, &pts, &f.eval_q(&Q::zero()), true);
                    (ok, to_f64(&slack))
                }
            };
            checks.push(PropertyCheck {
                name: "(a) f(0) > sum_{i=1}^{N+1} |f(i)|".into(),
                passed,
                method: "exact".into(),
                worst_margin: Some(margin),
                points: n as usize + 1,
                detail: String::new(),
            });
        }
        (Family::Lp, PulseParams::Points { slack, .. }) => {
            degree_bound = None;
            checks.push(peak_check(f));
            if let Some(pts) = &opts.points {
                let (ok, rest) = exact_sum_below(f, pts, slack, false);
                checks.push(PropertyCheck {
                    name: "sum |f(x)| <= slack".into(),
                    passed: ok,
                    method: "exact".into(),
                    worst_margin: Some(to_f64(&rest)),
                    points: pts.len(),
                    detail: format!("slack {}", format_q(slack)),
                });
            }
        }
        _ => {
            degree_bound = None;
            checks.push(PropertyCheck {
                name: "params".into(),
                passed: false,
                method: "exact".into(),
                worst_margin: None,
                points: 0,
                detail: "family and params disagree".into(),
            });
        }
    }
    checks.push(report_degree(f, degree_bound));
    let passed = checks.iter().filter(|c| c.method != "report").all(|c| c.passed);
    PulseReport { family: f.family, degree: f.degree, degree_bound, checks, passed }
}

/// Exact `Σ |f(x)|` against `bound` (strict or not); returns the remaining slack.
pub(crate) fn exact_sum_below(f: &PulsePolynomial, pts: &[Q], bound: &Q, strict: bool) -> (bool, Q) {
    let total = pts.par_iter().map(|x| f.eval_q(x).abs()).reduce(Q::zero, |a, b| a + b);
    let rest = bound - &total;
    let ok = if strict { rest.is_positive() } else { !rest.is_negative() };
    (ok, rest)
}
