//! The `d >= 3` construction: tangent facet, reduced kernel frame, rotated
//! directions and pulses, with every intermediate invariant checked.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_with::serde_as;

use super::{verify_peak_with, Factor, PeakParams, PeakProduct, VerifyMode};
use crate::error::{Error, Result};
use crate::lattice::basis::theta;
use crate::lattice::{
    build_frame, n_lambda_set, slice_coordinates, slice_frame, support_tangent, tangent_contains, DirKind,
    DirectionFunction, DirectionParams, LatticeFrame, PointSet, Tangent,
};
use crate::lattice::frame::g0_range_ok;
use crate::numerics::linalg::det;
use crate::numerics::rational::{exact_sqrt, format_q, from_f64_exact, pi_sq_upper, sqrt_bounds, to_f64, QStr};
use crate::numerics::{SurdScalar, Q};
use crate::pulse::{
    build_f0, build_fpulse, check_pulse_properties, lp_candidate, lp_solve, round_up_micro, CertOptions,
    PulseParams, PulsePolynomial, PulseReport,
};

fn qi(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

#[derive(Clone, Debug)]
pub struct PeakOptions {
    /// Seeds the choice of the shooting direction and all sampling.
    pub seed: u64,
    /// Inflate `a` by powers of two until `g_i(H) ⊆ [-a, b]`; otherwise a
    /// miss is an error.
    pub adaptive: bool,
    /// Certification grid for the pulses.
    pub cert: CertOptions,
    /// Random lattice points per run for the slice-coordinate identity.
    pub slice_samples: usize,
    /// Explicit index of the shooting direction.
    pub shoot: Option<usize>,
}

impl Default for PeakOptions {
    fn default() -> Self {
        PeakOptions {
            seed: 0,
            adaptive: true,
            cert: CertOptions { random_reals: 200, offsets: 16, seed: 0, points: None },
            slice_samples: 0,
            shoot: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantCheck {
    pub name: String,
    pub passed: bool,
    /// `exact`, `interval` or `report`.
    pub method: String,
    pub detail: String,
}

impl InvariantCheck {
    fn new(name: &str, passed: bool, method: &str, detail: impl Into<String>) -> Self {
        InvariantCheck { name: name.into(), passed, method: method.into(), detail: detail.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub checks: Vec<InvariantCheck>,
    pub pulses: Vec<PulseReport>,
    /// Factors of 2 applied to `a` (0 when the nominal value sufficed).
    pub a_inflation: u32,
    /// Property A misses before inflation, one entry per direction.
    pub bound_misses: Vec<String>,
    pub directions: usize,
    pub slices: usize,
}

impl PipelineReport {
    /// All non-report checks passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().filter(|c| c.method != "report").all(|c| c.passed) && self.pulses.iter().all(|p| p.passed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeakBuild {
    pub product: PeakProduct,
    pub report: PipelineReport,
    pub tangent: Option<Tangent>,
    pub frame: Option<LatticeFrame>,
}

#[serde_as]
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeakConstants {
    #[serde_as(as = "QStr")]
    pub b0: Q,
    #[serde_as(as = "QStr")]
    pub m0: Q,
    #[serde_as(as = "QStr")]
    pub a: Q,
    #[serde_as(as = "QStr")]
    pub b: Q,
    #[serde_as(as = "QStr")]
    pub m: Q,
}

/// `b₀ = ⌈√d·n·R⌉`, `m₀ = π²/6·4^d`, `a = (10/33)√d·ϑ_d²·n^{(d-1)/(d+1)}`,
/// `b = √d·n`, `m = (2/3)π²(d-1)`, each rounded up to a rational.
pub fn peak_constants(params: &DirectionParams) -> PeakConstants {
    let (d, n) = (params.d, params.n);
    let e = params.radius.e as usize;
    // b0^{2e} >= d^e n^{2e} R^{2e} with R^{2e} = x.
    let target = Q::from_integer(num_traits::pow(BigInt::from(d as u64 * n * n), e)) * &params.radius.x;
    let est = (d as f64).sqrt() * n as f64 * params.radius.to_f64();
    let mut b0 = BigInt::from((est.floor() as i64 - 2).max(1));
    while Q::from_integer(num_traits::pow(b0.clone(), 2 * e)) < target {
        b0 += 1;
    }
    let four_d = Q::from_integer(num_traits::pow(BigInt::from(4), d));
    let m0 = round_up_micro(&(pi_sq_upper() / qi(6) * four_d));
    let m = round_up_micro(&(pi_sq_upper() * qi(2) / qi(3) * qi(d as i64 - 1)));
    let b = round_up_micro(&sqrt_bounds(&qi((d as u64 * n * n) as i64), 40).1);
    let (df, nf) = (d as f64, n as f64);
    let af = 10.0 / 33.0 * df.sqrt() * theta(d).powi(2) * nf.powf((df - 1.0) / (df + 1.0));
    let a = round_up_micro(&from_f64_exact(af * (1.0 + 1e-12)));
    PeakConstants { b0: Q::from_integer(b0), m0, a, b, m }
}

fn direction_cache() -> &'static Mutex<HashMap<String, Arc<Vec<Vec<i64>>>>> {
    static C: OnceLock<Mutex<HashMap<String, Arc<Vec<Vec<i64>>>>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached_directions(params: &DirectionParams) -> Result<Arc<Vec<Vec<i64>>>> {
    let key = format!("{} {} {} {}", params.n, params.d, params.lambda, params.radius.describe());
    if let Some(v) = direction_cache().lock().expect("cache lock").get(&key) {
        return Ok(v.clone());
    }
    let v = Arc::new(n_lambda_set(params)?);
    direction_cache().lock().expect("cache lock").insert(key, v.clone());
    Ok(v)
}

type PulseEntry = (PulsePolynomial, PulseReport);

fn pulse_cache() -> &'static Mutex<HashMap<String, PulseEntry>> {
    static C: OnceLock<Mutex<HashMap<String, PulseEntry>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached_pulse<F: FnOnce() -> Result<PulsePolynomial>>(key: String, cert: &CertOptions, build: F) -> Result<PulseEntry> {
    let key = format!("{key} offsets={} reals={} seed={}", cert.offsets, cert.random_reals, cert.seed);
    if let Some(v) = pulse_cache().lock().expect("cache lock").get(&key) {
        return Ok(v.clone());
    }
    let f = build()?;
    let report = check_pulse_properties(&f, cert);
    let entry = (f, report);
    pulse_cache().lock().expect("cache lock").insert(key, entry.clone());
    Ok(entry)
}

/// Tangent facet and frame for `H` under `params`. The sphere center starts
/// at the center of the cube's bounding box and moves along `-a'` for a
/// direction `a'` drawn with `seed` (or given by `shoot`).
pub fn lattice_directions(
    h: &PointSet,
    params: &DirectionParams,
    seed: u64,
    shoot: Option<usize>,
) -> Result<(Tangent, LatticeFrame, usize)> {
    let dirs = cached_directions(params)?;
    let start = vec![Q::new(BigInt::from(params.n + 1), BigInt::from(2)); params.d];
    let shoot = shoot.unwrap_or_else(|| ChaCha8Rng::seed_from_u64(seed).gen_range(0..dirs.len()));
    let t = support_tangent(&h.points, &dirs, &params.sphere_radius_sq(), &start, shoot)?;
    if !tangent_contains(&t, &h.points, &dirs) {
        return Err(Error::Construction {
            step: "support_tangent".into(),
            detail: "translated polytope does not contain H".into(),
        });
    }
    let frame = build_frame(&t.a0, &t.h, Some(&t))?;
    Ok((t, frame, dirs.len()))
}

/// Runs the full pipeline with parameters derived from `(n, d)`.
pub fn construct_peak_d(h: &PointSet, opts: &PeakOptions) -> Result<PeakBuild> {
    if h.d < 3 {
        return Err(Error::Invalid("construct_peak_d needs d >= 3".into()));
    }
    if h.points.len() == 1 {
        return Ok(single_point(h));
    }
    let params = DirectionParams::new(h.n, h.d)?;
    if params.lambda < 3 {
        return Err(Error::Construction {
            step: "params".into(),
            detail: format!("lambda = {} < 3 at n = {}", params.lambda, h.n),
        });
    }
    construct_peak_d_with(h, &params, opts)
}

fn surd_is_integer(x: &SurdScalar) -> bool {
    if x.v.is_zero() {
        return x.u.is_integer();
    }
    match exact_sqrt(&x.s) {
        Some(r) => (&x.u + &x.v * r).is_integer(),
        None => false,
    }
}

fn in_half_open_unit(e: &SurdScalar) -> bool {
    let half = Q::new(BigInt::one(), BigInt::from(2));
    e.add_q(&-half.clone()).sign() != Ordering::Greater && e.add_q(&half).sign() == Ordering::Greater
}

fn single_point(h: &PointSet) -> PeakBuild {
    let product = PeakProduct::trivial(h.d, h.n, h.points[0].clone());
    let report = PipelineReport {
        checks: vec![InvariantCheck::new("single point", true, "exact", "p = 1")],
        pulses: Vec::new(),
        a_inflation: 0,
        bound_misses: Vec::new(),
        directions: 0,
        slices: 0,
    };
    PeakBuild { product, report, tangent: None, frame: None }
}

/// Runs the full pipeline with explicit (possibly synthetic) parameters.
pub fn construct_peak_d_with(h: &PointSet, params: &DirectionParams, opts: &PeakOptions) -> Result<PeakBuild> {
    let (d, n) = (h.d, h.n);
    if h.points.len() == 1 {
        return Ok(single_point(h));
    }
    let (t, frame, ndirs) = lattice_directions(h, params, opts.seed, opts.shoot)?;
    let mut checks = vec![InvariantCheck::new("tangent facet supports H", true, "exact", format!("a0 = {:?}", t.a0))];

    // g0 integral, nonnegative, and below sqrt(d)·n·R.
    let g0s: Vec<i128> = h.points.iter().map(|x| frame.g0.g0(x)).collect();
    let min_g0 = *g0s.iter().min().unwrap();
    let max_g0 = *g0s.iter().max().unwrap();
    checks.push(InvariantCheck::new("g0(H) ⊆ Z>=0", min_g0 >= 0, "exact", format!("range [{min_g0}, {max_g0}]")));
    checks.push(InvariantCheck::new(
        "max g0(H) < sqrt(d) n R",
        g0_range_ok(max_g0, d, n, &params.radius),
        "exact",
        format!("max {max_g0}"),
    ));
    checks.push(InvariantCheck::new(
        "reduced basis within theta_d bound",
        frame.reduced.theta_bound_holds,
        "report",
        if frame.reduced.fallback_used { "short-vector refinement used" } else { "" },
    ));

    // Rotation algebra.
    let y = &frame.basis().vectors;
    let delta_ok = frame.rotated.iter().enumerate().all(|(i, g)| {
        y.iter().enumerate().all(|(j, yj)| g.dot_kernel(yj) == if i == j { Q::one() } else { Q::zero() })
    });
    checks.push(InvariantCheck::new("a_i . y_j = delta_ij", delta_ok, "exact", ""));
    let unit_ok = frame.rotated.iter().all(|g| g.vector_norm_sq() == Q::one());
    checks.push(InvariantCheck::new("|a_i|^2 = 1", unit_ok, "exact", ""));
    let det_q = rotation_determinant(&frame);
    checks.push(InvariantCheck::new("det[a0; a_1; ...] != 0", !det_q.is_zero(), "exact", format_q(&det_q)));

    // Slice frames for every occupied level, with offsets and Property C.
    let mut by_slice: BTreeMap<i64, Vec<&Vec<i64>>> = BTreeMap::new();
    for (x, &k) in h.points.iter().zip(&g0s) {
        by_slice.entry(k as i64).or_default().push(x);
    }
    let slice_results: Vec<Result<(bool, bool)>> = by_slice
        .par_iter()
        .map(|(&k, xs)| {
            let sf = slice_frame(k, &frame)?;
            let eps_ok = sf.eps.iter().all(in_half_open_unit);
            let c_ok = xs.iter().all(|x| {
                let coords = slice_coordinates(&frame, &sf, x);
                frame.rotated.iter().zip(&sf.eps).enumerate().all(|(i, (g, e))| {
                    let diff = g.eval(x).sub(e);
                    let int_ok = surd_is_integer(&diff);
                    let coord_ok = match &coords {
                        Ok(c) => g.eval(x) == e.add_q(&qi(c[i])) || diff.sub(&SurdScalar::rational(qi(c[i]))).is_zero(),
                        Err(_) => false,
                    };
                    int_ok && coord_ok
                })
            });
            Ok((eps_ok, c_ok))
        })
        .collect();
    let slice_results = slice_results.into_iter().collect::<Result<Vec<_>>>()?;
    checks.push(InvariantCheck::new(
        "eps_ik in (-1/2, 1/2]",
        slice_results.iter().all(|r| r.0),
        "exact",
        format!("{} slices", slice_results.len()),
    ));
    checks.push(InvariantCheck::new(
        "Property C: g_i(x) - eps_ik integral on occupied slices",
        slice_results.iter().all(|r| r.1),
        "exact",
        format!("{} points", h.points.len()),
    ));
    if opts.slice_samples > 0 {
        checks.push(slice_identity_check(&frame, max_g0 as i64, n as i64, opts.slice_samples, opts.seed)?);
    }

    // Property A and the pulses.
    let consts = peak_constants(params);
    let b0_ok = Q::from_integer(BigInt::from(max_g0)) <= consts.b0;
    checks.push(InvariantCheck::new("Property A: g0(H) ⊆ [0, b0]", b0_ok && min_g0 >= 0, "exact", ""));
    let values: Vec<Vec<SurdScalar>> =
        frame.rotated.iter().map(|g| h.points.iter().map(|x| g.eval(x)).collect()).collect();
    let mut bound_misses = Vec::new();
    let mut inflation = 0u32;
    for (i, vals) in values.iter().enumerate() {
        let over_b = vals.iter().any(|v| v.add_q(&-consts.b.clone()).sign() == Ordering::Greater);
        if over_b {
            return Err(Error::BoundMiss(format!("g_{} exceeds b = {}", i + 1, format_q(&consts.b))));
        }
        let min_v = vals.iter().min_by(|x, y| x.cmp_value(y)).unwrap();
        let mut j = 0u32;
        while min_v.add_q(&(&consts.a * qi(1i64 << j))).sign() == Ordering::Less {
            j += 1;
        }
        if j > 0 {
            bound_misses.push(format!("g_{} min {:.3} below -a = -{:.3}", i + 1, min_v.to_f64(), to_f64(&consts.a)));
        }
        inflation = inflation.max(j);
    }
    checks.push(InvariantCheck::new(
        "Property A: g_i(H) ⊆ [-a, b]",
        bound_misses.is_empty(),
        "report",
        if bound_misses.is_empty() { String::new() } else { format!("BOUND_MISS x{}", bound_misses.len()) },
    ));
    if inflation > 0 && !opts.adaptive {
        return Err(Error::BoundMiss(bound_misses.join("; ")));
    }
    let a = &consts.a * qi(1i64 << inflation);
    let (f0, r0) = cached_pulse(format!("f0 {} {}", consts.b0, consts.m0), &opts.cert, || {
        build_f0(&consts.b0, &consts.m0)
    })?;
    let (f, rf) = cached_pulse(format!("f {} {} {}", a, consts.b, consts.m), &opts.cert, || {
        build_fpulse(&a, &consts.b, &consts.m, &opts.cert)
    })?;
    let pulses = vec![r0, rf];
    if !pulses.iter().all(|p| p.passed) {
        return Err(Error::Construction { step: "pulses".into(), detail: "pulse certification failed".into() });
    }

    let mut factors = vec![Factor { pulse: f0, direction: frame.g0.clone() }];
    for g in &frame.rotated {
        factors.push(Factor { pulse: f.clone(), direction: g.clone() });
    }
    let product = PeakProduct::new(
        d,
        n,
        frame.h.clone(),
        factors,
        PeakParams::Lattice {
            direction: params.clone(),
            b0: consts.b0.clone(),
            m0: consts.m0.clone(),
            a: a.clone(),
            b: consts.b.clone(),
            m: consts.m.clone(),
            a_inflation: inflation,
        },
    );
    checks.push(envelope_on_values(&product, &h.points, &consts.m0, &consts.m));

    let report = PipelineReport {
        checks,
        pulses,
        a_inflation: inflation,
        bound_misses,
        directions: ndirs,
        slices: by_slice.len(),
    };
    Ok(PeakBuild { product, report, tangent: Some(t), frame: Some(frame) })
}

/// `det[a₀; a_1; …] = Π ν_i · det[a₀; h_1; …]`, since each `a_i` is `μ_i a₀ + ν_i h_i`.
pub(crate) fn rotation_determinant(frame: &LatticeFrame) -> Q {
    let mut rows = vec![frame.a0.iter().map(|&x| qi(x)).collect::<Vec<Q>>()];
    rows.extend(frame.heights.h.iter().cloned());
    let nus = frame.rotated.iter().fold(Q::one(), |acc, g| match &g.kind {
        DirKind::Rotated { nu, .. } => acc * nu,
        DirKind::Integral => acc,
    });
    det(&rows) * nus
}

/// `g_i(o_k + Σ c_j y_j) = ε_ik + c_i` on random slice-lattice points.
fn slice_identity_check(frame: &LatticeFrame, max_k: i64, n: i64, samples: usize, seed: u64) -> Result<InvariantCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x51ce);
    let y = frame.basis().vectors.clone();
    let mut ok = true;
    for _ in 0..samples {
        let k = rng.gen_range(0..=max_k.max(1));
        let sf = slice_frame(k, frame)?;
        let c: Vec<i64> = (0..y.len()).map(|_| rng.gen_range(-n..=n)).collect();
        let mut x = sf.origin.clone();
        for (cj, yj) in c.iter().zip(&y) {
            for (xi, &v) in x.iter_mut().zip(yj) {
                *xi += cj * v;
            }
        }
        ok &= frame.g0.g0(&x) == k as i128;
        for (i, g) in frame.rotated.iter().enumerate() {
            ok &= g.eval(&x).sub(&sf.eps[i].add_q(&qi(c[i]))).is_zero();
        }
        ok &= slice_coordinates(frame, &sf, &x)? == c;
    }
    Ok(InvariantCheck::new("g_i(x) = c_i + eps_ik on slice lattices", ok, "exact", format!("{samples} random points")))
}

/// `|f₀(g₀(x))| <= min(m₀, 1/g₀²)` and `|f(g_i(x))| < min(4m, 1/g_i²)` on `H ∖ h`.
fn envelope_on_values(p: &PeakProduct, points: &[Vec<i64>], m0: &Q, m: &Q) -> InvariantCheck {
    let ev = p.evaluator();
    let (m0f, cap) = (to_f64(m0), 4.0 * to_f64(m));
    let ok = points.par_iter().filter(|x| **x != p.h).all(|x| {
        p.factors.iter().enumerate().all(|(i, f)| {
            let v = ev.factor_abs(i, x).hi;
            let g2 = f.direction.eval(x).to_fast().square().hi;
            let scaled = v * g2;
            if i == 0 {
                v <= m0f && scaled.next_up() <= 1.0
            } else {
                v < cap && scaled.next_up() < 1.0
            }
        })
    });
    InvariantCheck::new("pulse envelopes on g_i(H)", ok, "interval", format!("{} points", points.len() - 1))
}

#[derive(Clone, Debug)]
pub struct LpPeakOptions {
    /// Target for `Σ_{x ∈ H∖h} |p(x)|`.
    pub slack: Q,
    pub degree_cap: usize,
    pub verify: VerifyMode,
}

impl Default for LpPeakOptions {
    fn default() -> Self {
        LpPeakOptions { slack: Q::new(BigInt::one(), BigInt::from(2)), degree_cap: 256, verify: VerifyMode::Auto }
    }
}

/// Per-factor LP pulses on the value multisets `g_i(H ∖ h)`: factor `i`
/// minimizes `Σ_x w_x |f_i(g_i(x))|` with `w_x = Π_{j<i} |f_j(g_j(x))|`, so the
/// last objective is the product sum itself. The common degree is the
/// smallest (by doubling then bisection) whose product certifies.
pub fn construct_peak_lp(
    points: &PointSet,
    h: &[i64],
    directions: Vec<DirectionFunction>,
    label: &str,
    opts: &LpPeakOptions,
) -> Result<PeakProduct> {
    let (d, n) = (points.d, points.n);
    if !points.points.iter().any(|x| x == h) {
        return Err(Error::Invalid(format!("peak point {h:?} is not in H")));
    }
    if directions.iter().any(|g| !g.eval(h).is_zero()) {
        return Err(Error::Invalid("directions must vanish at the peak point".into()));
    }
    let params = PeakParams::Lp { slack: opts.slack.clone(), directions: label.into() };
    let rest: Vec<&Vec<i64>> = points.points.iter().filter(|x| x.as_slice() != h).collect();
    if rest.is_empty() {
        return Ok(PeakProduct::trivial(d, n, h.to_vec()));
    }
    let values: Vec<Vec<SurdScalar>> =
        directions.iter().map(|g| rest.iter().map(|x| g.eval(x)).collect()).collect();
    let slack_f = to_f64(&opts.slack);
    let attempt = |degree: usize| -> Option<PeakProduct> {
        let mut w = vec![1.0f64; rest.len()];
        let mut factors = Vec::new();
        for (g, vals) in directions.iter().zip(&values) {
            let f = weighted_factor(vals, &w, degree, rest.len(), &opts.slack)?;
            let ev = f.evaluator();
            for (wx, v) in w.iter_mut().zip(vals) {
                *wx *= ev.enclose(v.to_fast()).abs().hi;
            }
            factors.push(Factor { pulse: f, direction: g.clone() });
        }
        let total: f64 = w.iter().sum();
        if !(total <= slack_f) {
            return None;
        }
        let p = PeakProduct::new(d, n, h.to_vec(), factors, params.clone());
        let v = verify_peak_with(&p, &points.points, VerifyMode::Interval).ok()?;
        v.certified().then_some(p)
    };
    let mut lo = 0usize;
    let mut hi = 1usize;
    let mut best = loop {
        if let Some(p) = attempt(hi) {
            break p;
        }
        lo = hi;
        if hi >= opts.degree_cap {
            return Err(Error::LpInfeasible(format!("no certified product up to degree {} per factor", opts.degree_cap)));
        }
        hi = (hi * 2).min(opts.degree_cap);
    };
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        match attempt(mid) {
            Some(p) => {
                best = p;
                hi = mid;
            }
            None => lo = mid,
        }
    }
    let v = verify_peak_with(&best, &points.points, opts.verify)?;
    if !v.certified() {
        return Err(Error::Construction { step: "lp verify".into(), detail: format!("{:?}", v.status) });
    }
    Ok(best)
}

fn weighted_factor(vals: &[SurdScalar], w: &[f64], degree: usize, count: usize, slack: &Q) -> Option<PulsePolynomial> {
    let mut groups: BTreeMap<u64, (f64, f64)> = BTreeMap::new();
    for (v, &wx) in vals.iter().zip(w) {
        let x = v.to_f64();
        let key = if x == 0.0 { 0 } else { x.to_bits() };
        let e = groups.entry(key).or_insert((x, 0.0));
        e.1 += wx.max(1e-12);
    }
    let xs: Vec<f64> = groups.values().map(|g| g.0).collect();
    let ws: Vec<f64> = groups.values().map(|g| g.1).collect();
    let lo = xs.iter().copied().fold(0.0f64, f64::min);
    let hi = xs.iter().copied().fold(0.0f64, f64::max);
    let fit = lp_solve(&xs, &ws, None, degree, lo, hi)?;
    let (lo_q, hi_q) = (from_f64_exact(lo), from_f64_exact(hi));
    lp_candidate(&fit, &lo_q, &hi_q, PulseParams::Points { count, slack: slack.clone() })
}
