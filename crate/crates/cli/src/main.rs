use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use hyperdeck::error::{Error, Result};
use hyperdeck::hypermatrix::{deck, sum_deck_direct, sum_deck_via_beta, sum_deck_via_gamma, DeckMode, Hypermatrix};
use hyperdeck::lattice::{DirectionParams, PointSet};
use hyperdeck::oracle::{counting_threshold, find_collision, kappa_exact, MapMode};
use hyperdeck::peak::{
    construct_peak_d, construct_peak_lp, degree_report, lattice_directions, slice_sums, verify_peak_with,
    LpPeakOptions, PeakOptions, PeakProduct, PeakVerdict, VerifyMode,
};
use hyperdeck::planar::{construct_peak_2, PlanarOptions};

#[derive(Parser)]
#[command(name = "hyperdeck", version, about = "Deck reconstruction and certified peak polynomials")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Full,
    Principal,
}

impl From<Mode> for DeckMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Full => DeckMode::Full,
            Mode::Principal => DeckMode::Principal,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Map {
    Deck,
    PrincipalDeck,
    Sum,
    PrincipalSum,
}

impl From<Map> for MapMode {
    fn from(m: Map) -> Self {
        match m {
            Map::Deck => MapMode::Deck,
            Map::PrincipalDeck => MapMode::PrincipalDeck,
            Map::Sum => MapMode::Sum,
            Map::PrincipalSum => MapMode::PrincipalSum,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SumMethod {
    Direct,
    Basis,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    /// Lattice pipeline with closed-form pulses (d >= 3).
    Pipeline,
    /// Lattice directions with LP-fitted pulses (d >= 3).
    Lp,
}

#[derive(Clone, Copy, ValueEnum)]
enum Verify {
    Auto,
    Exact,
    Interval,
}

impl From<Verify> for VerifyMode {
    fn from(v: Verify) -> Self {
        match v {
            Verify::Auto => VerifyMode::Auto,
            Verify::Exact => VerifyMode::Exact,
            Verify::Interval => VerifyMode::Interval,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Planar,
    Lattice,
    Lp,
}

#[derive(Subcommand)]
enum Cmd {
    /// Multiset of k-subarrays of a hypermatrix file.
    Deck {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value = "full")]
        mode: Mode,
    },
    /// Entrywise sum of the k-deck.
    Sum {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value = "full")]
        mode: Mode,
        #[arg(long, value_enum, default_value = "direct")]
        method: SumMethod,
    },
    /// Searches for two hypermatrices with the same image.
    Collide {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value = "deck")]
        mode: Map,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
    },
    /// Exact reconstruction threshold by exhaustive search.
    Kappa {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum, default_value = "deck")]
        mode: Map,
    },
    /// Counting lower bound on the reconstruction threshold.
    Threshold {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum, default_value = "sum")]
        mode: Map,
    },
    /// Builds a certified peak polynomial for a point set.
    Construct {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        n: u64,
        /// Expected dimension; must match the file.
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, value_enum, default_value = "pipeline")]
        method: Method,
        #[arg(long, value_enum, default_value = "auto")]
        verify: Verify,
        /// Write the product alone to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-verifies a serialized peak product against a point set.
    Verify {
        /// Product JSON, or a `construct` report containing one.
        #[arg(long)]
        peak: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value = "auto")]
        verify: Verify,
    },
    /// Planar construction on a point set in [n]^2.
    Planar {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1.001)]
        t: f64,
    },
    /// Runs a construction on random point sets and summarizes.
    Survey {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 10)]
        runs: usize,
        #[arg(long, default_value_t = 100)]
        size: usize,
    },
}

#[derive(Serialize)]
struct Outcome {
    check: String,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    margin: Option<[String; 2]>,
}

impl Outcome {
    fn new(check: &str, passed: bool) -> Self {
        Outcome { check: check.into(), passed, margin: None }
    }

    fn verdict(check: &str, v: &PeakVerdict) -> Self {
        Outcome { check: check.into(), passed: v.certified(), margin: Some(v.margin.clone()) }
    }
}

#[derive(Serialize)]
struct RunReport {
    subcommand: String,
    inputs_digest: String,
    seed: u64,
    outcomes: Vec<Outcome>,
    result: Value,
    timings: BTreeMap<String, f64>,
}

struct Run {
    digest: Sha256,
    outcomes: Vec<Outcome>,
    timings: BTreeMap<String, f64>,
}

impl Run {
    fn read(&mut self, path: &Path) -> Result<String> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        self.digest.update(text.as_bytes());
        Ok(text)
    }

    fn arg(&mut self, s: String) {
        self.digest.update(s.as_bytes());
        self.digest.update([0]);
    }

    fn timed<T>(&mut self, label: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.timings.insert(label.into(), t.elapsed().as_secs_f64());
        out
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn points_of(run: &mut Run, path: &Path, n: u64, d: Option<usize>) -> Result<PointSet> {
    let h = PointSet::parse(&run.read(path)?, n)?;
    if let Some(d) = d {
        if d != h.d {
            return Err(Error::Invalid(format!("--d {d} but the file has dimension {}", h.d)));
        }
    }
    Ok(h)
}

fn construct_d(run: &mut Run, h: &PointSet, method: Method, verify: VerifyMode, seed: u64) -> Result<Value> {
    let (product, extra) = match method {
        Method::Pipeline => {
            let opts = PeakOptions { seed, ..Default::default() };
            let b = run.timed("construct", || construct_peak_d(h, &opts))?;
            for c in &b.report.checks {
                run.outcomes.push(Outcome::new(&c.name, c.passed));
            }
            (b.product, json!({ "report": b.report, "tangent": b.tangent }))
        }
        Method::Lp => {
            let params = DirectionParams::new(h.n, h.d)?;
            let p = run.timed("construct", || -> Result<PeakProduct> {
                let (_, frame, _) = lattice_directions(h, &params, seed, None)?;
                let mut dirs = vec![frame.g0.clone()];
                dirs.extend(frame.rotated.iter().cloned());
                construct_peak_lp(h, &frame.h, dirs, "lattice", &LpPeakOptions { verify, ..Default::default() })
            })?;
            (p, json!({}))
        }
    };
    let verdict = run.timed("verify", || verify_peak_with(&product, &h.points, verify))?;
    run.outcomes.push(Outcome::verdict("peak", &verdict));
    Ok(json!({
        "product": product,
        "verdict": verdict,
        "degree": degree_report(&product),
        "slices": slice_sums(&product, &h.points),
        "details": extra,
    }))
}

fn construct_2(run: &mut Run, h: &PointSet, t: f64, verify: VerifyMode) -> Result<Value> {
    let b = run.timed("construct", || construct_peak_2(h, &PlanarOptions { t }))?;
    let r = &b.report;
    run.outcomes.push(Outcome::new("pigeonhole", r.pigeonhole));
    run.outcomes.push(Outcome::new("injective", r.injective));
    run.outcomes.push(Outcome::new("ranges", r.ranges_ok));
    run.outcomes.push(Outcome::new("edges_decompose", r.edges_decompose));
    let verdict = run.timed("verify", || verify_peak_with(&b.product, &h.points, verify))?;
    run.outcomes.push(Outcome::verdict("peak", &verdict));
    Ok(json!({
        "product": b.product,
        "verdict": verdict,
        "degree": degree_report(&b.product),
        "directions": { "h": b.directions.h, "u1": b.directions.u1, "u2": b.directions.u2 },
        "report": b.report,
    }))
}

fn load_product(text: &str) -> Result<PeakProduct> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let inner = v.pointer("/result/product").or_else(|| v.get("product")).unwrap_or(&v);
    serde_json::from_value(inner.clone()).map_err(|e| Error::Parse(e.to_string()))
}

#[derive(Serialize, Default)]
struct Summary {
    runs: usize,
    certified: usize,
    degree_min: Option<usize>,
    degree_max: Option<usize>,
    degree_mean: f64,
    bound: f64,
    within_bound: usize,
    errors: BTreeMap<String, usize>,
}

fn survey(run: &mut Run, suite: Suite, n: u64, runs: usize, size: usize, seed: u64) -> Result<Value> {
    let d = match suite {
        Suite::Planar => 2,
        Suite::Lattice | Suite::Lp => 3,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = Summary { runs, bound: hyperdeck::peak::degree_bound(d, n), ..Default::default() };
    let mut degrees = Vec::new();
    let t = Instant::now();
    for i in 0..runs {
        let h = PointSet::random(d, n, size, &mut rng)?;
        let built: Result<PeakProduct> = match suite {
            Suite::Planar => construct_peak_2(&h, &PlanarOptions::default()).map(|b| b.product),
            Suite::Lattice => construct_peak_d(&h, &PeakOptions { seed: seed + i as u64, ..Default::default() })
                .map(|b| b.product),
            Suite::Lp => DirectionParams::new(n, d).and_then(|params| {
                let (_, frame, _) = lattice_directions(&h, &params, seed + i as u64, None)?;
                let mut dirs = vec![frame.g0.clone()];
                dirs.extend(frame.rotated.iter().cloned());
                construct_peak_lp(&h, &frame.h, dirs, "lattice", &LpPeakOptions::default())
            }),
        };
        match built.and_then(|p| verify_peak_with(&p, &h.points, VerifyMode::Auto).map(|v| (p, v))) {
            Ok((p, v)) => {
                s.certified += v.certified() as usize;
                s.within_bound += ((p.degree as f64) <= s.bound) as usize;
                degrees.push(p.degree);
            }
            Err(e) => *s.errors.entry(e.code().to_string()).or_insert(0) += 1,
        }
    }
    run.timings.insert("survey".into(), t.elapsed().as_secs_f64());
    s.degree_min = degrees.iter().min().copied();
    s.degree_max = degrees.iter().max().copied();
    if !degrees.is_empty() {
        s.degree_mean = degrees.iter().sum::<usize>() as f64 / degrees.len() as f64;
    }
    run.outcomes.push(Outcome::new("all_certified", s.certified == runs));
    Ok(to_value(&s))
}

fn dispatch(cli: &Cli, run: &mut Run) -> Result<(String, Value)> {
    let seed = cli.seed;
    Ok(match &cli.cmd {
        Cmd::Deck { input, k, mode } => {
            let a = Hypermatrix::parse(&run.read(input)?)?;
            run.arg(format!("deck {k} {:?}", DeckMode::from(*mode)));
            let dk = run.timed("deck", || deck(&a, *k, (*mode).into()))?;
            let entries: BTreeMap<&String, String> = dk.entries.iter().map(|(s, c)| (s, c.to_string())).collect();
            let v = json!({ "k": dk.k, "d": dk.d, "mode": dk.mode, "total": dk.total().to_string(), "entries": entries });
            ("deck".into(), v)
        }
        Cmd::Sum { input, k, mode, method } => {
            let a = Hypermatrix::parse(&run.read(input)?)?;
            let mode: DeckMode = (*mode).into();
            run.arg(format!("sum {k} {mode:?}"));
            let s = run.timed("sum", || match (method, mode) {
                (SumMethod::Direct, _) => sum_deck_direct(&a, *k, mode),
                (SumMethod::Basis, DeckMode::Full) => sum_deck_via_beta(&a, *k),
                (SumMethod::Basis, DeckMode::Principal) => sum_deck_via_gamma(&a, *k),
            })?;
            ("sum".into(), s.to_json())
        }
        Cmd::Collide { n, d, k, mode, budget } => {
            run.arg(format!("collide {n} {d} {k} {:?} {budget}", MapMode::from(*mode)));
            let r = run.timed("collide", || find_collision(*n, *d, *k, (*mode).into(), *budget, seed))?;
            ("collide".into(), to_value(&r))
        }
        Cmd::Kappa { n, d, mode } => {
            run.arg(format!("kappa {n} {d} {:?}", MapMode::from(*mode)));
            let r = run.timed("kappa", || kappa_exact(*n, *d, (*mode).into()))?;
            ("kappa".into(), to_value(&r))
        }
        Cmd::Threshold { n, d, mode } => {
            run.arg(format!("threshold {n} {d} {:?}", MapMode::from(*mode)));
            let r = run.timed("threshold", || counting_threshold(*n, *d, (*mode).into()))?;
            run.outcomes.push(Outcome::new("chain_holds", r.chain_holds));
            ("threshold".into(), to_value(&r))
        }
        Cmd::Construct { input, n, d, method, verify, out } => {
            let h = points_of(run, input, *n, *d)?;
            run.arg(format!("construct {n}"));
            let v = if h.d == 2 {
                construct_2(run, &h, PlanarOptions::default().t, (*verify).into())?
            } else {
                construct_d(run, &h, *method, (*verify).into(), seed)?
            };
            if let Some(path) = out {
                let text = serde_json::to_string_pretty(&v["product"]).expect("serializable");
                std::fs::write(path, text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
            }
            ("construct".into(), v)
        }
        Cmd::Verify { peak, input, n, verify } => {
            let p = load_product(&run.read(peak)?)?;
            let h = points_of(run, input, *n, Some(p.d))?;
            run.arg(format!("verify {n}"));
            let v = run.timed("verify", || verify_peak_with(&p, &h.points, (*verify).into()))?;
            run.outcomes.push(Outcome::verdict("peak", &v));
            ("verify".into(), json!({ "verdict": v, "degree": degree_report(&p) }))
        }
        Cmd::Planar { input, n, t } => {
            let h = points_of(run, input, *n, Some(2))?;
            run.arg(format!("planar {n} {t}"));
            ("planar".into(), construct_2(run, &h, *t, VerifyMode::Auto)?)
        }
        Cmd::Survey { suite, n, runs, size } => {
            run.arg(format!("survey {} {n} {runs} {size}", *suite as u8));
            ("survey".into(), survey(run, *suite, *n, *runs, *size, seed)?)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        // Only fails if a pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
    let mut run = Run { digest: Sha256::new(), outcomes: Vec::new(), timings: BTreeMap::new() };
    run.arg(format!("seed {}", cli.seed));
    match dispatch(&cli, &mut run) {
        Ok((subcommand, result)) => {
            let ok = run.outcomes.iter().all(|o| o.passed);
            let report = RunReport {
                subcommand,
                inputs_digest: format!("{:x}", run.digest.finalize()),
                seed: cli.seed,
                outcomes: run.outcomes,
                result,
                timings: run.timings,
            };
            println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let v = json!({ "error": { "code": e.code(), "message": e.to_string() } });
            println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
            ExitCode::from(2)
        }
    }
}
