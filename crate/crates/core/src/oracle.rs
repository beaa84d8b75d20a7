//! Brute-force ground truth: exact κ values, collision search, the counting
//! threshold and moment sums against deck differences.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypermatrix::deck::{member_from_key, member_offsets};
use crate::hypermatrix::{
    deck, index_tuples, member_count, sum_deck_direct, sum_deck_via_beta, sum_deck_via_gamma, DeckMode,
    DifferenceMatrix, Hypermatrix, IntArray,
};
use crate::numerics::{binomial, Q};

/// Which reconstruction map is examined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapMode {
    Deck,
    PrincipalDeck,
    Sum,
    PrincipalSum,
}

impl MapMode {
    pub const ALL: [MapMode; 4] = [MapMode::Deck, MapMode::PrincipalDeck, MapMode::Sum, MapMode::PrincipalSum];

    pub fn deck_mode(self) -> DeckMode {
        match self {
            MapMode::Deck | MapMode::Sum => DeckMode::Full,
            MapMode::PrincipalDeck | MapMode::PrincipalSum => DeckMode::Principal,
        }
    }

    pub fn is_sum(self) -> bool {
        matches!(self, MapMode::Sum | MapMode::PrincipalSum)
    }
}

impl std::str::FromStr for MapMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "deck" => Ok(MapMode::Deck),
            "principal-deck" => Ok(MapMode::PrincipalDeck),
            "sum" => Ok(MapMode::Sum),
            "principal-sum" => Ok(MapMode::PrincipalSum),
            _ => Err(Error::Parse(format!("unknown mode {s:?}"))),
        }
    }
}

/// Upper bound on `2^{n^d} · (work per image)` for exhaustive runs.
pub const EXHAUSTIVE_WORK_BUDGET: f64 = 2.0e10;
/// Largest `n^d` treated exhaustively by [`find_collision`].
pub const EXHAUSTIVE_ENTRY_LIMIT: usize = 20;

/// Precomputed data turning a bit pattern into an image key quickly.
enum KeyPlan {
    /// Images of unit hypermatrices; the sum map is linear.
    Sum { units: Vec<Vec<i64>> },
    /// Parent offsets of every deck member.
    Deck { members: Vec<Vec<usize>> },
}

impl KeyPlan {
    fn new(n: usize, d: usize, k: usize, mode: MapMode) -> Result<Self> {
        let total = n.pow(d as u32);
        if mode.is_sum() {
            let mut units = Vec::with_capacity(total);
            for j in 0..total {
                let mut bits = vec![0u8; total];
                bits[j] = 1;
                let e = Hypermatrix::new(d, n, bits)?;
                let s = sum_deck_direct(&e, k, mode.deck_mode())?;
                units.push(
                    s.entries
                        .iter()
                        .map(|v| v.to_i64().ok_or_else(|| Error::TooLarge("deck sum entry overflows i64".into())))
                        .collect::<Result<Vec<i64>>>()?,
                );
            }
            Ok(KeyPlan::Sum { units })
        } else {
            if k.pow(d as u32) > 64 {
                return Err(Error::TooLarge("sub-hypermatrix does not fit a 64-bit code".into()));
            }
            Ok(KeyPlan::Deck { members: member_offsets(n, d, k, mode.deck_mode()) })
        }
    }

    fn work(&self) -> f64 {
        match self {
            KeyPlan::Sum { units } => units.len() as f64 * units.first().map_or(1, |u| u.len()) as f64,
            KeyPlan::Deck { members } => {
                let per = members.first().map_or(1, |m| m.len()) as f64;
                members.len() as f64 * per * (1.0 + (members.len() as f64).log2().max(1.0) / per)
            }
        }
    }

    fn key(&self, bits: &[u8]) -> Vec<u64> {
        match self {
            KeyPlan::Sum { units } => {
                let mut acc = vec![0i64; units[0].len()];
                for (j, u) in units.iter().enumerate() {
                    if bits[j] == 1 {
                        for (a, v) in acc.iter_mut().zip(u) {
                            *a += v;
                        }
                    }
                }
                acc.into_iter().map(|v| v as u64).collect()
            }
            KeyPlan::Deck { members } => {
                let mut codes: Vec<u64> = members
                    .iter()
                    .map(|offs| offs.iter().enumerate().fold(0u64, |c, (p, &o)| c | ((bits[o] as u64) << p)))
                    .collect();
                codes.sort_unstable();
                codes
            }
        }
    }
}

fn bits_of_index(index: u64, len: usize) -> Vec<u8> {
    (0..len).map(|j| ((index >> j) & 1) as u8).collect()
}

fn bit_string(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
}

/// Exhaustively searches `{0,1}^{n^d}` for two hypermatrices with the same
/// image; returns the first colliding pair in (key, index) order.
fn exhaustive_collision(n: usize, d: usize, k: usize, mode: MapMode) -> Result<Option<(u64, u64)>> {
    let len = n.pow(d as u32);
    if len > 30 {
        return Err(Error::TooLarge(format!("2^{len} hypermatrices cannot be enumerated")));
    }
    let plan = KeyPlan::new(n, d, k, mode)?;
    let total = 1u64 << len;
    if total as f64 * plan.work() > EXHAUSTIVE_WORK_BUDGET {
        return Err(Error::Budget(format!("exhaustive search over 2^{len} hypermatrices at k={k}")));
    }
    let mut keyed: Vec<(Vec<u64>, u64)> =
        (0..total).into_par_iter().map(|idx| (plan.key(&bits_of_index(idx, len)), idx)).collect();
    keyed.par_sort_unstable();
    Ok(keyed.windows(2).find(|w| w[0].0 == w[1].0).map(|w| (w[0].1, w[1].1)))
}

/// Image of a hypermatrix under a mode's map, as a comparable key.
pub fn image_key(a: &Hypermatrix, k: usize, mode: MapMode) -> Result<Vec<String>> {
    Ok(match mode {
        MapMode::Sum => sum_deck_via_beta(a, k)?.entries.iter().map(|e| e.to_string()).collect(),
        MapMode::PrincipalSum => sum_deck_via_gamma(a, k)?.entries.iter().map(|e| e.to_string()).collect(),
        MapMode::Deck | MapMode::PrincipalDeck => deck(a, k, mode.deck_mode())?
            .entries
            .into_iter()
            .map(|(key, m)| format!("{key}:{m}"))
            .collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionReport {
    pub mode: MapMode,
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub exhaustive: bool,
    /// Number of hypermatrices examined.
    pub examined: u64,
    pub seed: Option<u64>,
    /// Colliding pair as row-major bit strings.
    pub pair: Option<(String, String)>,
}

/// Searches for `A != B` with the same image. Exhaustive when `n^d <= 20`
/// and the work fits the budget, otherwise samples `budget` random
/// hypermatrices from a seeded generator.
pub fn find_collision(n: usize, d: usize, k: usize, mode: MapMode, budget: u64, seed: u64) -> Result<CollisionReport> {
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    let len = n
        .checked_pow(d as u32)
        .ok_or_else(|| Error::TooLarge("n^d overflows".into()))?;
    if len <= EXHAUSTIVE_ENTRY_LIMIT {
        match exhaustive_collision(n, d, k, mode) {
            Ok(found) => {
                return Ok(CollisionReport {
                    mode,
                    n,
                    d,
                    k,
                    exhaustive: true,
                    examined: 1u64 << len,
                    seed: None,
                    pair: found.map(|(a, b)| (bit_string(&bits_of_index(a, len)), bit_string(&bits_of_index(b, len)))),
                })
            }
            Err(Error::Budget(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: HashMap<Vec<String>, Vec<u8>> = HashMap::new();
    let mut examined = 0u64;
    let mut pair = None;
    while examined < budget {
        let bits: Vec<u8> = (0..len).map(|_| rng.gen_range(0..2u8)).collect();
        examined += 1;
        let a = Hypermatrix::new(d, n, bits.clone())?;
        let key = image_key(&a, k, mode)?;
        match seen.get(&key) {
            Some(prev) if *prev != bits => {
                pair = Some((bit_string(prev), bit_string(&bits)));
                break;
            }
            Some(_) => {}
            None => {
                seen.insert(key, bits);
            }
        }
    }
    Ok(CollisionReport { mode, n, d, k, exhaustive: false, examined, seed: Some(seed), pair })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KappaResult {
    pub mode: MapMode,
    pub n: usize,
    pub d: usize,
    pub kappa: usize,
    /// Distinct pair with equal image at `kappa - 1`, as bit strings.
    pub witness: Option<(String, String)>,
    /// Injectivity was also confirmed at every `l > kappa`.
    pub monotone_checked: bool,
    pub seed: Option<u64>,
}

/// Exact smallest `k` with an injective map, by exhaustive enumeration.
pub fn kappa_exact(n: usize, d: usize, mode: MapMode) -> Result<KappaResult> {
    kappa_exact_with(n, d, mode, true)
}

pub fn kappa_exact_with(n: usize, d: usize, mode: MapMode, check_monotone: bool) -> Result<KappaResult> {
    let len = n
        .checked_pow(d as u32)
        .ok_or_else(|| Error::TooLarge("n^d overflows".into()))?;
    if len > EXHAUSTIVE_ENTRY_LIMIT {
        return Err(Error::TooLarge(format!("n^d = {len} exceeds the exhaustive limit {EXHAUSTIVE_ENTRY_LIMIT}")));
    }
    let mut witness = None;
    let mut kappa = None;
    for k in 1..=n {
        match exhaustive_collision(n, d, k, mode)? {
            Some((a, b)) => {
                if let Some(found) = kappa {
                    return Err(Error::Invalid(format!(
                        "injective at k={found} but not at k={k}: monotonicity violated"
                    )));
                }
                let (ba, bb) = (bits_of_index(a, len), bits_of_index(b, len));
                let (ha, hb) = (Hypermatrix::new(d, n, ba.clone())?, Hypermatrix::new(d, n, bb.clone())?);
                if ha == hb || image_key(&ha, k, mode)? != image_key(&hb, k, mode)? {
                    return Err(Error::Invalid("witness failed independent verification".into()));
                }
                witness = Some((bit_string(&ba), bit_string(&bb)));
            }
            None => {
                if kappa.is_none() {
                    kappa = Some(k);
                    if !check_monotone {
                        break;
                    }
                }
            }
        }
    }
    let kappa = kappa.ok_or_else(|| Error::Invalid("map at k=n must be injective".into()))?;
    Ok(KappaResult { mode, n, d, kappa, witness, monotone_checked: check_monotone, seed: None })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub n: usize,
    pub d: usize,
    pub mode: MapMode,
    /// Floor of `n^{d/(d+1)} / (d·log2(n+1))^{1/(d+1)}`.
    pub k: usize,
    /// Whether `(C^d + 1)^{k^d} < 2^{n^d}` (or `(C + 1)^{k^d}` in principal
    /// mode), `C = C(n,k)`, holds exactly at the returned `k`.
    pub chain_holds: bool,
    /// Same inequality at `k + 1`, for context.
    pub chain_holds_next: bool,
}

/// Certified bounds on `log2(x)` for a positive big integer.
fn log2_bounds(x: &BigUint) -> (f64, f64) {
    let bits = x.bits();
    if bits <= 53 {
        let v = x.to_f64().unwrap().log2();
        return (v - 1e-12 * v.abs().max(1.0), v + 1e-12 * v.abs().max(1.0));
    }
    let shift = bits - 53;
    let top = (x >> shift).to_f64().unwrap();
    let lo = top.log2() + shift as f64;
    let hi = (top + 1.0).log2() + shift as f64;
    (lo - 1e-12 * lo, hi + 1e-12 * hi)
}

/// Decides `x^e < 2^m` exactly.
fn pow_lt_pow2(x: &BigUint, e: u64, m: u64) -> bool {
    let (lo, hi) = log2_bounds(x);
    if hi * (e as f64) < m as f64 {
        return true;
    }
    if lo * (e as f64) > m as f64 {
        return false;
    }
    let exact = num_traits::pow(x.clone(), e as usize);
    exact.bits() <= m && exact < (BigUint::one() << m)
}

/// Counting inequality `(C(n,k)^d + 1)^{k^d} < 2^{n^d}` (principal: `C(n,k) + 1`).
pub fn counting_chain_holds(n: usize, d: usize, k: usize, mode: MapMode) -> bool {
    let c = binomial(n as u64, k as u64);
    let base = match mode.deck_mode() {
        DeckMode::Full => num_traits::pow(c, d) + 1u32,
        DeckMode::Principal => c + 1u32,
    };
    pow_lt_pow2(&base, (k as u64).pow(d as u32), (n as u64).pow(d as u32))
}

/// Largest `k` with `k^{d+1} · d · log2(n+1) <= n^d`.
fn threshold_floor(n: usize, d: usize) -> usize {
    let l = ((n + 1) as f64).log2() * d as f64;
    let nd = (n as f64).powi(d as i32);
    let mut k = (nd / l).powf(1.0 / (d as f64 + 1.0)).floor() as usize;
    let fits = |k: usize| ((k as f64).powi(d as i32 + 1) * l) <= nd;
    while k > 0 && !fits(k) {
        k -= 1;
    }
    while fits(k + 1) {
        k += 1;
    }
    k
}

pub fn counting_threshold(n: usize, d: usize, mode: MapMode) -> Result<ThresholdReport> {
    if n < 2 || d < 1 {
        return Err(Error::Invalid("counting threshold needs n >= 2 and d >= 1".into()));
    }
    if !mode.is_sum() {
        return Err(Error::Invalid("counting threshold is defined for sum modes".into()));
    }
    let k = threshold_floor(n, d);
    Ok(ThresholdReport {
        n,
        d,
        mode,
        k,
        chain_holds: k == 0 || counting_chain_holds(n, d, k, mode),
        chain_holds_next: k + 1 <= n && counting_chain_holds(n, d, k + 1, mode),
    })
}

/// Checks that merging the `k`-decks of all members of the `l`-deck gives
/// `C(n-k, l-k)^d` (principal: `C(n-k, l-k)`) copies of the `k`-deck.
pub fn refinement_check(a: &Hypermatrix, k: usize, l: usize, mode: DeckMode) -> Result<bool> {
    if k == 0 || k > l || l > a.n {
        return Err(Error::Invalid(format!("need 1 <= k <= l <= n, got k={k}, l={l}, n={}", a.n)));
    }
    let outer = deck(a, l, mode)?;
    let mut merged = crate::hypermatrix::Deck {
        k,
        d: a.d,
        mode,
        entries: Default::default(),
    };
    for (key, mult) in &outer.entries {
        let member = member_from_key(key, l, a.d)?;
        merged.merge(&deck(&member, k, mode)?.scaled(mult));
    }
    let c = binomial((a.n - k) as u64, (l - k) as u64);
    let factor = match mode {
        DeckMode::Full => num_traits::pow(c, a.d),
        DeckMode::Principal => c,
    };
    Ok(merged == deck(a, k, mode)?.scaled(&factor))
}

/// Multivariate polynomial with rational coefficients, as a term list.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MultiPoly {
    pub vars: usize,
    pub terms: Vec<(Vec<u32>, Q)>,
}

impl MultiPoly {
    pub fn constant(vars: usize, c: Q) -> Self {
        MultiPoly { vars, terms: vec![(vec![0; vars], c)] }
    }

    /// `∏_j f_j(x_j)` for univariate coefficient lists `f_j` (lowest degree first).
    pub fn product_of_univariates(factors: &[Vec<Q>]) -> Self {
        let vars = factors.len();
        let mut terms: Vec<(Vec<u32>, Q)> = vec![(vec![0; vars], Q::one())];
        for (j, f) in factors.iter().enumerate() {
            let mut next = Vec::new();
            for (e, c) in &terms {
                for (p, a) in f.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    let mut e2 = e.clone();
                    e2[j] = p as u32;
                    next.push((e2, c * a));
                }
            }
            terms = next;
        }
        MultiPoly { vars, terms }
    }

    pub fn eval_int(&self, x: &[usize]) -> Q {
        self.terms.iter().fold(Q::zero(), |acc, (e, c)| {
            let mono: BigInt = e.iter().zip(x).fold(BigInt::one(), |m, (&p, &xi)| m * num_traits::pow(BigInt::from(xi), p as usize));
            acc + c * Q::from_integer(mono)
        })
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().filter(|(_, c)| !c.is_zero()).map(|(e, _)| e.iter().sum()).max().unwrap_or(0)
    }

    /// Largest exponent of any single variable.
    pub fn local_degree(&self) -> u32 {
        self.terms.iter().filter(|(_, c)| !c.is_zero()).flat_map(|(e, _)| e.iter().copied()).max().unwrap_or(0)
    }
}

fn poly_mul(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `C(x - c, m)` as a polynomial in `x` (coefficients lowest first).
fn binomial_poly(c: i64, m: usize, sign: i64) -> Vec<Q> {
    // C(s, m) with s = sign·x - c
    let mut p = vec![Q::one()];
    let mut fact = BigInt::one();
    for t in 0..m {
        p = poly_mul(&p, &[Q::from_integer(BigInt::from(-c - t as i64)), Q::from_integer(BigInt::from(sign))]);
        fact *= t + 1;
    }
    let f = Q::from_integer(fact);
    p.into_iter().map(|v| v / &f).collect()
}

/// `β_u(x) = C(x-1, u-1)·C(n-x, k-u)` as a polynomial in `x`.
pub fn beta_poly(u: usize, n: usize, k: usize) -> Vec<Q> {
    let left = binomial_poly(1, u - 1, 1);
    let right = binomial_poly(-(n as i64), k - u, -1);
    poly_mul(&left, &right)
}

/// `∏_j β_{u_j}(x_j)`, a polynomial of local degree `k - 1`.
pub fn beta_product_poly(u: &[usize], n: usize, k: usize) -> MultiPoly {
    MultiPoly::product_of_univariates(&u.iter().map(|&uj| beta_poly(uj, n, k)).collect::<Vec<_>>())
}

/// `Σ_{i ∈ [n]^d} p(i) · D_i`, exactly.
pub fn moment_sum<A: IntArray>(dm: &A, p: &MultiPoly) -> Q {
    moment_sum_with(dm, |i| p.eval_int(i))
}

pub fn moment_sum_with<A: IntArray, F: Fn(&[usize]) -> Q>(dm: &A, p: F) -> Q {
    let mut acc = Q::zero();
    for (f, i) in index_tuples(dm.order(), dm.dim()).enumerate() {
        let v = dm.value(f);
        if v != 0 {
            acc += p(&i) * Q::from_integer(BigInt::from(v));
        }
    }
    acc
}

/// Difference of two hypermatrices given as bit strings of the same shape.
pub fn difference_of(d: usize, n: usize, a: &str, b: &str) -> Result<DifferenceMatrix> {
    let ha = Hypermatrix::parse(&format!("{d} {n}\n{a}"))?;
    let hb = Hypermatrix::parse(&format!("{d} {n}\n{b}"))?;
    ha.difference(&hb)
}

/// Number of deck members, exposed for reports.
pub fn deck_size(n: usize, d: usize, k: usize, mode: DeckMode) -> u128 {
    member_count(n, d, k, mode)
}
