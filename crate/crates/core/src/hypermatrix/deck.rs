//! Decks (multisets of sub-hypermatrices) and deck sums by direct enumeration.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::array::{flat_index, Hypermatrix, IntArray};
use crate::error::{Error, Result};
use crate::numerics::binomial_u128;

/// Maximum number of deck members enumerated without the streaming flag.
pub const MEMBER_GUARD: u128 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeckMode {
    /// Independent index subsets in every dimension.
    Full,
    /// The same index subset in every dimension.
    Principal,
}

impl std::str::FromStr for DeckMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(DeckMode::Full),
            "principal" => Ok(DeckMode::Principal),
            _ => Err(Error::Parse(format!("unknown deck mode {s:?}"))),
        }
    }
}

/// All `k`-subsets of `{1..n}` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut c: Vec<usize> = (1..=k).collect();
    loop {
        out.push(c.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if c[i] < n - k + i + 1 {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Number of deck members: `C(n,k)^d` (full) or `C(n,k)` (principal).
pub fn member_count(n: usize, d: usize, k: usize, mode: DeckMode) -> u128 {
    let c = binomial_u128(n as u64, k as u64);
    match mode {
        DeckMode::Principal => c,
        DeckMode::Full => {
            let mut acc: u128 = 1;
            for _ in 0..d {
                acc = acc.saturating_mul(c);
            }
            acc
        }
    }
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        Err(Error::KOutOfRange { k, n })
    } else {
        Ok(())
    }
}

/// Visits every deck member as a list of per-dimension index subsets.
fn for_each_selection<F: FnMut(&[&Vec<usize>])>(n: usize, d: usize, k: usize, mode: DeckMode, mut f: F) {
    let subsets = combinations(n, k);
    match mode {
        DeckMode::Principal => {
            for s in &subsets {
                let sel: Vec<&Vec<usize>> = vec![s; d];
                f(&sel);
            }
        }
        DeckMode::Full => {
            let m = subsets.len();
            let mut choice = vec![0usize; d];
            loop {
                let sel: Vec<&Vec<usize>> = choice.iter().map(|&c| &subsets[c]).collect();
                f(&sel);
                let mut j = d;
                loop {
                    if j == 0 {
                        return;
                    }
                    j -= 1;
                    choice[j] += 1;
                    if choice[j] < m {
                        break;
                    }
                    choice[j] = 0;
                }
            }
        }
    }
}

/// Flat offsets into the parent for each position of a `k^d` sub-array.
fn sub_offsets(sel: &[&Vec<usize>], n: usize, k: usize) -> Vec<usize> {
    let d = sel.len();
    let total = k.pow(d as u32);
    let mut out = Vec::with_capacity(total);
    let mut pos = vec![0usize; d];
    for _ in 0..total {
        let idx: Vec<usize> = (0..d).map(|j| sel[j][pos[j]]).collect();
        out.push(flat_index(&idx, n));
        let mut j = d;
        while j > 0 {
            j -= 1;
            pos[j] += 1;
            if pos[j] < k {
                break;
            }
            pos[j] = 0;
        }
    }
    out
}

/// Multiset of sub-hypermatrices keyed by their row-major bit strings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deck {
    pub k: usize,
    pub d: usize,
    pub mode: DeckMode,
    pub entries: BTreeMap<String, BigUint>,
}

impl Deck {
    pub fn total(&self) -> BigUint {
        self.entries.values().fold(BigUint::zero(), |a, b| a + b)
    }

    /// Merges another deck into this one (multiset union).
    pub fn merge(&mut self, other: &Deck) {
        for (key, m) in &other.entries {
            *self.entries.entry(key.clone()).or_insert_with(BigUint::zero) += m;
        }
    }

    pub fn scaled(&self, factor: &BigUint) -> Deck {
        Deck {
            k: self.k,
            d: self.d,
            mode: self.mode,
            entries: self.entries.iter().map(|(key, m)| (key.clone(), m * factor)).collect(),
        }
    }
}

/// The `k`-deck of `a` in the given mode.
pub fn deck(a: &Hypermatrix, k: usize, mode: DeckMode) -> Result<Deck> {
    check_k(a.n, k)?;
    let count = member_count(a.n, a.d, k, mode);
    if count > MEMBER_GUARD {
        return Err(Error::TooLarge(format!("{count} deck members exceed the guard of {MEMBER_GUARD}")));
    }
    let mut counts: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
    for_each_selection(a.n, a.d, k, mode, |sel| {
        let key: Vec<u8> = sub_offsets(sel, a.n, k).into_iter().map(|o| a.bits[o]).collect();
        *counts.entry(key).or_insert(0) += 1;
    });
    let entries = counts
        .into_iter()
        .map(|(key, m)| (key.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect(), BigUint::from(m)))
        .collect();
    Ok(Deck { k, d: a.d, mode, entries })
}

/// Entrywise sum of all deck members, a `k^d` array of big integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumDeck {
    pub k: usize,
    pub d: usize,
    pub mode: DeckMode,
    pub entries: Vec<BigInt>,
}

#[derive(Serialize, Deserialize)]
struct SumDeckJson {
    mode: DeckMode,
    k: usize,
    d: usize,
    shape: Vec<usize>,
    entries: Vec<String>,
}

impl SumDeck {
    pub fn zeros(k: usize, d: usize, mode: DeckMode) -> Self {
        SumDeck { k, d, mode, entries: vec![BigInt::zero(); k.pow(d as u32)] }
    }

    pub fn get(&self, u: &[usize]) -> &BigInt {
        &self.entries[flat_index(u, self.k)]
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(SumDeckJson {
            mode: self.mode,
            k: self.k,
            d: self.d,
            shape: vec![self.k; self.d],
            entries: self.entries.iter().map(|e| e.to_string()).collect(),
        })
        .expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: SumDeckJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let entries = j
            .entries
            .iter()
            .map(|s| s.parse::<BigInt>().map_err(|e| Error::Parse(e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        if entries.len() != j.k.pow(j.d as u32) {
            return Err(Error::Parse("entry count does not match shape".into()));
        }
        Ok(SumDeck { k: j.k, d: j.d, mode: j.mode, entries })
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }
}

/// Deck sum by enumerating every member. Refuses instances beyond the member
/// guard unless `streaming` is set (members are never stored either way).
pub fn sum_deck_direct_with<A: IntArray>(a: &A, k: usize, mode: DeckMode, streaming: bool) -> Result<SumDeck> {
    let (n, d) = (a.order(), a.dim());
    check_k(n, k)?;
    let count = member_count(n, d, k, mode);
    if count > MEMBER_GUARD && !streaming {
        return Err(Error::TooLarge(format!("{count} deck members exceed the guard of {MEMBER_GUARD}")));
    }
    let mut acc = vec![0i128; k.pow(d as u32)];
    for_each_selection(n, d, k, mode, |sel| {
        for (slot, off) in sub_offsets(sel, n, k).into_iter().enumerate() {
            acc[slot] += a.value(off) as i128;
        }
    });
    Ok(SumDeck { k, d, mode, entries: acc.into_iter().map(BigInt::from).collect() })
}

pub fn sum_deck_direct<A: IntArray>(a: &A, k: usize, mode: DeckMode) -> Result<SumDeck> {
    sum_deck_direct_with(a, k, mode, false)
}

/// Deck-sum equality helper returning the first differing slot.
pub fn first_difference(x: &SumDeck, y: &SumDeck) -> Option<usize> {
    x.entries.iter().zip(&y.entries).position(|(a, b)| a != b)
}

/// Flat parent offsets of every deck member, in enumeration order.
pub fn member_offsets(n: usize, d: usize, k: usize, mode: DeckMode) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_selection(n, d, k, mode, |sel| out.push(sub_offsets(sel, n, k)));
    out
}

/// Rebuilds a deck member from its bit-string key.
pub fn member_from_key(key: &str, k: usize, d: usize) -> Result<Hypermatrix> {
    let bits = key
        .chars()
        .map(|c| match c {
            '0' => Ok(0u8),
            '1' => Ok(1u8),
            _ => Err(Error::Parse(format!("bad deck key character {c:?}"))),
        })
        .collect::<Result<Vec<u8>>>()?;
    Hypermatrix::new(d, k, bits)
}

pub fn multiplicity_u64(x: &BigUint) -> Option<u64> {
    x.to_u64()
}
