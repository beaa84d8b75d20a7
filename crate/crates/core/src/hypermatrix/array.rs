//! Dense `n^{x d}` arrays: binary hypermatrices and their differences.

use rand::Rng;

use crate::error::{Error, Result};

/// Iterates over all index tuples of `[n]^d` (1-based), last index fastest.
pub fn index_tuples(n: usize, d: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.checked_pow(d as u32).unwrap_or(0);
    (0..total).map(move |mut flat| {
        let mut t = vec![0; d];
        for j in (0..d).rev() {
            t[j] = flat % n + 1;
            flat /= n;
        }
        t
    })
}

/// Flat offset of a 1-based index tuple, last index fastest.
pub fn flat_index(idx: &[usize], n: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + (i - 1))
}

/// Binary hypermatrix of order `n` and dimension `d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hypermatrix {
    pub d: usize,
    pub n: usize,
    pub bits: Vec<u8>,
}

impl Hypermatrix {
    pub fn new(d: usize, n: usize, bits: Vec<u8>) -> Result<Self> {
        if d == 0 || n == 0 {
            return Err(Error::Invalid("d and n must be positive".into()));
        }
        let want = n.checked_pow(d as u32).ok_or_else(|| Error::TooLarge("n^d overflows".into()))?;
        if bits.len() != want {
            return Err(Error::Invalid(format!("expected {want} entries, got {}", bits.len())));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Invalid("entries must be 0 or 1".into()));
        }
        Ok(Hypermatrix { d, n, bits })
    }

    pub fn zeros(d: usize, n: usize) -> Self {
        Hypermatrix { d, n, bits: vec![0; n.pow(d as u32)] }
    }

    /// The `index`-th hypermatrix in the enumeration of `{0,1}^{n^d}`:
    /// bit `j` of `index` is the entry at flat offset `j`.
    pub fn from_index(d: usize, n: usize, index: u64) -> Self {
        let len = n.pow(d as u32);
        Hypermatrix { d, n, bits: (0..len).map(|j| ((index >> j) & 1) as u8).collect() }
    }

    pub fn random<R: Rng>(d: usize, n: usize, rng: &mut R) -> Self {
        let len = n.pow(d as u32);
        Hypermatrix { d, n, bits: (0..len).map(|_| rng.gen_range(0..2u8)).collect() }
    }

    pub fn identity2(n: usize) -> Self {
        let mut m = Self::zeros(2, n);
        for i in 0..n {
            m.bits[i * n + i] = 1;
        }
        m
    }

    pub fn get(&self, idx: &[usize]) -> u8 {
        self.bits[flat_index(idx, self.n)]
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().map(|&b| b as usize).sum()
    }

    /// Text format: `"d n"` line, then `n^d` characters of `{0,1}`.
    pub fn to_text(&self) -> String {
        let body: String = self.bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect();
        format!("{} {}\n{}\n", self.d, self.n, body)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("missing header line".into()))?;
        let mut it = header.split_whitespace();
        let d: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse("bad dimension in header".into()))?;
        let n: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse("bad order in header".into()))?;
        let body: String = lines.collect::<Vec<_>>().concat();
        let bits = body
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                _ => Err(Error::Parse(format!("unexpected character {c:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Hypermatrix::new(d, n, bits)
    }

    pub fn difference(&self, other: &Hypermatrix) -> Result<DifferenceMatrix> {
        if self.d != other.d || self.n != other.n {
            return Err(Error::Invalid("shape mismatch".into()));
        }
        Ok(DifferenceMatrix {
            d: self.d,
            n: self.n,
            entries: self.bits.iter().zip(&other.bits).map(|(&a, &b)| a as i8 - b as i8).collect(),
        })
    }
}

/// Entrywise difference `A - B` with entries in `{-1, 0, 1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferenceMatrix {
    pub d: usize,
    pub n: usize,
    pub entries: Vec<i8>,
}

impl DifferenceMatrix {
    /// Support `{i : d_i != 0}` as 1-based index tuples.
    pub fn support(&self) -> Vec<Vec<usize>> {
        index_tuples(self.n, self.d)
            .zip(&self.entries)
            .filter(|(_, &e)| e != 0)
            .map(|(t, _)| t)
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }
}

/// Integer-valued dense array view shared by the deck-sum routines.
pub trait IntArray {
    fn dim(&self) -> usize;
    fn order(&self) -> usize;
    fn value(&self, flat: usize) -> i64;
}

impl IntArray for Hypermatrix {
    fn dim(&self) -> usize {
        self.d
    }
    fn order(&self) -> usize {
        self.n
    }
    fn value(&self, flat: usize) -> i64 {
        self.bits[flat] as i64
    }
}

impl IntArray for DifferenceMatrix {
    fn dim(&self) -> usize {
        self.d
    }
    fn order(&self) -> usize {
        self.n
    }
    fn value(&self, flat: usize) -> i64 {
        self.entries[flat] as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let a = Hypermatrix::identity2(3);
        let t = a.to_text();
        assert_eq!(t, "2 3\n100010001\n");
        assert_eq!(Hypermatrix::parse(&t).unwrap(), a);
        assert!(Hypermatrix::parse("2 2\n101").is_err());
        assert!(Hypermatrix::parse("1 2\n12").is_err());
    }

    #[test]
    fn tuples_last_index_fastest() {
        let v: Vec<Vec<usize>> = index_tuples(2, 2).collect();
        assert_eq!(v, vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]]);
        assert_eq!(flat_index(&[2, 1], 2), 2);
    }

    #[test]
    fn difference_support() {
        let a = Hypermatrix::new(1, 3, vec![1, 0, 1]).unwrap();
        let b = Hypermatrix::new(1, 3, vec![0, 0, 1]).unwrap();
        let dm = a.difference(&b).unwrap();
        assert_eq!(dm.support(), vec![vec![1]]);
    }
}
