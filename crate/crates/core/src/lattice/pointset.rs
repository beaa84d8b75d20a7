//! Finite point sets in `[n]^d`.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSet {
    pub d: usize,
    pub n: u64,
    pub points: Vec<Vec<i64>>,
}

impl PointSet {
    /// Sorts and deduplicates; every coordinate must lie in `[1, n]`.
    pub fn new(d: usize, n: u64, mut points: Vec<Vec<i64>>) -> Result<Self> {
        for p in &points {
            if p.len() != d {
                return Err(Error::Invalid(format!("point {p:?} does not have {d} coordinates")));
            }
            if p.iter().any(|&x| x < 1 || x as u64 > n) {
                return Err(Error::Invalid(format!("point {p:?} is outside [1, {n}]^{d}")));
            }
        }
        points.sort();
        points.dedup();
        if points.is_empty() {
            return Err(Error::Invalid("empty point set".into()));
        }
        Ok(PointSet { d, n, points })
    }

    /// One point per line, `d` whitespace-separated integers. Blank lines and
    /// lines starting with `#` are skipped.
    pub fn parse(text: &str, n: u64) -> Result<Self> {
        let mut points = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let p = line
                .split_whitespace()
                .map(|t| t.parse::<i64>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
                .collect::<Result<Vec<i64>>>()?;
            points.push(p);
        }
        let d = points.first().map(|p| p.len()).ok_or_else(|| Error::Parse("no points".into()))?;
        PointSet::new(d, n, points)
    }

    pub fn to_text(&self) -> String {
        self.points
            .iter()
            .map(|p| p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ") + "\n")
            .collect()
    }

    /// `size` distinct uniform points of `[n]^d`.
    pub fn random<R: Rng>(d: usize, n: u64, size: usize, rng: &mut R) -> Result<Self> {
        let total = (n as f64).powi(d as i32);
        if size as f64 > total {
            return Err(Error::Invalid("more points requested than the cube holds".into()));
        }
        let pts: Vec<Vec<i64>> = if total <= 1e7 {
            sample(rng, total as usize, size)
                .into_iter()
                .map(|mut f| {
                    let mut p = vec![0i64; d];
                    for j in (0..d).rev() {
                        p[j] = (f as u64 % n) as i64 + 1;
                        f = (f as u64 / n) as usize;
                    }
                    p
                })
                .collect()
        } else {
            let mut set = std::collections::BTreeSet::new();
            while set.len() < size {
                set.insert((0..d).map(|_| rng.gen_range(1..=n as i64)).collect::<Vec<i64>>());
            }
            set.into_iter().collect()
        };
        PointSet::new(d, n, pts)
    }

    /// The full cube `[m]^d` as a point set in `[n]^d`.
    pub fn cube(d: usize, m: u64, n: u64) -> Result<Self> {
        let pts = crate::hypermatrix::index_tuples(m as usize, d)
            .map(|t| t.into_iter().map(|x| x as i64).collect())
            .collect();
        PointSet::new(d, n, pts)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        let p = PointSet::parse("# pts\n1 2 3\n\n3 2 1\n1 2 3\n", 3).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(PointSet::parse(&p.to_text(), 3).unwrap(), p);
        assert!(PointSet::parse("1 5\n", 4).is_err());
        assert!(PointSet::parse("1 2\n1\n", 4).is_err());
    }
}
