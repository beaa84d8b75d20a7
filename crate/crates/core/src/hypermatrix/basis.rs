//! Closed-form deck sums: the β basis (independent deletions per dimension)
//! and the γ basis (one deletion set shared by all dimensions).

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::array::{flat_index, index_tuples, IntArray};
use super::deck::{combinations, DeckMode, SumDeck};
use crate::error::{Error, Result};
use crate::numerics::binomial_i;

/// `β_u(x) = C(x-1, u-1) · C(n-x, k-u)`: the number of `k`-subsets of `[n]`
/// that contain `x` as their `u`-th smallest element.
pub fn beta_eval(u: usize, x: usize, n: usize, k: usize) -> BigInt {
    let (u, x, n, k) = (u as i64, x as i64, n as i64, k as i64);
    BigInt::from(binomial_i(x - 1, u - 1) * binomial_i(n - x, k - u))
}

/// `k × n` table of `β_u(x)`.
pub fn beta_table(n: usize, k: usize) -> Vec<Vec<BigInt>> {
    (1..=k).map(|u| (1..=n).map(|x| beta_eval(u, x, n, k)).collect()).collect()
}

/// Full-mode deck sum from the β formula, by contracting one dimension at a
/// time with the `k × n` β table.
pub fn sum_deck_via_beta<A: IntArray>(a: &A, k: usize) -> Result<SumDeck> {
    let (n, d) = (a.order(), a.dim());
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    let table = beta_table(n, k);
    // Shape before contracting axis j: k^j × n^(d-j), axis j has length n.
    let mut cur: Vec<BigInt> = (0..n.pow(d as u32)).map(|f| BigInt::from(a.value(f))).collect();
    for j in 0..d {
        let outer = k.pow(j as u32);
        let inner = n.pow((d - j - 1) as u32);
        let mut next = vec![BigInt::zero(); outer * k * inner];
        for o in 0..outer {
            for x in 0..n {
                for t in 0..inner {
                    let v = &cur[(o * n + x) * inner + t];
                    if v.is_zero() {
                        continue;
                    }
                    for u in 0..k {
                        let b = &table[u][x];
                        if !b.is_zero() {
                            next[(o * k + u) * inner + t] += b * v;
                        }
                    }
                }
            }
        }
        cur = next;
    }
    Ok(SumDeck { k, d, mode: DeckMode::Full, entries: cur })
}

/// Relative-order pattern of an index tuple.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TauPattern {
    pub r: usize,
    /// `tau[j]` is the rank (1-based) of entry `j` among the distinct values.
    pub tau: Vec<usize>,
    /// Smallest position (1-based) carrying each rank.
    pub anchors: Vec<usize>,
}

impl TauPattern {
    /// Builds a pattern from a surjection `[d] → [r]`, validating the image.
    pub fn from_tau(tau: Vec<usize>) -> Result<Self> {
        let r = tau.iter().copied().max().unwrap_or(0);
        let mut anchors = vec![0usize; r];
        for (j, &t) in tau.iter().enumerate() {
            if t == 0 {
                return Err(Error::Invalid("pattern values are 1-based".into()));
            }
            if anchors[t - 1] == 0 {
                anchors[t - 1] = j + 1;
            }
        }
        if anchors.iter().any(|&a| a == 0) {
            return Err(Error::Invalid("pattern is not onto its range".into()));
        }
        Ok(TauPattern { r, tau, anchors })
    }

    /// All tuples of `[n]^d` with this pattern, in lexicographic order.
    pub fn members(&self, n: usize) -> Vec<Vec<usize>> {
        combinations(n, self.r)
            .into_iter()
            .map(|vals| self.tau.iter().map(|&t| vals[t - 1]).collect())
            .collect()
    }
}

pub fn pattern_of(i: &[usize]) -> TauPattern {
    let mut vals: Vec<usize> = i.to_vec();
    vals.sort_unstable();
    vals.dedup();
    let tau = i.iter().map(|x| vals.binary_search(x).unwrap() + 1).collect();
    TauPattern::from_tau(tau).expect("ranks are onto")
}

/// Number of increasing `v ∈ [k]^r` placements times deletions that send
/// sorted distinct values `xs` to ranks `vs`.
fn gamma_sorted(vs: &[usize], xs: &[usize], n: usize, k: usize) -> BigInt {
    let r = xs.len();
    let (n, k) = (n as i64, k as i64);
    let x = |j: usize| xs[j] as i64;
    let v = |j: usize| vs[j] as i64;
    let mut acc = binomial_i(x(0) - 1, v(0) - 1);
    for j in 1..r {
        if acc.is_zero() {
            break;
        }
        acc *= binomial_i(x(j) - x(j - 1) - 1, v(j) - v(j - 1) - 1);
    }
    acc *= binomial_i(n - x(r - 1), k - v(r - 1));
    BigInt::from(acc)
}

/// Multiplicity with which entry `x` lands at position `u` in the principal
/// deck; both tuples must have the pattern `tau`.
pub fn gamma_eval(u: &[usize], x: &[usize], tau: &TauPattern, n: usize, k: usize) -> Result<BigInt> {
    if pattern_of(u) != *tau || pattern_of(x) != *tau {
        return Err(Error::PatternMismatch);
    }
    let vs: Vec<usize> = tau.anchors.iter().map(|&a| u[a - 1]).collect();
    let xs: Vec<usize> = tau.anchors.iter().map(|&a| x[a - 1]).collect();
    Ok(gamma_sorted(&vs, &xs, n, k))
}

/// Principal-mode deck sum from the γ formula.
pub fn sum_deck_via_gamma<A: IntArray>(a: &A, k: usize) -> Result<SumDeck> {
    let (n, d) = (a.order(), a.dim());
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    let mut out = SumDeck::zeros(k, d, DeckMode::Principal);
    let mut rank_sets: Vec<Vec<Vec<usize>>> = vec![Vec::new(); d + 1];
    for (f, i) in index_tuples(n, d).enumerate() {
        let val = a.value(f);
        if val == 0 {
            continue;
        }
        let p = pattern_of(&i);
        if p.r > k {
            continue;
        }
        if rank_sets[p.r].is_empty() {
            rank_sets[p.r] = combinations(k, p.r);
        }
        let xs: Vec<usize> = p.anchors.iter().map(|&a| i[a - 1]).collect();
        for vs in &rank_sets[p.r] {
            let g = gamma_sorted(vs, &xs, n, k);
            if g.is_zero() {
                continue;
            }
            let u: Vec<usize> = p.tau.iter().map(|&t| vs[t - 1]).collect();
            out.entries[flat_index(&u, k)] += g * val;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypermatrix::array::Hypermatrix;

    #[test]
    fn beta_examples() {
        assert_eq!(beta_eval(1, 1, 4, 2), BigInt::from(3));
        assert_eq!(beta_eval(3, 7, 7, 3), BigInt::from(15));
        assert_eq!(beta_eval(2, 1, 5, 3), BigInt::zero());
    }

    #[test]
    fn pattern_examples() {
        let p = pattern_of(&[1, 2, 1]);
        assert_eq!((p.r, p.tau.clone(), p.anchors.clone()), (2, vec![1, 2, 1], vec![1, 2]));
        let members = p.members(4);
        let expect: Vec<Vec<usize>> =
            vec![vec![1, 2, 1], vec![1, 3, 1], vec![1, 4, 1], vec![2, 3, 2], vec![2, 4, 2], vec![3, 4, 3]];
        assert_eq!(members, expect);
        assert_eq!(pattern_of(&[5, 5, 5]).tau, vec![1, 1, 1]);
        let q = pattern_of(&[2, 7, 4]);
        assert_eq!((q.r, q.tau), (3, vec![1, 3, 2]));
    }

    #[test]
    fn gamma_examples() {
        let t = TauPattern::from_tau(vec![1, 2]).unwrap();
        assert_eq!(gamma_eval(&[1, 2], &[1, 3], &t, 3, 2).unwrap(), BigInt::from(1));
        let t1 = TauPattern::from_tau(vec![1, 1]).unwrap();
        assert_eq!(gamma_eval(&[2, 2], &[1, 1], &t1, 3, 2).unwrap(), BigInt::zero());
        assert_eq!(gamma_eval(&[1, 2], &[1, 1], &t, 3, 2), Err(Error::PatternMismatch));
        let one = TauPattern::from_tau(vec![1]).unwrap();
        for x in 1..=5 {
            for u in 1..=3 {
                assert_eq!(gamma_eval(&[u], &[x], &one, 5, 3).unwrap(), beta_eval(u, x, 5, 3));
            }
        }
    }

    #[test]
    fn from_tau_rejects_gaps() {
        assert!(TauPattern::from_tau(vec![1, 3]).is_err());
    }

    #[test]
    fn sequence_example() {
        let a = Hypermatrix::new(1, 3, vec![1, 0, 0]).unwrap();
        let s = sum_deck_via_beta(&a, 2).unwrap();
        assert_eq!(s.entries, vec![BigInt::from(2), BigInt::zero()]);
    }
}
