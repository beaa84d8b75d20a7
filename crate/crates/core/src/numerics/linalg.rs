//! Small exact linear algebra over the rationals.

use num_traits::{One, Zero};

use super::rational::Q;

pub type Matrix = Vec<Vec<Q>>;

/// Row-echelon reduction in place; returns the rank.
pub fn rank(mut m: Matrix) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for i in (r + 1)..rows {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &pivot;
            for j in c..cols {
                let t = &f * &m[r][j];
                m[i][j] -= t;
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

pub fn det(m: &Matrix) -> Q {
    let n = m.len();
    let mut a = m.clone();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return Q::zero() };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        let pivot = a[c][c].clone();
        d *= &pivot;
        for i in (c + 1)..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &pivot;
            for j in c..n {
                let t = &f * &a[c][j];
                a[i][j] -= t;
            }
        }
    }
    d
}

/// Inverse of a square matrix, `None` when singular.
pub fn inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut a: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(p, c);
        let pivot = a[c][c].clone();
        for j in 0..2 * n {
            a[c][j] = &a[c][j] / &pivot;
        }
        for i in 0..n {
            if i == c || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in 0..2 * n {
                let t = &f * &a[c][j];
                a[i][j] -= t;
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn gram(vectors: &[Vec<Q>]) -> Matrix {
    vectors
        .iter()
        .map(|u| vectors.iter().map(|v| dot(u, v)).collect())
        .collect()
}

pub fn dot(u: &[Q], v: &[Q]) -> Q {
    u.iter().zip(v).fold(Q::zero(), |acc, (a, b)| acc + a * b)
}

/// Deletes row and column `k`.
pub fn minor(m: &Matrix, k: usize) -> Matrix {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != k)
        .map(|(_, r)| r.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, v)| v.clone()).collect())
        .collect()
}
