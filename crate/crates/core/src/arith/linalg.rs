//! Exact dense linear algebra over Q and Z for the small matrices that show
//! up in number-field and ideal arithmetic (dimension at most 16 or so).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type QMatrix = Vec<Vec<BigRational>>;
pub type ZMatrix = Vec<Vec<BigInt>>;

pub fn identity(n: usize) -> QMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect()
}

pub fn det(m: &QMatrix) -> BigRational {
    let n = m.len();
    let mut a = m.clone();
    let mut d = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        let piv = a[c][c].clone();
        d *= &piv;
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &piv;
            for k in c..n {
                let t = &f * &a[c][k];
                a[r][k] -= t;
            }
        }
    }
    d
}

/// Inverse, or `None` when singular.
pub fn inverse(m: &QMatrix) -> Option<QMatrix> {
    let n = m.len();
    let mut a: QMatrix = m.iter().cloned().collect();
    let mut inv = identity(n);
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(p, c);
        inv.swap(p, c);
        let piv = a[c][c].recip();
        for k in 0..n {
            a[c][k] *= &piv;
            inv[c][k] *= &piv;
        }
        for r in 0..n {
            if r == c || a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].clone();
            for k in 0..n {
                let t = &f * &a[c][k];
                a[r][k] -= t;
                let t = &f * &inv[c][k];
                inv[r][k] -= t;
            }
        }
    }
    Some(inv)
}

/// Row vector times matrix.
pub fn vec_mat(v: &[BigRational], m: &QMatrix) -> Vec<BigRational> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut out = vec![BigRational::zero(); cols];
    for (i, vi) in v.iter().enumerate() {
        if vi.is_zero() {
            continue;
        }
        for (j, o) in out.iter_mut().enumerate() {
            *o += vi * &m[i][j];
        }
    }
    out
}

pub fn mat_mul(a: &QMatrix, b: &QMatrix) -> QMatrix {
    a.iter().map(|row| vec_mat(row, b)).collect()
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    if m.is_empty() {
        return vec![];
    }
    (0..m[0].len()).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Basis (as rows) of the left kernel `{ v : v M = 0 }`.
pub fn left_kernel(m: &QMatrix) -> QMatrix {
    // v M = 0  <=>  M^T v^T = 0
    right_kernel(&transpose(m))
}

/// Basis of `{ x : M x = 0 }` via reduced row echelon form.
pub fn right_kernel(m: &QMatrix) -> QMatrix {
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(p, r);
        let inv = a[r][c].recip();
        for k in 0..cols {
            a[r][k] *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for k in 0..cols {
                    let t = &f * &a[r][k];
                    a[i][k] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![BigRational::zero(); cols];
            v[fc] = BigRational::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[i][fc].clone();
            }
            v
        })
        .collect()
}

/// Least common multiple of all denominators.
pub fn common_denominator<'a>(it: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    it.into_iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    (e.gcd, e.x, e.y)
}

/// Row Hermite normal form of an integer matrix whose rows span a full-rank
/// lattice in Z^n. Returns the `n x n` upper-triangular basis with positive
/// diagonal and entries above each pivot reduced into `[0, pivot)`.
/// `None` if the rows do not have full column rank.
pub fn hnf(rows: &ZMatrix, n: usize) -> Option<ZMatrix> {
    let mut a: ZMatrix = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    if a.len() < n {
        return None;
    }
    let m = a.len();
    for c in 0..n {
        // bring a nonzero entry to row c
        let p = (c..m).find(|&r| !a[r][c].is_zero())?;
        a.swap(p, c);
        for r in c + 1..m {
            if a[r][c].is_zero() {
                continue;
            }
            let (g, s, t) = ext_gcd(&a[c][c], &a[r][c]);
            let u = &a[c][c] / &g;
            let v = &a[r][c] / &g;
            for k in c..n {
                let x = a[c][k].clone();
                let y = a[r][k].clone();
                a[c][k] = &s * &x + &t * &y;
                a[r][k] = &u * &y - &v * &x;
            }
        }
        if a[c][c].is_negative() {
            for k in c..n {
                a[c][k] = -a[c][k].clone();
            }
        }
        if a[c][c].is_zero() {
            return None;
        }
    }
    a.truncate(n);
    for c in 0..n {
        for r in 0..c {
            let q = a[r][c].div_floor(&a[c][c]);
            if !q.is_zero() {
                for k in c..n {
                    let t = &q * &a[c][k];
                    a[r][k] -= t;
                }
            }
        }
    }
    Some(a)
}

/// Basis (as rows) of the saturated lattice `{ v in Z^m : v A = 0 }` for an
/// `m x k` integer matrix `A`.
pub fn integer_left_kernel(a: &ZMatrix) -> ZMatrix {
    let m = a.len();
    if m == 0 {
        return vec![];
    }
    let k = a[0].len();
    // rows [A | I], reduced by unimodular row operations
    let mut rows: Vec<(Vec<BigInt>, Vec<BigInt>)> = a
        .iter()
        .enumerate()
        .map(|(i, r)| (r.clone(), (0..m).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()))
        .collect();
    let mut rank = 0;
    for c in 0..k {
        let Some(p) = (rank..m).find(|&r| !rows[r].0[c].is_zero()) else { continue };
        rows.swap(p, rank);
        for r in rank + 1..m {
            if rows[r].0[c].is_zero() {
                continue;
            }
            let (g, s, t) = ext_gcd(&rows[rank].0[c], &rows[r].0[c]);
            let u = &rows[rank].0[c] / &g;
            let v = &rows[r].0[c] / &g;
            let (top, bot) = (rows[rank].clone(), rows[r].clone());
            let comb = |x: &[BigInt], y: &[BigInt], a: &BigInt, b: &BigInt| -> Vec<BigInt> {
                x.iter().zip(y).map(|(x, y)| a * x + b * y).collect()
            };
            rows[rank] = (comb(&top.0, &bot.0, &s, &t), comb(&top.1, &bot.1, &s, &t));
            let nv = -v;
            rows[r] = (comb(&top.0, &bot.0, &nv, &u), comb(&top.1, &bot.1, &nv, &u));
        }
        rank += 1;
    }
    rows.into_iter().skip(rank).map(|(_, u)| u).collect()
}

/// Determinant of an upper-triangular matrix.
pub fn triangular_det(m: &ZMatrix) -> BigInt {
    m.iter().enumerate().map(|(i, r)| r[i].clone()).product()
}
