//! Lattice points of number-field lattices inside polydiscs.
//!
//! Candidates come from Fincke-Pohst enumeration on an LLL-reduced basis of
//! the real Minkowski image; the floating-point stage only discards points
//! that are outside by a relative margin. Every reported point passes an
//! exact membership test: interval embeddings first, then the symbolic sign
//! of `sigma_k(z c(z)) - R^2` (or `sigma_k(z^2) - R^2` at a real place) when
//! the intervals straddle the boundary. Boundary points are included.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::arith::linalg::QMatrix;
use crate::arith::{Dyadic, Interval};
use crate::error::{Error, Result};

use super::cm::detect_cm;
use super::element::{real_embedding_le, FieldElement};
use super::field::NumberField;

const FP_MARGIN: f64 = 1e-6;

/// LLL reduction of the rows of `b` (f64), returning the unimodular transform.
pub fn lll(b: &[Vec<f64>]) -> Vec<Vec<i64>> {
    let n = b.len();
    let mut basis: Vec<Vec<f64>> = b.to_vec();
    let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let gso = |basis: &[Vec<f64>]| {
        let mut bstar: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut mu = vec![vec![0.0; n]; n];
        let mut norms = vec![0.0; n];
        for i in 0..n {
            let mut v = basis[i].clone();
            for j in 0..i {
                mu[i][j] = if norms[j] > 0.0 { dot(&basis[i], &bstar[j]) / norms[j] } else { 0.0 };
                for (vk, bk) in v.iter_mut().zip(&bstar[j]) {
                    *vk -= mu[i][j] * bk;
                }
            }
            norms[i] = dot(&v, &v);
            bstar.push(v);
        }
        (mu, norms)
    };
    let (mut mu, mut norms) = gso(&basis);
    let mut k = 1;
    let mut guard = 0;
    while k < n && guard < 100_000 {
        guard += 1;
        for j in (0..k).rev() {
            let r = mu[k][j].round();
            if r != 0.0 {
                let ri = r as i64;
                for t in 0..basis[k].len() {
                    basis[k][t] -= r * basis[j][t];
                }
                for t in 0..n {
                    u[k][t] -= ri * u[j][t];
                }
                let (m2, n2) = gso(&basis);
                mu = m2;
                norms = n2;
            }
        }
        if norms[k] >= (0.99 - mu[k][k - 1] * mu[k][k - 1]) * norms[k - 1] {
            k += 1;
        } else {
            basis.swap(k, k - 1);
            u.swap(k, k - 1);
            let (m2, n2) = gso(&basis);
            mu = m2;
            norms = n2;
            k = (k - 1).max(1);
        }
    }
    u
}

/// Real Minkowski coordinates (real places, then Re/Im of complex places).
fn real_coords(field: &NumberField, coords: &[BigRational]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(field.degree());
    for k in field.places() {
        let (re, im) = field.embed_coords(coords, k, 60)?.mid_f64();
        out.push(re);
        if field.conj_embedding(k) != k {
            out.push(im);
        }
    }
    Ok(out)
}

/// Exact decision `|sigma_k(z)|^2 <= r2`, ties included.
fn place_contains(z: &FieldElement, k: usize, r2: &BigRational, r2d: &Interval) -> Result<bool> {
    let field = z.field();
    let v = z.embed(k, 64)?;
    let m = v.abs_sq();
    if m.hi <= r2d.lo {
        return Ok(true);
    }
    if m.lo > r2d.hi {
        return Ok(false);
    }
    if field.conj_embedding(k) == k {
        return real_embedding_le(&z.square(), k, r2);
    }
    match detect_cm(field) {
        Some(cm) => real_embedding_le(&z.abs_sq(&cm), k, r2),
        None => {
            let mut bits = 128;
            while bits <= 2048 {
                let m = z.embed(k, bits)?.abs_sq();
                let t = Interval::from_rational(r2, bits as i64 + 8);
                if m.hi <= t.lo {
                    return Ok(true);
                }
                if m.lo > t.hi {
                    return Ok(false);
                }
                bits *= 2;
            }
            Err(Error::PrecisionExhausted(2048))
        }
    }
}

/// Exact test that every place of `z` lies in the closed disc of radius^2 `r2`.
pub fn in_polydisc(z: &FieldElement, r2: &BigRational) -> Result<bool> {
    let r2d = Interval::from_rational(r2, 80);
    for k in z.field().places() {
        if !place_contains(z, k, r2, &r2d)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn cholesky_form(g: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    // Fincke-Pohst q_ij with Q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2
    let n = g.len();
    let mut q = g.to_vec();
    for i in 0..n {
        for j in i + 1..n {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for k in i + 1..n {
            for l in k..n {
                q[k][l] -= q[k][i] * q[i][l];
            }
        }
        if q[i][i] <= 0.0 {
            return None;
        }
    }
    Some(q)
}

/// Integer vectors `x` with `(x - y) G (x - y)^T <= bound`.
fn fincke_pohst(g: &[Vec<f64>], y: &[f64], bound: f64, limit: usize) -> Result<Vec<Vec<i64>>> {
    let n = g.len();
    let q = cholesky_form(g).ok_or_else(|| Error::InvalidArgument("degenerate lattice".into()))?;
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    fn rec(
        i: usize,
        q: &[Vec<f64>],
        y: &[f64],
        remaining: f64,
        x: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
        limit: usize,
    ) -> bool {
        let n = q.len();
        let mut c = y[i];
        for j in i + 1..n {
            c -= q[i][j] * (x[j] as f64 - y[j]);
        }
        let r = (remaining.max(0.0) / q[i][i]).sqrt();
        let lo = (c - r - 1e-9).ceil() as i64;
        let hi = (c + r + 1e-9).floor() as i64;
        for v in lo..=hi {
            let d = v as f64 - c;
            let rem = remaining - q[i][i] * d * d;
            if rem < -1e-9 * (1.0 + remaining.abs()) {
                continue;
            }
            x[i] = v;
            if i == 0 {
                out.push(x.clone());
                if out.len() > limit {
                    return false;
                }
            } else if !rec(i - 1, q, y, rem, x, out, limit) {
                return false;
            }
        }
        true
    }
    if n == 0 {
        return Ok(vec![vec![]]);
    }
    if !rec(n - 1, &q, y, bound, &mut x, &mut out, limit) {
        return Err(Error::InvalidArgument(format!("enumeration exceeds {limit} candidates")));
    }
    Ok(out)
}

fn solve_f64(m: &[Vec<f64>], rhs: &[f64]) -> Vec<f64> {
    // x M = rhs, M square: Gaussian elimination on M^T
    let n = m.len();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| m[j][i]).chain(std::iter::once(rhs[i])).collect()).collect();
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs())).unwrap();
        a.swap(p, c);
        let piv = a[c][c];
        for r in 0..n {
            if r != c && a[r][c] != 0.0 {
                let f = a[r][c] / piv;
                for k in c..=n {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
    }
    (0..n).map(|i| a[i][n] / a[i][i]).collect()
}

/// Default cap on enumeration candidates.
pub const DEFAULT_CANDIDATE_LIMIT: usize = 5_000_000;

/// All `z = offset + sum x_j l_j` (`x` integral, `l_j` the rows of `lattice` in
/// basis coordinates) with `|sigma(z)|^2 <= r2` at every place, sorted by
/// coordinates.
pub fn enumerate_polydisc(
    field: &Arc<NumberField>,
    lattice: &QMatrix,
    offset: Option<&[BigRational]>,
    r2: &BigRational,
) -> Result<Vec<FieldElement>> {
    enumerate_polydisc_limited(field, lattice, offset, r2, DEFAULT_CANDIDATE_LIMIT)
}

pub fn enumerate_polydisc_limited(
    field: &Arc<NumberField>,
    lattice: &QMatrix,
    offset: Option<&[BigRational]>,
    r2: &BigRational,
    limit: usize,
) -> Result<Vec<FieldElement>> {
    let n = field.degree();
    if lattice.len() != n {
        return Err(Error::InvalidArgument("lattice must have full rank".into()));
    }
    if r2 < &BigRational::zero() {
        return Ok(vec![]);
    }
    let scale = r2.to_f64().unwrap_or(f64::MAX).sqrt().max(f64::MIN_POSITIVE);
    let rows: Vec<Vec<f64>> =
        lattice.iter().map(|r| real_coords(field, r).map(|v| v.into_iter().map(|x| x / scale).collect())).collect::<Result<_>>()?;
    let u = lll(&rows);
    let reduced: QMatrix = u
        .iter()
        .map(|ur| {
            let mut v = vec![BigRational::zero(); n];
            for (c, l) in ur.iter().zip(lattice) {
                if *c != 0 {
                    let cq = BigRational::from_integer(BigInt::from(*c));
                    for (vi, li) in v.iter_mut().zip(l) {
                        *vi += &cq * li;
                    }
                }
            }
            v
        })
        .collect();
    let m: Vec<Vec<f64>> =
        reduced.iter().map(|r| real_coords(field, r).map(|v| v.into_iter().map(|x| x / scale).collect())).collect::<Result<_>>()?;
    let g: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| m[i].iter().zip(&m[j]).map(|(a, b)| a * b).sum()).collect()).collect();
    let center: Vec<f64> = match offset {
        Some(a) => {
            let c: Vec<f64> = real_coords(field, a)?.into_iter().map(|x| -x / scale).collect();
            solve_f64(&m, &c)
        }
        None => vec![0.0; n],
    };
    let places = field.places().len() as f64;
    let bound = places * (1.0 + FP_MARGIN) + 1e-9;
    let cands = fincke_pohst(&g, &center, bound, limit)?;
    let zero = vec![BigRational::zero(); n];
    let base = offset.map(|a| a.to_vec()).unwrap_or(zero);
    let check = |x: &Vec<i64>| -> Result<Option<FieldElement>> {
        let mut coords = base.clone();
        for (c, l) in x.iter().zip(&reduced) {
            if *c != 0 {
                let cq = BigRational::from_integer(BigInt::from(*c));
                for (vi, li) in coords.iter_mut().zip(l) {
                    *vi += &cq * li;
                }
            }
        }
        // cheap rejection well outside the polydisc
        let approx = real_coords(field, &coords)?;
        let r2f = scale * scale;
        let mut idx = 0;
        for k in field.places() {
            let mut s = approx[idx] * approx[idx];
            idx += 1;
            if field.conj_embedding(k) != k {
                s += approx[idx] * approx[idx];
                idx += 1;
            }
            if s > r2f * (1.0 + FP_MARGIN) + 1e-9 {
                return Ok(None);
            }
        }
        let z = FieldElement::new(field, coords)?;
        Ok(in_polydisc(&z, r2)?.then_some(z))
    };
    #[cfg(feature = "parallel")]
    let checked: Vec<Result<Option<FieldElement>>> = {
        use rayon::prelude::*;
        cands.par_iter().map(check).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let checked: Vec<Result<Option<FieldElement>>> = cands.iter().map(check).collect();
    let mut out = Vec::new();
    for r in checked {
        if let Some(z) = r? {
            out.push(z);
        }
    }
    out.sort_by(|a, b| a.coords().cmp(b.coords()));
    Ok(out)
}

/// Interval determinant by Gaussian elimination; `None` if a pivot cannot be
/// separated from zero.
pub fn interval_det(m: &[Vec<Interval>], bits: i64) -> Option<Interval> {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Interval::one();
    for c in 0..n {
        let p = (c..n).filter(|&r| !a[r][c].contains_zero()).max_by(|&x, &y| a[x][c].mag().cmp(&a[y][c].mag()))?;
        if p != c {
            a.swap(p, c);
            det = det.neg();
        }
        let piv = a[c][c].clone();
        det = det.mul(&piv).round_out(bits);
        for r in c + 1..n {
            let f = a[r][c].div(&piv, bits)?;
            for k in c..n {
                let t = f.mul(&a[c][k]);
                a[r][k] = a[r][k].sub(&t).round_out(bits);
            }
        }
    }
    Some(det)
}

/// Enclosure of the covolume of the Minkowski image of `O_K` in
/// `R^{r_1} x C^{r_2}` (real and imaginary parts as coordinates).
pub fn minkowski_covolume(field: &NumberField, bits: u32) -> Result<Interval> {
    let mut b = bits;
    loop {
        let table = field.basis_embeddings(b + 32)?;
        let places = field.places();
        let m: Vec<Vec<Interval>> = (0..field.degree())
            .map(|j| {
                let mut row = Vec::new();
                for &k in &places {
                    row.push(table[k][j].re.clone());
                    if field.conj_embedding(k) != k {
                        row.push(table[k][j].im.clone());
                    }
                }
                row
            })
            .collect();
        if let Some(d) = interval_det(&m, b as i64 + 16) {
            let d = if d.is_negative() { d.neg() } else { d };
            if !d.contains_zero() {
                return Ok(d);
            }
        }
        b *= 2;
        if b > 4096 {
            return Err(Error::PrecisionExhausted(4096));
        }
    }
}

/// Enclosure of `2^{-r_2} sqrt|disc|`.
pub fn covolume_formula(field: &NumberField, bits: u32) -> Interval {
    let r2 = field.complex_places().len() as i64;
    let d = Interval::from_int(field.disc().clone());
    let d = if d.is_negative() { d.neg() } else { d };
    d.sqrt(bits as i64 + 8).mul_dyadic(&Dyadic::pow2(-r2))
}
