//! Unit-distance counting: exact symbolic counts on field points, grid-hash
//! counts on floating point sets, the square-grid baseline and sums of two
//! squares.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::arith::linalg::QMatrix;
use crate::error::{Error, Result};
use crate::numberfield::element::real_embedding_le;
use crate::numberfield::lattice::enumerate_polydisc;
use crate::numberfield::{CmStructure, FieldElement, NumberField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Hashed,
    Brute,
}

#[derive(Clone, Debug, Serialize)]
pub struct DistanceCensus {
    pub unit_pairs: u64,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    pub runtime_ms: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

// std's clock panics on wasm32-unknown-unknown; timings read 0 there
#[cfg(not(target_arch = "wasm32"))]
type Instant = std::time::Instant;

#[cfg(target_arch = "wasm32")]
#[derive(Clone, Copy)]
struct Instant;

#[cfg(target_arch = "wasm32")]
impl Instant {
    fn now() -> Self {
        Instant
    }
}

#[cfg(not(target_arch = "wasm32"))]
fn elapsed_ms(t: Instant) -> u64 {
    t.elapsed().as_millis() as u64
}

#[cfg(target_arch = "wasm32")]
fn elapsed_ms(_: Instant) -> u64 {
    0
}

/// `| |p - q| - 1 | <= tol`, the one predicate behind every float count.
#[inline]
fn near_unit(p: (f64, f64), q: (f64, f64), tol: f64) -> bool {
    let d = ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt();
    (d - 1.0).abs() <= tol
}

/// Offsets of the cells that can hold a point within distance `1 + tol < 2`
/// of a point in cell `(0, 0)` (the 5 x 5 block without corners), keeping one
/// of each pair `+-(dx, dy)`; the cell itself is handled separately.
const FORWARD: [(i64, i64); 10] = [(1, 0), (2, 0), (-2, 1), (-1, 1), (0, 1), (1, 1), (2, 1), (-1, 2), (0, 2), (1, 2)];

fn cell(p: (f64, f64)) -> (i64, i64) {
    (p.0.floor() as i64, p.1.floor() as i64)
}

/// Points bucketed into unit cells by a counting sort. Small bounding boxes
/// get a dense table, others a sorted list of occupied cells.
struct CellGrid {
    pts: Vec<(f64, f64)>,
    orig: Vec<u32>,
    keys: Vec<(i64, i64)>,
    index: CellIndex,
}

enum CellIndex {
    Dense { x0: i64, y0: i64, w: i64, h: i64, start: Vec<u32> },
    Sparse { cells: Vec<(i64, i64)>, start: Vec<u32> },
}

impl CellGrid {
    fn new(points: &[(f64, f64)]) -> Self {
        let n = points.len();
        let cells: Vec<(i64, i64)> = points.iter().map(|&p| cell(p)).collect();
        let (mut x0, mut x1, mut y0, mut y1) = (i64::MAX, i64::MIN, i64::MAX, i64::MIN);
        for &(x, y) in &cells {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        let (w, h) = if n == 0 { (0, 0) } else { (x1 - x0 + 1, y1 - y0 + 1) };
        let dense = n > 0 && (w as i128) * (h as i128) <= 4 * n as i128 + 1024;
        let mut order: Vec<u32> = (0..n as u32).collect();
        let index = if dense {
            let slot = |c: (i64, i64)| ((c.1 - y0) * w + (c.0 - x0)) as usize;
            let mut start = vec![0u32; (w * h) as usize + 1];
            for &c in &cells {
                start[slot(c) + 1] += 1;
            }
            for i in 1..start.len() {
                start[i] += start[i - 1];
            }
            let mut fill = start.clone();
            for (i, &c) in cells.iter().enumerate() {
                let s = slot(c);
                order[fill[s] as usize] = i as u32;
                fill[s] += 1;
            }
            CellIndex::Dense { x0, y0, w, h, start }
        } else {
            order.sort_unstable_by_key(|&i| (cells[i as usize].1, cells[i as usize].0, i));
            let mut occupied = Vec::new();
            let mut start = Vec::new();
            for (pos, &i) in order.iter().enumerate() {
                let c = cells[i as usize];
                if occupied.last() != Some(&(c.1, c.0)) {
                    occupied.push((c.1, c.0));
                    start.push(pos as u32);
                }
            }
            start.push(n as u32);
            CellIndex::Sparse { cells: occupied, start }
        };
        CellGrid {
            pts: order.iter().map(|&i| points[i as usize]).collect(),
            keys: order.iter().map(|&i| cells[i as usize]).collect(),
            orig: order,
            index,
        }
    }

    /// Sorted positions of the points in cell `c`.
    fn range(&self, c: (i64, i64)) -> std::ops::Range<usize> {
        match &self.index {
            CellIndex::Dense { x0, y0, w, h, start } => {
                let (x, y) = (c.0 - x0, c.1 - y0);
                if x < 0 || y < 0 || x >= *w || y >= *h {
                    return 0..0;
                }
                let s = (y * w + x) as usize;
                start[s] as usize..start[s + 1] as usize
            }
            CellIndex::Sparse { cells, start } => match cells.binary_search(&(c.1, c.0)) {
                Ok(k) => start[k] as usize..start[k + 1] as usize,
                Err(_) => 0..0,
            },
        }
    }

    /// Calls `f` on every near-unit pair whose first member sits at sorted
    /// position `pos`.
    fn scan(&self, pos: usize, tol: f64, mut f: impl FnMut(usize, usize)) {
        let p = self.pts[pos];
        let c = self.keys[pos];
        let own = self.range(c);
        for q in pos + 1..own.end {
            if near_unit(p, self.pts[q], tol) {
                f(pos, q);
            }
        }
        for (dx, dy) in FORWARD {
            for q in self.range((c.0 + dx, c.1 + dy)) {
                if near_unit(p, self.pts[q], tol) {
                    f(pos, q);
                }
            }
        }
    }

    fn pair(&self, a: usize, b: usize) -> (usize, usize) {
        let (i, j) = (self.orig[a] as usize, self.orig[b] as usize);
        (i.min(j), i.max(j))
    }
}

const CHUNK: usize = 4096;

/// Number of pairs `i < j` whose planar distance lies within `tol` of 1.
fn count_near_unit(points: &[(f64, f64)], tol: f64) -> u64 {
    let g = CellGrid::new(points);
    let count = |lo: usize| -> u64 {
        let mut n = 0;
        for pos in lo..(lo + CHUNK).min(points.len()) {
            g.scan(pos, tol, |_, _| n += 1);
        }
        n
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..points.len()).into_par_iter().step_by(CHUNK).map(count).sum()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..points.len()).step_by(CHUNK).map(count).sum()
    }
}

/// The pairs themselves, as original indices `i < j`.
fn near_unit_pairs(points: &[(f64, f64)], tol: f64) -> Vec<(usize, usize)> {
    let g = CellGrid::new(points);
    let collect = |lo: usize| -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for pos in lo..(lo + CHUNK).min(points.len()) {
            g.scan(pos, tol, |a, b| out.push(g.pair(a, b)));
        }
        out
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..points.len()).into_par_iter().step_by(CHUNK).flat_map_iter(collect).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..points.len()).step_by(CHUNK).flat_map(collect).collect()
    }
}

/// Tolerance of the float prefilter in front of the symbolic test.
const EXACT_PRUNE_TOL: f64 = 1e-6;

/// Unordered pairs `{x, y}` with `(x - y) c(x - y) = 1`. `approx` holds the
/// planar image of each point at one embedding and only prunes candidates.
pub fn count_exact_with(points: &[FieldElement], approx: &[(f64, f64)], cm: &CmStructure) -> Result<DistanceCensus> {
    let t = Instant::now();
    let cands = near_unit_pairs(approx, EXACT_PRUNE_TOL);
    let check = |&(i, j): &(usize, usize)| -> Result<bool> { Ok(points[i].sub(&points[j])?.is_unit_modulus(cm)) };
    #[cfg(feature = "parallel")]
    let flags: Vec<Result<bool>> = {
        use rayon::prelude::*;
        cands.par_iter().map(check).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let flags: Vec<Result<bool>> = cands.iter().map(check).collect();
    let mut n = 0u64;
    for f in flags {
        if f? {
            n += 1;
        }
    }
    Ok(DistanceCensus { unit_pairs: n, method: Method::Exact, eps: None, runtime_ms: elapsed_ms(t), warnings: vec![] })
}

/// Exact count with the float prefilter taken at embedding `k`.
pub fn count_exact(points: &[FieldElement], cm: &CmStructure, k: usize) -> Result<DistanceCensus> {
    let approx: Vec<(f64, f64)> = points.iter().map(|z| z.approx(k)).collect();
    count_exact_with(points, &approx, cm)
}

/// All pairs tested symbolically.
pub fn count_exact_brute(points: &[FieldElement], cm: &CmStructure) -> Result<DistanceCensus> {
    let t = Instant::now();
    let mut n = 0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i].sub(&points[j])?.is_unit_modulus(cm) {
                n += 1;
            }
        }
    }
    Ok(DistanceCensus { unit_pairs: n, method: Method::Brute, eps: None, runtime_ms: elapsed_ms(t), warnings: vec![] })
}

fn check_float_input(points: &[(f64, f64)], eps: f64) -> Result<Vec<String>> {
    if !(0.0..0.1).contains(&eps) {
        return Err(Error::TooLargeEps(eps));
    }
    if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
        return Err(Error::InvalidArgument("non-finite coordinate".into()));
    }
    let mut seen = std::collections::HashSet::new();
    let dups = points.iter().filter(|p| !seen.insert((p.0.to_bits(), p.1.to_bits()))).count();
    Ok(if dups > 0 { vec![format!("{dups} duplicate points")] } else { vec![] })
}

/// Pairs with `| |x - y| - 1 | <= eps`, grid hash of cell size 1.
pub fn count_float(points: &[(f64, f64)], eps: f64) -> Result<DistanceCensus> {
    let t = Instant::now();
    let warnings = check_float_input(points, eps)?;
    let n = count_near_unit(points, eps);
    Ok(DistanceCensus { unit_pairs: n, method: Method::Hashed, eps: Some(eps), runtime_ms: elapsed_ms(t), warnings })
}

/// The pairs counted by [`count_float`], sorted.
pub fn float_unit_pairs(points: &[(f64, f64)], eps: f64) -> Result<Vec<(usize, usize)>> {
    check_float_input(points, eps)?;
    let mut v = near_unit_pairs(points, eps);
    v.sort_unstable();
    Ok(v)
}

/// Same predicate over all pairs.
pub fn count_float_brute(points: &[(f64, f64)], eps: f64) -> Result<DistanceCensus> {
    let t = Instant::now();
    let warnings = check_float_input(points, eps)?;
    let mut n = 0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if near_unit(points[i], points[j], eps) {
                n += 1;
            }
        }
    }
    Ok(DistanceCensus { unit_pairs: n, method: Method::Brute, eps: Some(eps), runtime_ms: elapsed_ms(t), warnings })
}

/// Square grid scaled so that the most frequent in-grid distance becomes 1.
#[derive(Clone, Debug, Serialize)]
pub struct ErdosGrid {
    pub side: u64,
    pub m: u64,
    /// Representations `m = a^2 + b^2` with `|a|, |b| < side`.
    pub representations: u64,
    pub predicted_pairs: u64,
    #[serde(skip)]
    pub points: Vec<(f64, f64)>,
}

pub fn erdos_grid(n: u64) -> Result<ErdosGrid> {
    let s = (n as f64).sqrt().round() as u64;
    if s < 2 || s * s != n {
        return Err(Error::InvalidArgument(format!("{n} is not a square of an integer >= 2")));
    }
    let t = s as i64 - 1;
    let cap = 2 * (t * t) as u64;
    let mut reps = vec![0u64; cap as usize + 1];
    let mut pairs = vec![0u64; cap as usize + 1];
    for a in -t..=t {
        for b in -t..=t {
            let m = (a * a + b * b) as usize;
            if m == 0 {
                continue;
            }
            reps[m] += 1;
            pairs[m] += (s - a.unsigned_abs()) * (s - b.unsigned_abs());
        }
    }
    // most representations; ties toward smaller m
    let m = (1..=cap as usize).fold(1, |best, m| if reps[m] > reps[best] { m } else { best });
    let scale = 1.0 / (m as f64).sqrt();
    let points = (0..s).flat_map(|x| (0..s).map(move |y| (x as f64 * scale, y as f64 * scale))).collect();
    Ok(ErdosGrid { side: s, m: m as u64, representations: reps[m], predicted_pairs: pairs[m] / 2, points })
}

/// Pairs of grid points at squared lattice distance `m`, found by probing every
/// point with each difference vector. Works on integer labels, so it is exact
/// and costs `O(n r_2(m))` regardless of density.
pub fn lattice_pairs(side: u64, m: u64) -> u64 {
    let s = side as i64;
    let mut vecs = Vec::new();
    for a in 0..s {
        let rest = m as i64 - a * a;
        if rest < 0 {
            break;
        }
        let b = (rest as f64).sqrt().round() as i64;
        if b * b != rest || b >= s {
            continue;
        }
        // one of each +- pair: a > 0, or a = 0 and b > 0
        match (a, b) {
            (0, 0) => {}
            (0, _) => vecs.push((0, b)),
            (_, 0) => vecs.push((a, 0)),
            _ => vecs.extend([(a, b), (a, -b)]),
        }
    }
    let mut total = 0;
    for x in 0..s {
        for y in 0..s {
            total += vecs.iter().filter(|&&(a, b)| x + a < s && (0..s).contains(&(y + b))).count() as u64;
        }
    }
    total
}

/// `|{(x, y) in O_F^2 : x^2 + y^2 = alpha}|` for totally real `F`; `bound`
/// must dominate `sqrt(sigma(alpha))` at every place.
pub fn r2_count(field: &Arc<NumberField>, alpha: &FieldElement, bound: &BigRational) -> Result<u64> {
    if !field.is_totally_real() {
        return Err(Error::InvalidArgument("r2 needs a totally real field".into()));
    }
    if !Arc::ptr_eq(alpha.field(), field) {
        return Err(Error::FieldMismatch);
    }
    let b2 = bound * bound;
    for k in 0..field.degree() {
        if !real_embedding_le(alpha, k, &b2)? {
            return Err(Error::BoxTooSmall(format!("bound^2 is below embedding {k} of alpha")));
        }
    }
    let n = field.degree();
    let id: QMatrix = (0..n)
        .map(|i| (0..n).map(|j| BigRational::from_integer(BigInt::from((i == j) as i64))).collect())
        .collect();
    let xs = enumerate_polydisc(field, &id, None, &b2)?;
    let mut squares: HashMap<Vec<BigRational>, u64> = HashMap::new();
    for x in &xs {
        *squares.entry(x.square().coords().to_vec()).or_insert(0) += 1;
    }
    let mut total = 0;
    for x in &xs {
        let rest = alpha.sub(&x.square())?;
        total += squares.get(rest.coords()).copied().unwrap_or(0);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::{compositum_multiquadratic, detect_cm, preset, rationals};

    fn gaussian_disc(r2: i64) -> Vec<FieldElement> {
        let k = preset("gaussian").unwrap();
        let mut v = Vec::new();
        for a in -3i64..=3 {
            for b in -3i64..=3 {
                if a * a + b * b <= r2 {
                    v.push(FieldElement::from_ints(&k, &[a, b]).unwrap());
                }
            }
        }
        v
    }

    #[test]
    fn gaussian_discs() {
        let cm = detect_cm(gaussian_disc(0)[0].field()).unwrap();
        let p13 = gaussian_disc(4);
        assert_eq!(p13.len(), 13);
        assert_eq!(count_exact(&p13, &cm, 0).unwrap().unit_pairs, 16);
        assert_eq!(count_exact_brute(&p13, &cm).unwrap().unit_pairs, 16);
        let p5 = gaussian_disc(1);
        assert_eq!(count_exact(&p5, &cm, 0).unwrap().unit_pairs, 4);
        assert_eq!(count_exact(&p5[..1], &cm, 0).unwrap().unit_pairs, 0);
    }

    #[test]
    fn float_small_sets() {
        let sq = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)];
        assert_eq!(count_float(&sq, 1e-9).unwrap().unit_pairs, 4);
        let tri = [(0.0, 0.0), (1.0, 0.0), (0.5, 3f64.sqrt() / 2.0)];
        assert_eq!(count_float(&tri, 1e-9).unwrap().unit_pairs, 3);
        assert!(matches!(count_float(&sq, 0.1), Err(Error::TooLargeEps(_))));
        let dup = [(0.0, 0.0), (0.0, 0.0)];
        assert_eq!(count_float(&dup, 1e-9).unwrap().warnings.len(), 1);
    }

    #[test]
    fn grids() {
        for (n, m, pairs) in [(4u64, 1u64, 4u64), (25, 5, 48), (100, 65, 144), (400, 325, 520)] {
            let g = erdos_grid(n).unwrap();
            assert_eq!((g.m, g.predicted_pairs), (m, pairs), "n = {n}");
            assert_eq!(count_float(&g.points, 1e-9).unwrap().unit_pairs, pairs);
        }
        assert!(erdos_grid(10).is_err());
        for n in [4u64, 25, 400, 2500] {
            let g = erdos_grid(n).unwrap();
            assert_eq!(lattice_pairs(g.side, g.m), g.predicted_pairs);
        }
    }

    #[test]
    fn two_squares() {
        let q = rationals();
        let r = |m: i64| r2_count(&q, &FieldElement::from_ints(&q, &[m]).unwrap(), &BigRational::from_integer(((m as f64).sqrt().ceil() as i64).into())).unwrap();
        assert_eq!(r(5), 8);
        assert_eq!(r(25), 12);
        assert_eq!(r(3), 0);
        assert_eq!(r(1), 4);
        let small = r2_count(&q, &FieldElement::from_ints(&q, &[25]).unwrap(), &BigRational::from_integer(4.into()));
        assert!(matches!(small, Err(Error::BoxTooSmall(_))));
    }

    #[test]
    fn two_squares_golden() {
        let f = compositum_multiquadratic(&[5]).unwrap();
        let alpha = |m: i64| FieldElement::from_rational(&f, BigRational::from_integer(m.into()));
        let b = BigRational::from_integer(3.into());
        let n3 = r2_count(&f, &alpha(3), &b).unwrap();
        let n4 = r2_count(&f, &alpha(4), &b).unwrap();
        // brute force over small coordinates in the integral basis
        let brute = |m: i64| {
            let mut c = 0;
            let range = -6i64..=6;
            let elems: Vec<FieldElement> =
                range.clone().flat_map(|a| range.clone().map(move |b| (a, b))).map(|(a, b)| FieldElement::from_ints(&f, &[a, b]).unwrap()).collect();
            for x in &elems {
                for y in &elems {
                    if x.square().add(&y.square()).unwrap() == alpha(m) {
                        c += 1;
                    }
                }
            }
            c
        };
        assert_eq!(n3, brute(3));
        assert_eq!(n4, brute(4));
        assert_eq!((n3, n4), (8, 4));
    }
}
