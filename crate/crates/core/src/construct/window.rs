//! Lattice windows `(a + Lambda) ∩ B_R`, their planar projections and the
//! construction report.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::consts::{ln_interval, pi_interval};
use crate::arith::{format_rational, ComplexInterval};
use crate::error::{Error, Result};
use crate::numberfield::lattice::{enumerate_polydisc, in_polydisc};
use crate::numberfield::{detect_cm, CmStructure, FieldElement, NumberField};
use crate::unitdist::{count_exact_with, DistanceCensus};

use super::ledger::{exponent_from_log_u, interval_sci, Delta};
use super::pigeonhole::UnitSet;

/// Window parameters. `translate` holds basis coordinates of `a` (zero when
/// absent).
#[derive(Clone, Debug)]
pub struct WindowConfig {
    pub r: BigRational,
    pub translate: Option<Vec<BigRational>>,
    pub scale: BigRational,
    pub projection: usize,
}

impl WindowConfig {
    pub fn new(r: BigRational) -> Self {
        WindowConfig { r, translate: None, scale: BigRational::one(), projection: 0 }
    }
}

/// Working precision for planar boxes.
pub const PLANAR_BITS: u32 = 64;
const MAX_SEPARATION_BITS: u32 = 4096;

fn scaled_identity(n: usize, s: &BigRational) -> Vec<Vec<BigRational>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { s.clone() } else { BigRational::zero() }).collect()).collect()
}

/// All `z in a + scale O_K` with `|sigma(z)| <= R` at every place, decided
/// exactly; boundary points are included.
pub fn enumerate_window(field: &Arc<NumberField>, scale: &BigRational, r: &BigRational, a: Option<&[BigRational]>) -> Result<Vec<FieldElement>> {
    if !scale.is_positive() {
        return Err(Error::InvalidArgument("scale must be positive".into()));
    }
    if r.is_negative() {
        return Ok(vec![]);
    }
    let a = a.filter(|v| v.iter().any(|c| !c.is_zero()));
    enumerate_polydisc(field, &scaled_identity(field.degree(), scale), a, &(r * r))
}

/// Radical inverse of `i` in base `b`, exactly.
fn radical_inverse(mut i: u64, b: u64) -> BigRational {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    while i > 0 {
        num = num * b + (i % b);
        den *= b;
        i /= b;
    }
    // digits were accumulated most-significant last; reverse by construction
    BigRational::new(num, den)
}

fn first_primes(n: usize) -> Vec<u64> {
    (2u64..).filter(|&p| crate::arith::is_prime(p)).take(n).collect()
}

/// Halton offsets in the fundamental domain `scale * [0, 1)^n`.
pub fn halton_translates(n: usize, scale: &BigRational, count: u32) -> Vec<Vec<BigRational>> {
    let bases = first_primes(n);
    (1..=count as u64).map(|i| bases.iter().map(|&b| radical_inverse(i, b) * scale).collect()).collect()
}

/// Translate maximizing `|(a + Lambda) ∩ B_(R-1)|` among `a = 0` and
/// `candidates` Halton offsets (ties go to the earlier one), with that count.
pub fn select_translate(field: &Arc<NumberField>, scale: &BigRational, r: &BigRational, candidates: u32) -> Result<(Vec<BigRational>, usize)> {
    let n = field.degree();
    let inner = r - BigRational::one();
    let zero = vec![BigRational::zero(); n];
    let mut best = (zero.clone(), enumerate_window(field, scale, &inner, None)?.len());
    for a in halton_translates(n, scale, candidates) {
        let c = enumerate_window(field, scale, &inner, Some(&a))?.len();
        if c > best.1 {
            best = (a, c);
        }
    }
    Ok(best)
}

/// Roots of unity of `K`: the nonzero integers with every conjugate in the
/// closed unit disc.
pub fn roots_of_unity(field: &Arc<NumberField>) -> Result<Vec<FieldElement>> {
    let pts = enumerate_window(field, &BigRational::one(), &BigRational::one(), None)?;
    Ok(pts.into_iter().filter(|z| !z.is_zero()).collect())
}

#[derive(Clone, Debug)]
pub struct PointSet {
    pub exact_points: Vec<FieldElement>,
    pub planar: Vec<ComplexInterval>,
    /// Index into the complex places used for the projection.
    pub projection: usize,
    pub embedding: usize,
    pub unit_pairs_exact: Option<u64>,
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.exact_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exact_points.is_empty()
    }

    pub fn approx(&self) -> Vec<(f64, f64)> {
        self.planar.iter().map(|b| b.mid_f64()).collect()
    }

    /// Rows `index, re, im, c_0, ..., c_(n-1)`; floats with 17 significant digits.
    pub fn csv_rows(&self) -> (Vec<String>, Vec<Vec<String>>) {
        let n = self.exact_points.first().map_or(0, |z| z.coords().len());
        let mut header = vec!["index".to_string(), "re".to_string(), "im".to_string()];
        header.extend((0..n).map(|i| format!("c{i}")));
        let rows = self
            .exact_points
            .iter()
            .zip(&self.planar)
            .enumerate()
            .map(|(i, (z, b))| {
                let (re, im) = b.mid_f64();
                let mut row = vec![i.to_string(), format!("{re:.16e}"), format!("{im:.16e}")];
                row.extend(z.coords().iter().map(format_rational));
                row
            })
            .collect();
        (header, rows)
    }
}

/// Boxes for `sigma_k` of every point, refined until pairwise disjoint.
fn project(points: &[FieldElement], k: usize) -> Result<Vec<ComplexInterval>> {
    let mut boxes: Vec<ComplexInterval> = points.iter().map(|z| z.embed(k, PLANAR_BITS)).collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| boxes[a].re_lo().cmp(boxes[b].re_lo()));
    for (pos, &i) in order.iter().enumerate() {
        for &j in &order[pos + 1..] {
            if boxes[j].re_lo() > boxes[i].re_hi() {
                break;
            }
            if !boxes[i].intersects(&boxes[j]) {
                continue;
            }
            // sigma_k is injective, so the difference separates from 0
            let diff = points[i].sub(&points[j])?;
            if diff.is_zero() {
                return Err(Error::InjectivityFailure);
            }
            let mut bits = PLANAR_BITS * 2;
            loop {
                if !diff.embed(k, bits)?.contains_zero() {
                    break;
                }
                if bits >= MAX_SEPARATION_BITS {
                    return Err(Error::InjectivityFailure);
                }
                bits *= 2;
            }
            boxes[i] = points[i].embed(k, bits)?;
            boxes[j] = points[j].embed(k, bits)?;
        }
    }
    Ok(boxes)
}

/// Smallest `v = m / 2^16` with `(2 v)^(2 f) >= |disc K|`, which makes
/// `v >= delta^-2 covol(delta O_K)^(1/f)` for every scale `delta`.
pub fn skewness_bound(field: &NumberField, f: usize) -> BigRational {
    let d = field.disc().abs();
    let e = 2 * f as u32;
    let den = BigInt::from(1u64 << 16);
    // (2 m)^e >= d * 2^(16 e)
    let target = &d * den.pow(e);
    let mut m: BigInt = Roots::nth_root(&target, e) / 2;
    while (BigInt::from(2) * &m).pow(e) < target {
        m += 1;
    }
    while m > BigInt::zero() && (BigInt::from(2) * (&m - 1u32)).pow(e) >= target {
        m -= 1;
    }
    BigRational::new(m, den)
}

#[derive(Clone, Debug, Serialize)]
pub struct UnitJson {
    pub display: String,
    pub coords: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstructionReport {
    pub field: String,
    pub degree: usize,
    pub f: usize,
    #[serde(rename = "R")]
    pub r: String,
    pub delta: String,
    pub scale: String,
    pub translate: Vec<String>,
    pub projection_coordinate: usize,
    pub units: Vec<UnitJson>,
    /// `|U_Lambda|`, witnessing `u = |U_Lambda|^(1/f)`.
    pub u_witness: (usize, usize),
    pub translation_units: Vec<UnitJson>,
    pub v: String,
    pub lower_bound_2nu: String,
    pub lower_bound_2nu_approx: f64,
    pub translation_bound: u64,
    /// `|units| * |W ∩ B_(R-1)|` over every emitted unit, lattice member or
    /// not; informational.
    pub emitted_translation_bound: u64,
    pub emitted_translation_bound_holds: bool,
    pub upper_bound_cardinality: String,
    pub measured_points: usize,
    pub measured_unit_pairs: u64,
    pub inner_window: usize,
    pub inner_window_zero_translate: usize,
    pub hypotheses_verified: bool,
    pub packing_bound_holds: bool,
    pub translation_bound_holds: bool,
    pub averaging_bound_holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent_bound: Option<(String, String)>,
    pub denominator: String,
    pub guaranteed_min: Option<String>,
    pub class_number: Option<u64>,
    pub classes_found: usize,
    pub inconclusive_principality: usize,
    pub q_ideal: (Vec<Vec<String>>, String),
    pub census: DistanceCensus,
    pub warnings: Vec<String>,
}

impl ConstructionReport {
    /// All bounds asserted by the run held.
    pub fn bounds_hold(&self) -> bool {
        self.packing_bound_holds && self.translation_bound_holds
    }
}

fn unit_json(u: &FieldElement) -> UnitJson {
    UnitJson { display: u.display(), coords: u.coords().iter().map(format_rational).collect() }
}

fn is_in_lattice(z: &FieldElement, scale: &BigRational) -> bool {
    z.coords().iter().all(|c| (c / scale).is_integer())
}

/// Window, projection, exact census and the report.
pub fn build_pointset(field: &Arc<NumberField>, units: &UnitSet, cfg: &WindowConfig) -> Result<(PointSet, ConstructionReport)> {
    let cm: Arc<CmStructure> = detect_cm(field).ok_or(Error::NotCm)?;
    if !Arc::ptr_eq(&units.field, field) {
        return Err(Error::FieldMismatch);
    }
    let f = cm.f;
    if cfg.projection >= f {
        return Err(Error::InvalidArgument(format!("projection coordinate must be below {f}")));
    }
    let n = field.degree();
    let two = BigRational::from_integer(2.into());
    let mut warnings = Vec::new();
    if cfg.r < two {
        warnings.push("R < 2: the window bounds are not asserted".to_string());
    }
    if units.is_trivial() {
        warnings.push("no nontrivial units".to_string());
    }
    if units.inconclusive > 0 {
        warnings.push(format!("{} principality searches were inconclusive", units.inconclusive));
    }
    let zero = vec![BigRational::zero(); n];
    let a = cfg.translate.clone().unwrap_or_else(|| zero.clone());
    if a.len() != n {
        return Err(Error::InvalidArgument(format!("translate needs {n} coordinates")));
    }
    let window = enumerate_window(field, &cfg.scale, &cfg.r, Some(&a))?;
    let inner_r = &cfg.r - BigRational::one();
    let inner_r2 = &inner_r * &inner_r;
    let inner = if inner_r.is_negative() {
        0
    } else {
        let mut c = 0;
        for z in &window {
            if in_polydisc(z, &inner_r2)? {
                c += 1;
            }
        }
        c
    };
    let inner_zero = if a == zero { inner } else { enumerate_window(field, &cfg.scale, &inner_r, None)?.len() };
    let k = field.complex_places()[cfg.projection];
    let planar = project(&window, k)?;
    let approx: Vec<(f64, f64)> = planar.iter().map(|b| b.mid_f64()).collect();
    let census = count_exact_with(&window, &approx, &cm)?;
    let nu = census.unit_pairs;

    // U_Lambda: emitted units and roots of unity lying in the lattice
    let mut trans: Vec<FieldElement> = Vec::new();
    for u in units.units.iter().cloned().chain(roots_of_unity(field)?) {
        if is_in_lattice(&u, &cfg.scale) && !trans.contains(&u) {
            trans.push(u);
        }
    }
    let ul = trans.len();
    let delta = cfg.scale.clone();
    let v = skewness_bound(field, f);
    let hypotheses = cfg.r >= two && delta <= BigRational::one();
    let fi = f as i32;
    let r2 = &cfg.r * &cfg.r;
    let pi_lo = pi_interval(64).lo.to_rational();
    let base = &pi_lo * &r2 / (BigRational::from_integer(4.into()) * &v * &delta * &delta);
    let lower = BigRational::from_integer(ul.into()) * num_traits::pow(base, f);
    let upper = num_traits::pow(BigRational::from_integer(9.into()) * &r2 / (&delta * &delta), f);
    let translation_bound = (ul * inner) as u64;
    let measured = window.len();
    let two_nu = BigRational::from_integer((2 * nu).into());
    let exponent_bound = if hypotheses && ul > 1 {
        let bits = 128;
        let ln_u = ln_interval(&BigRational::from_integer(ul.into()), bits + 16)?.div_int(fi as i64, bits as i64 + 16);
        match exponent_from_log_u(&ln_u, &v, &Delta::Rational(delta.clone()), bits) {
            Ok(iv) => Some(interval_sci(&iv, 20)),
            Err(Error::ConditionFailed(_)) => {
                warnings.push("u pi <= 36 v: no exponent bound from this run".into());
                None
            }
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let report = ConstructionReport {
        field: field.label().to_string(),
        degree: n,
        f,
        r: format_rational(&cfg.r),
        delta: format_rational(&delta),
        scale: format_rational(&cfg.scale),
        translate: a.iter().map(format_rational).collect(),
        projection_coordinate: cfg.projection,
        units: units.units.iter().map(unit_json).collect(),
        u_witness: (ul, f),
        translation_units: trans.iter().map(unit_json).collect(),
        v: format_rational(&v),
        lower_bound_2nu: format_rational(&lower),
        lower_bound_2nu_approx: lower.to_f64().unwrap_or(f64::NAN),
        translation_bound,
        emitted_translation_bound: (units.units.len() * inner) as u64,
        emitted_translation_bound_holds: 2 * nu >= (units.units.len() * inner) as u64,
        upper_bound_cardinality: format_rational(&upper),
        measured_points: measured,
        measured_unit_pairs: nu,
        inner_window: inner,
        inner_window_zero_translate: inner_zero,
        hypotheses_verified: hypotheses,
        packing_bound_holds: !hypotheses || BigRational::from_integer(measured.into()) <= upper,
        translation_bound_holds: BigInt::from(2 * nu) >= BigInt::from(translation_bound),
        averaging_bound_holds: two_nu >= lower,
        exponent_bound,
        denominator: units.d.to_string(),
        guaranteed_min: units.guaranteed_min.as_ref().map(format_rational),
        class_number: units.class_number,
        classes_found: units.classes_found,
        inconclusive_principality: units.inconclusive,
        q_ideal: units.q.dump(),
        census,
        warnings,
    };
    let ps = PointSet { exact_points: window, planar, projection: cfg.projection, embedding: k, unit_pairs_exact: Some(nu) };
    Ok((ps, report))
}
