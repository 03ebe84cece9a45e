//! Principality testing by bounded lattice search, and class numbers of
//! imaginary quadratic fields from reduced forms.

use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

use crate::arith::linalg::QMatrix;
use crate::arith::modular::is_squarefree;
use crate::error::{Error, Result};
use crate::numberfield::lattice::{enumerate_polydisc, enumerate_polydisc_limited};
use crate::numberfield::{detect_cm, FieldElement, NumberField};

use super::ideal::FracIdeal;

/// Outcome of a principality search.
#[derive(Clone, Debug, PartialEq)]
pub enum Principality {
    /// `(g) = I`, certified by HNF equality.
    Generator(FieldElement),
    /// Certified: no generator exists.
    NotFound,
    /// The bounded search failed; the answer is unknown.
    Inconclusive,
}

impl Principality {
    pub fn generator(&self) -> Option<&FieldElement> {
        match self {
            Principality::Generator(g) => Some(g),
            _ => None,
        }
    }
}

/// Search-radius slack, a rational just above `4/pi`.
pub fn default_slack() -> BigRational {
    BigRational::new(637.into(), 500.into())
}

pub const DEFAULT_UNIT_SEARCH_DEPTH: u32 = 3;

const UNIT_SEARCH_LIMIT: usize = 2_000_000;

/// Sort key for generators: `T2 = sum |sigma_k|^2`, then the argument of the
/// first embedding in `[0, 2 pi)`.
fn generator_key(z: &FieldElement) -> (f64, f64) {
    let n = z.field().degree();
    let t2: f64 = (0..n)
        .map(|k| {
            let (re, im) = z.approx(k);
            re * re + im * im
        })
        .sum();
    let (re, im) = z.approx(0);
    let mut arg = im.atan2(re);
    if arg < 0.0 {
        arg += std::f64::consts::TAU;
    }
    (t2, arg)
}

fn compare_generators(a: &FieldElement, b: &FieldElement) -> Ordering {
    let field = a.field();
    if let Some(cm) = detect_cm(field) {
        // exact T2 = Tr(z c(z)) on CM fields
        let ta = a.abs_sq(&cm).trace();
        let tb = b.abs_sq(&cm).trace();
        if ta != tb {
            return ta.cmp(&tb);
        }
    }
    let (ka, kb) = (generator_key(a), generator_key(b));
    ka.partial_cmp(&kb).unwrap_or(Ordering::Equal).then_with(|| a.coords().cmp(b.coords()))
}

/// A bound `lambda > 1` on `max |sigma(eps)|` for some non-torsion unit `eps`
/// of the totally real subfield, found by small enumeration.
pub fn real_unit_bound(field: &Arc<NumberField>) -> Option<f64> {
    let cm = detect_cm(field)?;
    if cm.f <= 1 {
        return None;
    }
    let n = field.degree();
    let basis: QMatrix = (0..n)
        .map(|i| (0..n).map(|j| BigRational::from_integer(BigInt::from((i == j) as i64))).collect())
        .collect();
    let one = BigRational::from_integer(1.into());
    for r2 in [4i64, 16, 64, 256] {
        let pts = enumerate_polydisc_limited(field, &basis, None, &BigRational::from_integer(r2.into()), UNIT_SEARCH_LIMIT).ok()?;
        let best = pts
            .iter()
            .filter(|z| z.as_rational().is_none() && cm.is_real(z.coords()) && z.norm() == one)
            .map(|z| (0..n).map(|k| z.approx(k).0.abs()).fold(0.0f64, f64::max))
            .filter(|m| *m > 1.0 + 1e-9)
            .fold(f64::INFINITY, f64::min);
        if best.is_finite() {
            return Some(best);
        }
    }
    None
}

fn has_finite_unit_group(field: &NumberField) -> bool {
    field.degree() == 1 || (field.degree() == 2 && field.is_totally_imaginary())
}

/// Rational upper approximation of `x`.
fn rational_above(x: f64) -> BigRational {
    let y = x * (1.0 + 1e-9) + 1e-12;
    BigRational::from_f64(y).unwrap_or_else(|| BigRational::from_integer(BigInt::from(u64::MAX)))
}

/// Search for a generator of `I`.
pub fn is_principal(ideal: &FracIdeal, slack: &BigRational, unit_search_depth: u32) -> Result<Principality> {
    let field = ideal.field().clone();
    let n = field.degree();
    let den = BigRational::from_integer(ideal.denominator().clone());
    let inv_den = den.recip();
    let a = FracIdeal::from_lattice(&field, &ideal.numerator_hnf().iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect())?;
    let norm_a = a.norm();
    if n == 1 {
        let g = FieldElement::from_rational(&field, norm_a * inv_den);
        return Ok(Principality::Generator(g));
    }
    let places = field.places().len() as f64;
    let nf = norm_a.to_f64().unwrap_or(f64::MAX);
    let df = field.disc().abs().to_f64().unwrap_or(f64::MAX);
    let s = slack.to_f64().unwrap_or(1.0);
    let mut r2 = rational_above(s * ((nf.ln() + 0.5 * df.ln()) / places).exp());
    let finite = has_finite_unit_group(&field);
    if finite {
        // every generator has |sigma|^2 = N(A) at each place
        let na = norm_a.clone();
        if r2 < na {
            r2 = na;
        }
    }
    let lattice = a.basis();
    let lambda = if finite || unit_search_depth == 0 { None } else { real_unit_bound(&field) };
    let depth = if lambda.is_some() { unit_search_depth } else { 0 };
    for t in 0..=depth {
        let radius = match (t, lambda) {
            (0, _) | (_, None) => r2.clone(),
            (_, Some(l)) => &r2 * rational_above(l.powi(2 * t as i32)),
        };
        let pts = match enumerate_polydisc(&field, &lattice, None, &radius) {
            Ok(p) => p,
            Err(Error::InvalidArgument(_)) => return Ok(Principality::Inconclusive),
            Err(e) => return Err(e),
        };
        let mut found: Vec<FieldElement> = pts
            .into_iter()
            .filter(|z| !z.is_zero() && z.norm().abs() == norm_a)
            .filter(|z| FracIdeal::principal(z).map(|p| p == a).unwrap_or(false))
            .collect();
        if !found.is_empty() {
            found.sort_by(compare_generators);
            let g = found.swap_remove(0).scale(&inv_den);
            debug_assert!(FracIdeal::principal(&g).map(|p| &p == ideal).unwrap_or(false));
            return Ok(Principality::Generator(g));
        }
    }
    if finite {
        Ok(Principality::NotFound)
    } else {
        Ok(Principality::Inconclusive)
    }
}

/// Class number of `Q(sqrt d)`, `d < 0` squarefree, by counting reduced
/// primitive forms of the field discriminant.
pub fn class_number_imag_quadratic(d: i64) -> Result<u64> {
    if d >= 0 || !is_squarefree(d) {
        return Err(Error::NotSquarefree(d.to_string()));
    }
    let disc = if d.rem_euclid(4) == 1 { d } else { 4 * d };
    let big = -disc;
    let mut h = 0u64;
    let mut a = 1i64;
    while 3 * a * a <= big {
        for b in -a + 1..=a {
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            if a.gcd(&b).gcd(&c) == 1 {
                h += 1;
            }
        }
        a += 1;
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideals::split_prime;
    use crate::numberfield::{compositum_multiquadratic, preset};

    #[test]
    fn gaussian_five() {
        let k = preset("gaussian").unwrap();
        let i5 = FracIdeal::principal(&FieldElement::from_ints(&k, &[5, 0]).unwrap()).unwrap();
        let g = is_principal(&i5, &default_slack(), 3).unwrap();
        assert_eq!(g.generator().unwrap(), &FieldElement::from_ints(&k, &[5, 0]).unwrap());
        let p = &split_prime(&k, 5).unwrap()[0];
        let g = is_principal(&p.ideal, &default_slack(), 3).unwrap();
        let g = g.generator().unwrap();
        assert_eq!(FracIdeal::principal(g).unwrap(), p.ideal);
        // fractional ideal P / Pbar
        let cm = detect_cm(&k).unwrap();
        let r = p.ideal.div(&p.ideal.conj(&cm).unwrap()).unwrap();
        let g = is_principal(&r, &default_slack(), 3).unwrap();
        let g = g.generator().unwrap();
        assert!(g.is_unit_modulus(&cm));
    }

    #[test]
    fn sqrt_minus_five() {
        let k = preset("qsqrt-5").unwrap();
        let p = &split_prime(&k, 3).unwrap()[1];
        assert_eq!(is_principal(&p.ideal, &default_slack(), 3).unwrap(), Principality::NotFound);
        let sq = p.ideal.pow(2).unwrap();
        let g = is_principal(&sq, &default_slack(), 3).unwrap();
        let g = g.generator().unwrap();
        assert_eq!(g.norm(), BigRational::from_integer(9.into()));
        // (2 + sqrt-5) up to sign
        let expect = FieldElement::from_ints(&k, &[2, 1]).unwrap();
        assert!(g == &expect || g == &expect.neg());
    }

    #[test]
    fn degree_four_search() {
        let k = compositum_multiquadratic(&[-1, 5]).unwrap();
        assert!(real_unit_bound(&k).unwrap() > 1.6);
        let ps = split_prime(&k, 29).unwrap();
        let i = ps[0].ideal.mul(&ps[1].ideal).unwrap();
        let g = is_principal(&i, &default_slack(), 3).unwrap();
        assert_eq!(FracIdeal::principal(g.generator().unwrap()).unwrap(), i);
    }

    #[test]
    fn class_numbers() {
        assert_eq!(class_number_imag_quadratic(-1).unwrap(), 1);
        assert_eq!(class_number_imag_quadratic(-5).unwrap(), 2);
        assert_eq!(class_number_imag_quadratic(-23).unwrap(), 3);
        assert_eq!(class_number_imag_quadratic(-3).unwrap(), 1);
        assert_eq!(class_number_imag_quadratic(-163).unwrap(), 1);
        assert_eq!(class_number_imag_quadratic(-14).unwrap(), 4);
        assert!(class_number_imag_quadratic(-4).is_err());
        assert!(class_number_imag_quadratic(5).is_err());
    }
}
