//! Splitting of rational primes by factoring the minimal polynomial mod p.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use crate::arith::modular::{is_prime, reduce};
use crate::arith::IntPoly;
use crate::error::{Error, Result};
use crate::numberfield::{CmStructure, FieldElement, NumberField};

use super::fp_poly::{factor, FpPoly};
use super::ideal::FracIdeal;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeIdeal {
    pub p: u64,
    /// Monic lift of the irreducible factor, coefficients in `[0, p)`.
    pub gen_poly: IntPoly,
    pub e: u32,
    pub f_res: u32,
    pub ideal: FracIdeal,
}

impl PrimeIdeal {
    pub fn hnf(&self) -> &crate::arith::linalg::ZMatrix {
        self.ideal.numerator_hnf()
    }

    pub fn norm(&self) -> BigRational {
        self.ideal.norm()
    }

    /// The conjugate prime (same `p`, `e`, `f_res`).
    pub fn conj(&self, cm: &CmStructure) -> Result<PrimeIdeal> {
        let ideal = self.ideal.conj(cm)?;
        let field = ideal.field().clone();
        // find the factor of the minimal polynomial that cuts out the conjugate
        let gen_poly = split_prime(&field, self.p)?
            .into_iter()
            .find(|q| q.ideal == ideal)
            .map(|q| q.gen_poly)
            .unwrap_or_else(|| self.gen_poly.clone());
        Ok(PrimeIdeal { gen_poly, ideal, ..self.clone() })
    }
}

/// Whether `p` may divide `[O_K : Z[theta]]`.
fn may_divide_index(field: &NumberField, p: u64) -> bool {
    let pb = BigInt::from(p);
    if field.index_conditional() {
        // the stored ring may be non-maximal; only p with p^2 | disc(f) are at risk
        let d = field.min_poly().discriminant();
        d.is_multiple_of(&(&pb * &pb))
    } else {
        field.index().is_multiple_of(&pb)
    }
}

/// Primes of `O_K` above `p`, one per irreducible factor of the minimal
/// polynomial mod `p`.
pub fn split_prime(field: &Arc<NumberField>, p: u64) -> Result<Vec<PrimeIdeal>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    if may_divide_index(field, p) {
        return Err(Error::IndexDivisor(format!("{p} divides the index of Z[theta]")));
    }
    let f = FpPoly::new(field.min_poly().coeffs().iter().map(|c| reduce(c, p)).collect());
    let n = field.degree();
    let pe = FieldElement::from_rational(field, BigRational::from_integer(p.into()));
    let mut out = Vec::new();
    let mut total = 0u32;
    for (g, e) in factor(&f, p) {
        let lift = IntPoly::new(g.c.iter().map(|&c| BigInt::from(c)).collect());
        let pc: Vec<BigRational> = lift.coeffs().iter().map(|c| BigRational::from_integer(c.clone())).collect();
        let gt = reduce_power_coords(field, pc)?;
        let ideal = FracIdeal::from_generators(field, &[pe.clone(), gt])?;
        let f_res = g.degree() as u32;
        if ideal.norm() != BigRational::from_integer(BigInt::from(p).pow(f_res)) {
            return Err(Error::IndexDivisor(format!("prime above {p} has unexpected norm")));
        }
        total += e * f_res;
        out.push(PrimeIdeal { p, gen_poly: lift, e, f_res, ideal });
    }
    if total as usize != n {
        return Err(Error::IndexDivisor(format!("ramification data above {p} does not sum to {n}")));
    }
    Ok(out)
}

/// Element with the given power coordinates, reducing degree >= n mod f.
fn reduce_power_coords(field: &Arc<NumberField>, pc: Vec<BigRational>) -> Result<FieldElement> {
    let n = field.degree();
    if pc.len() <= n {
        return FieldElement::from_power(field, &pc);
    }
    let r = crate::arith::QPoly::new(pc).rem(&field.min_poly().to_qpoly());
    let mut c = r.coeffs().to_vec();
    c.resize(n, BigRational::zero());
    FieldElement::from_power(field, &c)
}

/// True when `p` splits into `n` distinct primes of degree one.
pub fn splits_completely_in(field: &Arc<NumberField>, p: u64) -> Result<bool> {
    let ps = split_prime(field, p)?;
    Ok(ps.len() == field.degree() && ps.iter().all(|q| q.e == 1 && q.f_res == 1))
}

/// Product of `P^e` over all primes above `p`; equals `(p)` by construction.
pub fn product_above(primes: &[PrimeIdeal]) -> Result<FracIdeal> {
    let field = primes.first().ok_or(Error::ZeroIdeal)?.ideal.field().clone();
    let mut acc = FracIdeal::unit(&field);
    for q in primes {
        acc = acc.mul(&q.ideal.pow(q.e)?)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::{compositum_multiquadratic, detect_cm, preset};

    fn q(a: i64) -> BigRational {
        BigRational::from_integer(a.into())
    }

    #[test]
    fn gaussian_primes() {
        let k = preset("gaussian").unwrap();
        let five = split_prime(&k, 5).unwrap();
        assert_eq!(five.len(), 2);
        assert!(five.iter().all(|p| p.e == 1 && p.f_res == 1 && p.norm() == q(5)));
        let three = split_prime(&k, 3).unwrap();
        assert_eq!(three.len(), 1);
        assert_eq!(three[0].f_res, 2);
        let two = split_prime(&k, 2).unwrap();
        assert_eq!((two.len(), two[0].e), (1, 2));
        assert!(matches!(split_prime(&k, 9), Err(Error::NotPrime(_))));
        let prod = product_above(&five).unwrap();
        assert_eq!(prod, FracIdeal::principal(&FieldElement::from_ints(&k, &[5, 0]).unwrap()).unwrap());
    }

    #[test]
    fn sqrt_minus_five_at_three() {
        let k = preset("qsqrt-5").unwrap();
        let ps = split_prime(&k, 3).unwrap();
        assert_eq!(ps.len(), 2);
        let cm = detect_cm(&k).unwrap();
        assert_eq!(ps[0].ideal.conj(&cm).unwrap(), ps[1].ideal);
        for (p, s) in ps.iter().zip([1i64, -1]) {
            let g = FracIdeal::from_generators(&k, &[FieldElement::from_ints(&k, &[3, 0]).unwrap(), FieldElement::from_ints(&k, &[s, 1]).unwrap()]).unwrap();
            assert_eq!(p.ideal, g);
        }
    }

    #[test]
    fn degree_four_split() {
        let k = compositum_multiquadratic(&[-1, 5]).unwrap();
        assert!(splits_completely_in(&k, 29).unwrap());
        assert!(splits_completely_in(&k, 101).unwrap());
        let ps = split_prime(&k, 101).unwrap();
        assert!(ps.iter().all(|p| p.norm() == q(101)));
        assert_eq!(product_above(&ps).unwrap(), FracIdeal::principal(&FieldElement::from_ints(&k, &[101, 0, 0, 0]).unwrap()).unwrap());
        assert!(!splits_completely_in(&k, 13).unwrap());
    }
}
