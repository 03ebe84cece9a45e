use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::linalg::{self, QMatrix};
use crate::arith::{ComplexInterval, Dyadic};
use crate::error::{Error, Result};

use super::cm::{detect_cm, CmStructure};
use super::field::NumberField;

/// Exact element of a number field, stored in integral-basis coordinates.
#[derive(Clone)]
pub struct FieldElement {
    field: Arc<NumberField>,
    coords: Vec<BigRational>,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.field, &other.field) && self.coords == other.coords
    }
}

impl Eq for FieldElement {}

impl std::hash::Hash for FieldElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coords.hash(state);
    }
}

impl FieldElement {
    pub fn new(field: &Arc<NumberField>, coords: Vec<BigRational>) -> Result<Self> {
        if coords.len() != field.degree() {
            return Err(Error::InvalidArgument(format!("expected {} coordinates", field.degree())));
        }
        Ok(FieldElement { field: field.clone(), coords })
    }

    pub fn from_ints(field: &Arc<NumberField>, coords: &[i64]) -> Result<Self> {
        Self::new(field, coords.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn from_int_vec(field: &Arc<NumberField>, coords: &[BigInt]) -> Self {
        FieldElement { field: field.clone(), coords: coords.iter().map(|c| BigRational::from_integer(c.clone())).collect() }
    }

    /// Element with the given power-basis coordinates (polynomial in theta).
    pub fn from_power(field: &Arc<NumberField>, pc: &[BigRational]) -> Result<Self> {
        let n = field.degree();
        if pc.len() > n {
            return Err(Error::InvalidArgument("too many power coordinates".into()));
        }
        let mut full = pc.to_vec();
        full.resize(n, BigRational::zero());
        Ok(FieldElement { field: field.clone(), coords: field.from_power(&full) })
    }

    pub fn zero(field: &Arc<NumberField>) -> Self {
        Self::from_rational(field, BigRational::zero())
    }

    pub fn one(field: &Arc<NumberField>) -> Self {
        Self::from_rational(field, BigRational::one())
    }

    pub fn from_rational(field: &Arc<NumberField>, q: BigRational) -> Self {
        let mut pc = vec![BigRational::zero(); field.degree()];
        pc[0] = q;
        FieldElement { field: field.clone(), coords: field.from_power(&pc) }
    }

    /// The generator `theta` of the power basis.
    pub fn theta(field: &Arc<NumberField>) -> Self {
        let mut pc = vec![BigRational::zero(); field.degree()];
        if field.degree() > 1 {
            pc[1] = BigRational::one();
        } else {
            // Q = Q[x]/(x - c)
            pc[0] = -BigRational::from_integer(field.min_poly().coeffs()[0].clone());
        }
        FieldElement { field: field.clone(), coords: field.from_power(&pc) }
    }

    /// The `j`-th integral basis element.
    pub fn basis_element(field: &Arc<NumberField>, j: usize) -> Self {
        let mut c = vec![BigRational::zero(); field.degree()];
        c[j] = BigRational::one();
        FieldElement { field: field.clone(), coords: c }
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn power_coords(&self) -> Vec<BigRational> {
        self.field.to_power(&self.coords)
    }

    fn same_field(&self, o: &FieldElement) -> Result<()> {
        if Arc::ptr_eq(&self.field, &o.field) {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    fn with(&self, coords: Vec<BigRational>) -> Self {
        FieldElement { field: self.field.clone(), coords }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one(&self.field)
    }

    /// All integral-basis coordinates are integers.
    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.is_integer())
    }

    /// Least `d > 0` with `d * self` integral.
    pub fn denominator(&self) -> BigInt {
        self.coords.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    pub fn add(&self, o: &FieldElement) -> Result<Self> {
        self.same_field(o)?;
        Ok(self.with(self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect()))
    }

    pub fn sub(&self, o: &FieldElement) -> Result<Self> {
        self.same_field(o)?;
        Ok(self.with(self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect()))
    }

    pub fn neg(&self) -> Self {
        self.with(self.coords.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        self.with(self.coords.iter().map(|a| a * k).collect())
    }

    pub fn mul(&self, o: &FieldElement) -> Result<Self> {
        self.same_field(o)?;
        let p = self.field.mul_power(&self.power_coords(), &o.power_coords());
        Ok(self.with(self.field.from_power(&p)))
    }

    pub fn square(&self) -> Self {
        self.mul(self).expect("same field")
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.field);
        for _ in 0..e {
            acc = acc.mul(self).expect("same field");
        }
        acc
    }

    /// Matrix of multiplication by `self`: row `j` holds `b_j * self`.
    pub fn mult_matrix(&self) -> QMatrix {
        let pc = self.power_coords();
        self.field
            .integral_basis()
            .iter()
            .map(|b| self.field.from_power(&self.field.mul_power(b, &pc)))
            .collect()
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let m = self.mult_matrix();
        let inv = linalg::inverse(&m).ok_or(Error::NotAField)?;
        // y M = coords(1)
        Ok(self.with(linalg::vec_mat(Self::one(&self.field).coords(), &inv)))
    }

    pub fn div(&self, o: &FieldElement) -> Result<Self> {
        self.mul(&o.inv()?)
    }

    pub fn norm(&self) -> BigRational {
        linalg::det(&self.mult_matrix())
    }

    pub fn trace(&self) -> BigRational {
        self.field.trace_power(&self.power_coords())
    }

    /// Rational value when the element lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        let pc = self.power_coords();
        if pc.iter().skip(1).all(|c| c.is_zero()) {
            Some(pc[0].clone())
        } else {
            None
        }
    }

    /// `c(z)` for the field's CM conjugation.
    pub fn conj(&self, cm: &CmStructure) -> Self {
        self.with(cm.apply(&self.coords))
    }

    /// `z * c(z)`, an element of the totally real subfield.
    pub fn abs_sq(&self, cm: &CmStructure) -> Self {
        self.mul(&self.conj(cm)).expect("same field")
    }

    /// Exact test `z * c(z) = 1`.
    pub fn is_unit_modulus(&self, cm: &CmStructure) -> bool {
        self.abs_sq(cm).is_one()
    }

    /// `sigma_k(self)` with width at most `2^-bits`.
    pub fn embed(&self, k: usize, bits: u32) -> Result<ComplexInterval> {
        self.field.embed_coords(&self.coords, k, bits)
    }

    /// Values at one embedding per conjugate pair (canonical order).
    pub fn minkowski_embed(&self, bits: u32) -> Result<Vec<ComplexInterval>> {
        if detect_cm(&self.field).is_none() {
            return Err(Error::NotCm);
        }
        self.field.complex_places().into_iter().map(|k| self.embed(k, bits)).collect()
    }

    /// Values at all embeddings in canonical order.
    pub fn all_embeddings(&self, bits: u32) -> Result<Vec<ComplexInterval>> {
        (0..self.field.degree()).map(|k| self.embed(k, bits)).collect()
    }

    /// Approximate value at embedding `k`.
    pub fn approx(&self, k: usize) -> (f64, f64) {
        self.embed(k, 60).map(|b| b.mid_f64()).unwrap_or((f64::NAN, f64::NAN))
    }

    /// Sign of the real embedding `k` of a nonzero element lying in a real
    /// subfield at that embedding, decided by refinement.
    pub fn real_sign(&self, k: usize) -> Result<i32> {
        if self.is_zero() {
            return Ok(0);
        }
        let mut bits = 64;
        loop {
            let v = self.embed(k, bits)?;
            if v.re.is_positive() {
                return Ok(1);
            }
            if v.re.is_negative() {
                return Ok(-1);
            }
            bits *= 2;
            if bits > super::field::MAX_EMBED_BITS {
                return Err(Error::PrecisionExhausted(super::field::MAX_EMBED_BITS));
            }
        }
    }

    /// Human-readable form in the field's preferred generators.
    pub fn display(&self) -> String {
        let field = &self.field;
        if let Some(sp) = field.sqrt_presentation() {
            let pc = self.power_coords();
            let mono = linalg::vec_mat(&pc, &sp.theta_powers);
            let names: Vec<String> = (0..mono.len())
                .map(|mask| {
                    let mut s = String::new();
                    let mut has_i = false;
                    let mut rad: Vec<String> = Vec::new();
                    for (i, d) in sp.ds.iter().enumerate() {
                        if mask >> i & 1 == 1 {
                            if *d == -1 {
                                has_i = true;
                            } else {
                                rad.push(format!("√{d}"));
                            }
                        }
                    }
                    if has_i {
                        s.push('i');
                    }
                    s.push_str(&rad.join(""));
                    s
                })
                .collect();
            return render(&mono, &names);
        }
        let pc = self.power_coords();
        let var = field.var_name();
        let names: Vec<String> = (0..pc.len())
            .map(|i| match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            })
            .collect();
        render(&pc, &names)
    }
}

fn render(coeffs: &[BigRational], names: &[String]) -> String {
    let den = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut terms: Vec<(bool, String)> = Vec::new();
    for (c, name) in coeffs.iter().zip(names) {
        let v = (c * BigRational::from_integer(den.clone())).to_integer();
        if v.is_zero() {
            continue;
        }
        let neg = v.is_negative();
        let a = v.abs();
        let body = if name.is_empty() {
            a.to_string()
        } else if a.is_one() {
            name.clone()
        } else {
            format!("{a}{name}")
        };
        terms.push((neg, body));
    }
    if terms.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (neg, body)) in terms.iter().enumerate() {
        if i == 0 {
            if *neg {
                s.push('-');
            }
        } else {
            s.push_str(if *neg { " - " } else { " + " });
        }
        s.push_str(body);
    }
    if den.is_one() {
        s
    } else if terms.len() == 1 {
        format!("{s}/{den}")
    } else {
        format!("({s})/{den}")
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display())
    }
}

/// Decide `sigma_k(w) <= bound` for an element `w` that is real at `k`.
/// Exact ties are resolved symbolically and count as inside.
pub fn real_embedding_le(w: &FieldElement, k: usize, bound: &BigRational) -> Result<bool> {
    let diff = w.sub(&FieldElement::from_rational(w.field(), bound.clone()))?;
    Ok(diff.real_sign(k)? <= 0)
}

/// Quick containment test of a box in `|z| <= r`, three-valued.
pub fn box_within_radius(b: &ComplexInterval, r2: &Dyadic) -> Option<bool> {
    let m = b.abs_sq();
    if &m.hi <= r2 {
        Some(true)
    } else if &m.lo > r2 {
        Some(false)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::IntPoly;

    fn gaussian() -> Arc<NumberField> {
        NumberField::new(IntPoly::from_i64(&[1, 0, 1]), None).unwrap()
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn gaussian_arithmetic() {
        let k = gaussian();
        let a = FieldElement::from_ints(&k, &[2, 1]).unwrap();
        let b = FieldElement::from_ints(&k, &[2, -1]).unwrap();
        assert_eq!(a.mul(&b).unwrap(), FieldElement::from_ints(&k, &[5, 0]).unwrap());
        let c = FieldElement::from_ints(&k, &[1, 1]).unwrap();
        assert_eq!(c.inv().unwrap().coords(), &[r(1, 2), r(-1, 2)]);
        assert_eq!(a.norm(), r(5, 1));
        assert_eq!(a.trace(), r(4, 1));
        assert!(matches!(FieldElement::zero(&k).inv(), Err(Error::DivisionByZero)));
    }

    #[test]
    fn sqrt_minus_five_norm_form() {
        let k = NumberField::new(IntPoly::from_i64(&[5, 0, 1]), None).unwrap();
        let a = FieldElement::from_ints(&k, &[2, 1]).unwrap();
        let b = FieldElement::from_ints(&k, &[2, -1]).unwrap();
        assert_eq!(a.mul(&b).unwrap().as_rational(), Some(r(9, 1)));
        let cm = detect_cm(&k).unwrap();
        let z = a.scale(&r(1, 3));
        assert!(z.is_unit_modulus(&cm));
        assert_eq!(z.display(), "(2 + √-5)/3");
    }

    #[test]
    fn unit_modulus_in_gaussian_field() {
        let k = gaussian();
        let cm = detect_cm(&k).unwrap();
        let z = FieldElement::new(&k, vec![r(3, 5), r(4, 5)]).unwrap();
        assert!(z.abs_sq(&cm).is_one());
        assert!(z.is_unit_modulus(&cm));
        assert!(FieldElement::theta(&k).is_unit_modulus(&cm));
        let w = FieldElement::from_ints(&k, &[1, 1]).unwrap();
        assert!(!w.is_unit_modulus(&cm));
        assert_eq!(w.abs_sq(&cm).as_rational(), Some(r(2, 1)));
        assert_eq!(z.display(), "(3 + 4i)/5");
        let m = FieldElement::theta(&k).minkowski_embed(64).unwrap();
        assert_eq!(m.len(), 1);
        assert!(m[0].contains(&Dyadic::zero(), &Dyadic::one()));
    }
}
