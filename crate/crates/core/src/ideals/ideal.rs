//! Fractional ideals stored as a Hermite-normal-form lattice over the
//! integral basis together with one positive denominator.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::linalg::{self, QMatrix, ZMatrix};
use crate::error::{Error, Result};
use crate::numberfield::{CmStructure, FieldElement, NumberField};

#[derive(Clone)]
pub struct FracIdeal {
    field: Arc<NumberField>,
    /// Upper-triangular HNF basis of `den * I`, rows in basis coordinates.
    num: ZMatrix,
    den: BigInt,
}

impl PartialEq for FracIdeal {
    fn eq(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.field, &o.field) && self.den == o.den && self.num == o.num
    }
}

impl Eq for FracIdeal {}

impl std::hash::Hash for FracIdeal {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl fmt::Debug for FracIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FracIdeal({:?} / {})", self.num.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(), self.den)
    }
}

impl FracIdeal {
    /// The Z-lattice spanned by `rows` (basis coordinates). The caller
    /// guarantees the lattice is an O_K-module.
    pub fn from_lattice(field: &Arc<NumberField>, rows: &QMatrix) -> Result<Self> {
        let n = field.degree();
        let d = linalg::common_denominator(rows.iter().flatten());
        let zrows: ZMatrix = rows.iter().map(|r| r.iter().map(|q| (q * BigRational::from_integer(d.clone())).to_integer()).collect()).collect();
        let h = linalg::hnf(&zrows, n).ok_or(Error::ZeroIdeal)?;
        Ok(Self::normalized(field, h, d))
    }

    fn normalized(field: &Arc<NumberField>, mut num: ZMatrix, mut den: BigInt) -> Self {
        let g = num.iter().flatten().fold(den.clone(), |g, x| g.gcd(x));
        if !g.is_one() {
            for r in num.iter_mut() {
                for x in r.iter_mut() {
                    *x = &*x / &g;
                }
            }
            den /= &g;
        }
        FracIdeal { field: field.clone(), num, den }
    }

    /// The O_K-module generated by `gens`.
    pub fn from_generators(field: &Arc<NumberField>, gens: &[FieldElement]) -> Result<Self> {
        let mut rows = Vec::new();
        for g in gens {
            if !Arc::ptr_eq(g.field(), field) {
                return Err(Error::FieldMismatch);
            }
            if !g.is_zero() {
                rows.extend(g.mult_matrix());
            }
        }
        if rows.is_empty() {
            return Err(Error::ZeroIdeal);
        }
        Self::from_lattice(field, &rows)
    }

    pub fn principal(z: &FieldElement) -> Result<Self> {
        Self::from_generators(z.field(), std::slice::from_ref(z))
    }

    pub fn unit(field: &Arc<NumberField>) -> Self {
        Self::principal(&FieldElement::one(field)).expect("one is nonzero")
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    /// HNF basis of the integral lattice `denominator * I`.
    pub fn numerator_hnf(&self) -> &ZMatrix {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    /// Z-basis of `I` as rational rows.
    pub fn basis(&self) -> QMatrix {
        self.num.iter().map(|r| r.iter().map(|x| BigRational::new(x.clone(), self.den.clone())).collect()).collect()
    }

    pub fn basis_elements(&self) -> Vec<FieldElement> {
        self.basis().into_iter().map(|r| FieldElement::new(&self.field, r).expect("degree matches")).collect()
    }

    pub fn norm(&self) -> BigRational {
        let d = linalg::triangular_det(&self.num);
        BigRational::new(d, self.den.pow(self.field.degree() as u32))
    }

    pub fn contains(&self, z: &FieldElement) -> bool {
        if !Arc::ptr_eq(z.field(), &self.field) {
            return false;
        }
        // solve c * num = den * z for upper-triangular num, check c integral
        let n = self.field.degree();
        let mut rest: Vec<BigRational> = z.coords().iter().map(|c| c * BigRational::from_integer(self.den.clone())).collect();
        for i in 0..n {
            let c = &rest[i] / BigRational::from_integer(self.num[i][i].clone());
            if !c.is_integer() {
                return false;
            }
            if !c.is_zero() {
                for k in i..n {
                    let t = &c * BigRational::from_integer(self.num[i][k].clone());
                    rest[k] -= t;
                }
            }
        }
        true
    }

    fn check_field(&self, o: &FracIdeal) -> Result<()> {
        if Arc::ptr_eq(&self.field, &o.field) {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn mul(&self, o: &FracIdeal) -> Result<FracIdeal> {
        self.check_field(o)?;
        let n = self.field.degree();
        let a = self.basis_elements_int();
        let b = o.basis_elements_int();
        // N(A) N(B) lies in A B; reducing generators modulo it keeps entries small
        let m = linalg::triangular_det(&self.num) * linalg::triangular_det(&o.num);
        let mut rows: ZMatrix = Vec::with_capacity(n * n + n);
        for x in &a {
            for y in &b {
                let p = x.mul(y)?;
                rows.push(p.coords().iter().map(|c| c.to_integer().mod_floor(&m)).collect());
            }
        }
        for i in 0..n {
            rows.push((0..n).map(|j| if i == j { m.clone() } else { BigInt::zero() }).collect());
        }
        let h = linalg::hnf(&rows, n).ok_or(Error::ZeroIdeal)?;
        Ok(Self::normalized(&self.field, h, &self.den * &o.den))
    }

    fn basis_elements_int(&self) -> Vec<FieldElement> {
        self.num.iter().map(|r| FieldElement::from_int_vec(&self.field, r)).collect()
    }

    pub fn pow(&self, e: u32) -> Result<FracIdeal> {
        let mut acc = FracIdeal::unit(&self.field);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// `I^-1 = { x : x I ⊆ O_K }`.
    pub fn inv(&self) -> Result<FracIdeal> {
        let n = self.field.degree();
        // y in A^-1 iff y M_a is integral for every basis element a of A
        let mut cols: ZMatrix = Vec::with_capacity(n * n);
        for a in self.basis_elements_int() {
            let m = a.mult_matrix();
            for j in 0..n {
                cols.push((0..n).map(|i| m[i][j].to_integer()).collect());
            }
        }
        let c = linalg::hnf(&cols, n).ok_or(Error::ZeroIdeal)?;
        let ct: QMatrix = linalg::transpose(&c).into_iter().map(|r| r.into_iter().map(BigRational::from_integer).collect()).collect();
        let dual = linalg::inverse(&ct).ok_or(Error::ZeroIdeal)?;
        let scale = BigRational::from_integer(self.den.clone());
        let rows: QMatrix = dual.into_iter().map(|r| r.into_iter().map(|x| x * &scale).collect()).collect();
        Self::from_lattice(&self.field, &rows)
    }

    pub fn div(&self, o: &FracIdeal) -> Result<FracIdeal> {
        self.mul(&o.inv()?)
    }

    /// Image under complex conjugation.
    pub fn conj(&self, cm: &CmStructure) -> Result<FracIdeal> {
        let rows: QMatrix = self.basis().iter().map(|r| cm.apply(r)).collect();
        Self::from_lattice(&self.field, &rows)
    }

    /// Scale by a nonzero rational.
    pub fn scale(&self, q: &BigRational) -> Result<FracIdeal> {
        if q.is_zero() {
            return Err(Error::ZeroIdeal);
        }
        let q = q.abs();
        let rows: QMatrix = self.basis().into_iter().map(|r| r.into_iter().map(|x| x * &q).collect()).collect();
        Self::from_lattice(&self.field, &rows)
    }

    /// True if multiplication by every integral basis element preserves the
    /// lattice.
    pub fn is_module(&self) -> bool {
        let n = self.field.degree();
        let basis = self.basis_elements();
        (0..n).all(|j| {
            let b = FieldElement::basis_element(&self.field, j);
            basis.iter().all(|x| self.contains(&x.mul(&b).expect("same field")))
        })
    }

    /// `(numerator rows as strings, denominator)` for report output.
    pub fn dump(&self) -> (Vec<Vec<String>>, String) {
        (self.num.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(), self.den.to_string())
    }
}

/// Product of ideals, with a field check.
pub fn ideal_mul(a: &FracIdeal, b: &FracIdeal) -> Result<FracIdeal> {
    a.mul(b)
}

pub fn ideal_inv(a: &FracIdeal) -> Result<FracIdeal> {
    a.inv()
}

pub fn conj_ideal(a: &FracIdeal, cm: &CmStructure) -> Result<FracIdeal> {
    a.conj(cm)
}

pub fn ideal_norm(a: &FracIdeal) -> BigRational {
    a.norm()
}
