use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::dyadic::Dyadic;
use super::interval::{ComplexInterval, Interval};
use super::linalg;

/// Integer polynomial, coefficients stored constant term first.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigInt::zero());
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// `x`
    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn lead(&self) -> &BigInt {
        self.coeffs.last().unwrap()
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_one()
    }

    pub fn derivative(&self) -> IntPoly {
        if self.degree() == 0 {
            return IntPoly::new(vec![]);
        }
        IntPoly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
    }

    pub fn to_qpoly(&self) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect())
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Exact value at a dyadic complex point.
    pub fn eval_dyadic_complex(&self, re: &Dyadic, im: &Dyadic) -> (Dyadic, Dyadic) {
        let (mut ar, mut ai) = (Dyadic::zero(), Dyadic::zero());
        for c in self.coeffs.iter().rev() {
            let nr = &(&ar * re) - &(&ai * im);
            let ni = &(&ar * im) + &(&ai * re);
            ar = &nr + &Dyadic::from_int(c.clone());
            ai = ni;
        }
        (ar, ai)
    }

    pub fn eval_complex_interval(&self, z: &ComplexInterval) -> ComplexInterval {
        let mut acc = ComplexInterval::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(z).add(&ComplexInterval::real(Interval::from_int(c.clone())));
        }
        acc
    }

    pub fn is_squarefree(&self) -> bool {
        if self.degree() == 0 {
            return true;
        }
        self.to_qpoly().gcd(&self.derivative().to_qpoly()).degree() == 0
    }

    /// Cauchy bound: every complex root has modulus `< 1 + max |a_i / a_n|`.
    pub fn root_bound(&self) -> f64 {
        let lead = self.lead().abs();
        let lead_f = bigint_to_f64(&lead);
        let m = self.coeffs[..self.degree()].iter().map(|c| bigint_to_f64(&c.abs()) / lead_f).fold(0.0, f64::max);
        1.0 + m
    }

    pub fn mul(&self, o: &IntPoly) -> IntPoly {
        let mut out = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    /// Discriminant `(-1)^(n(n-1)/2) Res(f, f') / lead(f)`.
    pub fn discriminant(&self) -> BigInt {
        let n = self.degree();
        if n == 0 {
            return BigInt::one();
        }
        if n == 1 {
            return BigInt::one();
        }
        let r = resultant(&self.to_qpoly(), &self.derivative().to_qpoly());
        let mut d = r / BigRational::from_integer(self.lead().clone());
        if (n * (n - 1) / 2) % 2 == 1 {
            d = -d;
        }
        assert!(d.is_integer());
        d.to_integer()
    }
}

pub(crate) fn bigint_to_f64(x: &BigInt) -> f64 {
    Dyadic::from_int(x.clone()).to_f64()
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let t = match i {
                0 => c.to_string(),
                1 if c.is_one() => "x".to_string(),
                1 => format!("{c}*x"),
                _ if c.is_one() => format!("x^{i}"),
                _ => format!("{c}*x^{i}"),
            };
            terms.push(t);
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Polynomial with rational coefficients, constant term first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QPoly {
    coeffs: Vec<BigRational>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigRational::zero());
        }
        QPoly { coeffs }
    }

    pub fn zero() -> Self {
        Self::new(vec![])
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn lead(&self) -> &BigRational {
        self.coeffs.last().unwrap()
    }

    pub fn add(&self, o: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        QPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        QPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn scale(&self, k: &BigRational) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, o: &QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }

    pub fn divrem(&self, d: &QPoly) -> (QPoly, QPoly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let mut r = self.coeffs.clone();
        let dd = d.degree();
        if self.degree() < dd || self.is_zero() {
            return (QPoly::zero(), self.clone());
        }
        let mut q = vec![BigRational::zero(); self.degree() - dd + 1];
        let inv_lead = d.lead().recip();
        for i in (0..q.len()).rev() {
            let c = &r[i + dd] * &inv_lead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[i + j] -= &c * dc;
                }
            }
            q[i] = c;
        }
        (QPoly::new(q), QPoly::new(r))
    }

    pub fn rem(&self, d: &QPoly) -> QPoly {
        self.divrem(d).1
    }

    pub fn monic(&self) -> QPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().recip())
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &QPoly) -> QPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> QPoly {
        if self.degree() == 0 {
            return QPoly::zero();
        }
        QPoly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_complex_interval(&self, z: &ComplexInterval, prec: i64) -> ComplexInterval {
        let mut acc = ComplexInterval::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(z).add(&ComplexInterval::from_rational(c, prec)).round_out(prec);
        }
        acc
    }

    /// `self(g(x)) mod m`
    pub fn compose_mod(&self, g: &QPoly, m: &QPoly) -> QPoly {
        let mut acc = QPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(g).add(&QPoly::constant(c.clone())).rem(m);
        }
        acc
    }
}

impl fmt::Debug for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "QPoly[{}]", parts.join(", "))
    }
}

/// Resultant via the Sylvester determinant.
pub fn resultant(f: &QPoly, g: &QPoly) -> BigRational {
    let (m, n) = (f.degree(), g.degree());
    if m == 0 && n == 0 {
        return BigRational::one();
    }
    let size = m + n;
    let mut s = vec![vec![BigRational::zero(); size]; size];
    for r in 0..n {
        for (i, c) in f.coeffs.iter().rev().enumerate() {
            s[r][r + i] = c.clone();
        }
    }
    for r in 0..m {
        for (i, c) in g.coeffs.iter().rev().enumerate() {
            s[n + r][r + i] = c.clone();
        }
    }
    linalg::det(&s)
}
