use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::linalg::{self, QMatrix};
use crate::arith::modular::factorize;
use crate::arith::roots::{isolate_roots, refine_roots, RootIsolation};
use crate::arith::{ComplexInterval, Dyadic, IntPoly, Interval};
use crate::error::{Error, Result};

use super::cm::CmStructure;

/// Precision at which roots are first isolated.
pub const DEFAULT_ROOT_BITS: u32 = 64;
/// Hard cap for embedding refinement.
pub const MAX_EMBED_BITS: u32 = 8192;

/// How the integral basis was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasisOrigin {
    /// Supplied by the caller.
    User,
    /// Closed formula for quadratic fields.
    Quadratic,
    /// Ring generated by the quadratic subfield integers, certified maximal by
    /// the conductor-discriminant formula.
    Multiquadratic,
    /// Tensor product of two integral bases with coprime discriminants.
    Tensor,
    /// An order that could not be certified maximal.
    Order,
    /// Power basis `1, theta, ..., theta^(n-1)`.
    Power,
}

/// Multiquadratic presentation `Q(sqrt d_1, ..., sqrt d_k)` of a field.
#[derive(Clone, Debug)]
pub struct SqrtPresentation {
    pub ds: Vec<i64>,
    /// Row `j` holds `theta^j` in the monomial basis `prod_{i in S} sqrt(d_i)`,
    /// monomials indexed by the bitmask `S`.
    pub theta_powers: QMatrix,
}

/// Embedding values of the integral basis at one working precision.
pub(crate) struct EmbedTable {
    /// `values[k][j] = sigma_k(b_j)`
    pub values: Vec<Vec<ComplexInterval>>,
}

/// A number field `Q[x]/(f)` with an integral basis and certified embeddings.
pub struct NumberField {
    label: String,
    min_poly: IntPoly,
    n: usize,
    basis: QMatrix,
    basis_inv: QMatrix,
    basis_is_power: bool,
    origin: BasisOrigin,
    disc: BigInt,
    /// `theta^k` reduced mod `f`, for `k < 2n - 1`, in power coordinates.
    reduction: Vec<Vec<BigInt>>,
    /// `Tr(theta^k)` for `k < 2n - 1`.
    power_sums: Vec<BigInt>,
    var: String,
    sqrt: Option<SqrtPresentation>,
    roots: RootIsolation,
    refined: Mutex<RootIsolation>,
    tables: Mutex<BTreeMap<u32, Arc<EmbedTable>>>,
    cm: OnceLock<Option<Arc<CmStructure>>>,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumberField")
            .field("label", &self.label)
            .field("min_poly", &self.min_poly)
            .field("disc", &self.disc)
            .field("origin", &self.origin)
            .finish()
    }
}

fn q(x: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(x.into())
}

/// Squarefree part and square root of the square part: `n = m^2 d`.
pub(crate) fn squarefree_decompose(n: i64) -> (i64, i64) {
    let sign = n.signum();
    let mut d = 1i64;
    let mut m = 1i64;
    for (p, e) in factorize(n.unsigned_abs()) {
        let p = p as i64;
        m *= p.pow(e / 2);
        if e % 2 == 1 {
            d *= p;
        }
    }
    (sign * d, m)
}

/// Absolute discriminant of `Q(sqrt d)` for squarefree `d != 1`.
pub(crate) fn quadratic_disc(d: i64) -> i64 {
    if d.rem_euclid(4) == 1 {
        d
    } else {
        4 * d
    }
}

impl NumberField {
    /// Field defined by a monic squarefree polynomial. Without a basis,
    /// quadratic fields get their ring of integers and higher degrees fall
    /// back to the power basis (flagged index-conditional).
    pub fn new(min_poly: IntPoly, integral_basis: Option<QMatrix>) -> Result<Arc<NumberField>> {
        Self::with_label(min_poly, integral_basis, None)
    }

    pub fn with_label(min_poly: IntPoly, integral_basis: Option<QMatrix>, label: Option<String>) -> Result<Arc<NumberField>> {
        if min_poly.degree() == 0 {
            return Err(Error::InvalidArgument("constant polynomial".into()));
        }
        if !min_poly.is_monic() {
            return Err(Error::NonMonic);
        }
        if !min_poly.is_squarefree() {
            return Err(Error::NonSquarefree);
        }
        let n = min_poly.degree();
        let (basis, origin, var, sqrt) = match integral_basis {
            Some(b) => {
                if b.len() != n || b.iter().any(|r| r.len() != n) {
                    return Err(Error::InvalidArgument(format!("integral basis must be {n}x{n}")));
                }
                (b, BasisOrigin::User, "θ".to_string(), None)
            }
            None if n == 2 => quadratic_basis(&min_poly)?,
            None if n == 1 => (linalg::identity(1), BasisOrigin::Power, "θ".to_string(), Some(SqrtPresentation { ds: vec![], theta_powers: linalg::identity(1) })),
            None => (linalg::identity(n), BasisOrigin::Power, "θ".to_string(), None),
        };
        let label = label.unwrap_or_else(|| format!("Q[x]/({min_poly})"));
        Self::assemble(min_poly, basis, origin, label, var, sqrt)
    }

    pub(crate) fn assemble(
        min_poly: IntPoly,
        basis: QMatrix,
        origin: BasisOrigin,
        label: String,
        var: String,
        sqrt: Option<SqrtPresentation>,
    ) -> Result<Arc<NumberField>> {
        let n = min_poly.degree();
        let basis_inv = linalg::inverse(&basis).ok_or_else(|| Error::InvalidArgument("integral basis is singular".into()))?;
        let basis_is_power = basis == linalg::identity(n);
        let reduction = reduction_table(&min_poly);
        let power_sums = newton_power_sums(&min_poly);
        let roots = isolate_roots(&min_poly, DEFAULT_ROOT_BITS)?;
        let mut field = NumberField {
            label,
            min_poly,
            n,
            basis,
            basis_inv,
            basis_is_power,
            origin,
            disc: BigInt::zero(),
            reduction,
            power_sums,
            var,
            sqrt,
            refined: Mutex::new(roots.clone()),
            roots,
            tables: Mutex::new(BTreeMap::new()),
            cm: OnceLock::new(),
        };
        if field.origin == BasisOrigin::User && !field.basis_closed_under_mul() {
            return Err(Error::InvalidArgument("integral basis does not span a ring of integers".into()));
        }
        let d = linalg::det(&field.trace_matrix());
        if !d.is_integer() {
            return Err(Error::InvalidArgument("integral basis is not integral".into()));
        }
        field.disc = d.to_integer();
        Ok(Arc::new(field))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn min_poly(&self) -> &IntPoly {
        &self.min_poly
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    /// Rows: integral basis elements in power-basis coordinates.
    pub fn integral_basis(&self) -> &QMatrix {
        &self.basis
    }

    pub fn disc(&self) -> &BigInt {
        &self.disc
    }

    pub fn basis_origin(&self) -> &BasisOrigin {
        &self.origin
    }

    /// True when ideal-theoretic results depend on an uncertified basis.
    pub fn index_conditional(&self) -> bool {
        matches!(self.origin, BasisOrigin::Power | BasisOrigin::Order) && self.n > 1 && !self.disc_is_squarefree()
    }

    // an order with squarefree discriminant is maximal
    fn disc_is_squarefree(&self) -> bool {
        match self.disc.abs().to_u64() {
            Some(v) => v > 0 && factorize(v).iter().all(|&(_, e)| e == 1),
            None => false,
        }
    }

    /// `[O : Z[theta]]` for the stored basis (`1 / |det B|`).
    pub fn index(&self) -> BigInt {
        let d = linalg::det(&self.basis).abs().recip();
        d.to_integer()
    }

    pub fn var_name(&self) -> &str {
        &self.var
    }

    pub fn sqrt_presentation(&self) -> Option<&SqrtPresentation> {
        self.sqrt.as_ref()
    }

    /// Roots of the minimal polynomial at the default precision, canonical order.
    pub fn roots(&self) -> &RootIsolation {
        &self.roots
    }

    pub fn real_embeddings(&self) -> usize {
        self.roots.real_count()
    }

    pub fn is_totally_real(&self) -> bool {
        self.real_embeddings() == self.n
    }

    pub fn is_totally_imaginary(&self) -> bool {
        self.real_embeddings() == 0
    }

    /// Index of the embedding complex-conjugate to `k`.
    pub fn conj_embedding(&self, k: usize) -> usize {
        self.roots.conj[k]
    }

    /// One embedding per archimedean place: real ones, then the upper member
    /// of each conjugate pair, in canonical order.
    pub fn places(&self) -> Vec<usize> {
        (0..self.n).filter(|&k| self.roots.conj[k] >= k).collect()
    }

    /// Complex places, as used for Minkowski coordinates.
    pub fn complex_places(&self) -> Vec<usize> {
        (0..self.n).filter(|&k| self.roots.conj[k] > k).collect()
    }

    pub(crate) fn cm_cell(&self) -> &OnceLock<Option<Arc<CmStructure>>> {
        &self.cm
    }

    /// Basis coordinates to power-basis coordinates.
    pub fn to_power(&self, coords: &[BigRational]) -> Vec<BigRational> {
        if self.basis_is_power {
            return coords.to_vec();
        }
        linalg::vec_mat(coords, &self.basis)
    }

    pub fn from_power(&self, pc: &[BigRational]) -> Vec<BigRational> {
        if self.basis_is_power {
            return pc.to_vec();
        }
        linalg::vec_mat(pc, &self.basis_inv)
    }

    /// Product in power coordinates.
    pub fn mul_power(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let n = self.n;
        let mut prod = vec![BigRational::zero(); 2 * n - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        let mut out: Vec<BigRational> = prod[..n].to_vec();
        for (k, c) in prod.iter().enumerate().skip(n) {
            if c.is_zero() {
                continue;
            }
            for (o, r) in out.iter_mut().zip(&self.reduction[k]) {
                if !r.is_zero() {
                    *o += c * BigRational::from_integer(r.clone());
                }
            }
        }
        out
    }

    /// Trace of an element given in power coordinates.
    pub fn trace_power(&self, pc: &[BigRational]) -> BigRational {
        pc.iter().zip(&self.power_sums).map(|(c, s)| c * BigRational::from_integer(s.clone())).sum()
    }

    /// `Tr(b_i b_j)` over the integral basis.
    pub fn trace_matrix(&self) -> QMatrix {
        let n = self.n;
        let mut t = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                let v = self.trace_power(&self.mul_power(&self.basis[i], &self.basis[j]));
                t[i][j] = v.clone();
                t[j][i] = v;
            }
        }
        t
    }

    /// `b_i * b_j` in basis coordinates, for all `i, j`.
    pub fn structure_constants(&self) -> Vec<Vec<Vec<BigRational>>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.from_power(&self.mul_power(&self.basis[i], &self.basis[j]))).collect())
            .collect()
    }

    fn basis_closed_under_mul(&self) -> bool {
        self.structure_constants().iter().flatten().flatten().all(|c| c.is_integer())
    }

    /// Roots refined so every box has width at most `2^-bits`.
    pub fn roots_at(&self, bits: u32) -> Result<RootIsolation> {
        let mut cur = self.refined.lock().expect("root cache poisoned");
        let target = Dyadic::pow2(-(bits as i64 + 1));
        if cur.max_radius() <= target {
            return Ok(cur.clone());
        }
        let next = refine_roots(&self.min_poly, &cur, bits)?;
        *cur = next.clone();
        Ok(next)
    }

    /// `sigma_k(b_j)` for all `k, j`, each box of width at most `2^-bits`.
    pub(crate) fn embed_table(&self, bits: u32) -> Result<Arc<EmbedTable>> {
        let bits = bits.div_ceil(32) * 32;
        if bits > MAX_EMBED_BITS {
            return Err(Error::PrecisionExhausted(MAX_EMBED_BITS));
        }
        if let Some(t) = self.tables.lock().expect("table cache poisoned").range(bits..).next() {
            return Ok(t.1.clone());
        }
        let target = Dyadic::pow2(-(bits as i64));
        let coeff_bits = self.basis.iter().flatten().map(|c| c.numer().bits().max(c.denom().bits())).max().unwrap_or(1) as u32;
        let rb = self.min_poly.root_bound().log2().ceil().max(1.0) as u32;
        let mut guard = 16 + coeff_bits + (self.n as u32) * (rb + 1);
        loop {
            let w = bits + guard;
            if w > MAX_EMBED_BITS + 512 {
                return Err(Error::PrecisionExhausted(MAX_EMBED_BITS));
            }
            let roots = self.roots_at(w)?;
            let grid = w as i64 + 8;
            let mut values = Vec::with_capacity(self.n);
            for b in roots.boxes() {
                let mut powers = Vec::with_capacity(self.n);
                let mut p = ComplexInterval::one();
                for _ in 0..self.n {
                    powers.push(p.clone());
                    p = p.mul(&b).round_out(grid);
                }
                let row: Vec<ComplexInterval> = self
                    .basis
                    .iter()
                    .map(|bj| {
                        let mut acc = ComplexInterval::zero();
                        for (c, pw) in bj.iter().zip(&powers) {
                            if !c.is_zero() {
                                acc = acc.add(&pw.scale(&Interval::from_rational(c, grid)));
                            }
                        }
                        acc.round_out(grid)
                    })
                    .collect();
                values.push(row);
            }
            if values.iter().flatten().all(|v| v.width() <= target) {
                let t = Arc::new(EmbedTable { values });
                self.tables.lock().expect("table cache poisoned").insert(bits, t.clone());
                return Ok(t);
            }
            guard *= 2;
        }
    }

    /// `sigma_k` of the element with basis coordinates `coords`, width at most
    /// `2^-bits`.
    pub fn embed_coords(&self, coords: &[BigRational], k: usize, bits: u32) -> Result<ComplexInterval> {
        let target = Dyadic::pow2(-(bits as i64));
        let mag: u64 = coords.iter().map(|c| (c.numer().bits() + 1).saturating_sub(c.denom().bits()) + 1).max().unwrap_or(1);
        let extra = mag as u32 + (usize::BITS - self.n.leading_zeros()) + 8;
        let mut w = bits + extra;
        loop {
            let t = self.embed_table(w)?;
            let grid = w as i64 + 8;
            let mut acc = ComplexInterval::zero();
            for (c, v) in coords.iter().zip(&t.values[k]) {
                if c.is_zero() {
                    continue;
                }
                let term = if c.is_integer() { v.scale(&Interval::from_int(c.numer().clone())) } else { v.scale(&Interval::from_rational(c, grid)) };
                acc = acc.add(&term);
            }
            let acc = acc.round_out(bits as i64 + 2);
            if acc.width() <= target {
                return Ok(acc);
            }
            w += 64;
        }
    }

    /// Enclosures of `sigma_k(b_j)` for integer combinations in lattice work.
    pub fn basis_embeddings(&self, bits: u32) -> Result<Vec<Vec<ComplexInterval>>> {
        Ok(self.embed_table(bits)?.values.clone())
    }
}

fn reduction_table(f: &IntPoly) -> Vec<Vec<BigInt>> {
    let n = f.degree();
    let c = f.coeffs();
    let mut out = Vec::with_capacity(2 * n - 1);
    for k in 0..n {
        let mut v = vec![BigInt::zero(); n];
        v[k] = BigInt::one();
        out.push(v);
    }
    // theta^n = -sum c_i theta^i, then shift
    let mut cur: Vec<BigInt> = (0..n).map(|i| -c[i].clone()).collect();
    for _ in n..(2 * n).saturating_sub(1) {
        out.push(cur.clone());
        let top = cur[n - 1].clone();
        let mut next = vec![BigInt::zero(); n];
        for i in (1..n).rev() {
            next[i] = cur[i - 1].clone();
        }
        for i in 0..n {
            next[i] -= &top * &c[i];
        }
        cur = next;
    }
    out
}

/// `Tr(theta^k)` for `k < 2n - 1` by Newton's identities.
fn newton_power_sums(f: &IntPoly) -> Vec<BigInt> {
    let n = f.degree();
    let a = |i: usize| f.coeffs()[i].clone();
    let mut s: Vec<BigInt> = vec![BigInt::from(n)];
    for k in 1..(2 * n).saturating_sub(1).max(1) {
        let mut acc = BigInt::zero();
        for i in 1..=k.min(n) {
            let coef = a(n - i);
            if i < k {
                acc += &coef * &s[k - i];
            } else {
                acc += &coef * BigInt::from(k);
            }
        }
        s.push(-acc);
    }
    s
}

type BasisChoice = (QMatrix, BasisOrigin, String, Option<SqrtPresentation>);

fn quadratic_basis(f: &IntPoly) -> Result<BasisChoice> {
    // f = x^2 + b x + c, theta = (-b + m sqrt d) / 2
    let b = f.coeffs()[1].clone();
    let c = f.coeffs()[0].clone();
    let d0 = &b * &b - BigInt::from(4) * &c;
    let Some(d0) = d0.to_i64().filter(|v| v.unsigned_abs() < 1 << 53) else {
        return Ok((linalg::identity(2), BasisOrigin::Power, "θ".into(), None));
    };
    let (d, m) = squarefree_decompose(d0);
    if d == 1 {
        return Err(Error::NotAField);
    }
    let (bq, mq) = (q(b.clone()), q(m));
    let two = q(2);
    // sqrt d = (2 theta + b) / m
    let sqrt_d = vec![&bq / &mq, &two / &mq];
    let omega = if d.rem_euclid(4) == 1 {
        vec![(q(1) + &sqrt_d[0]) / &two, &sqrt_d[1] / &two]
    } else {
        sqrt_d.clone()
    };
    let basis = vec![vec![q(1), q(0)], vec![omega[0].clone(), omega[1].clone()]];
    let var = if b.is_zero() && m == 2 {
        if d == -1 {
            "i".to_string()
        } else {
            format!("√{d}")
        }
    } else {
        "θ".to_string()
    };
    // theta = (-b + m sqrt d) / 2 in the monomial basis {1, sqrt d}
    let theta_powers = vec![vec![q(1), q(0)], vec![-&bq / &two, &mq / &two]];
    Ok((basis, BasisOrigin::Quadratic, var, Some(SqrtPresentation { ds: vec![d], theta_powers })))
}

/// Least common multiple of the denominators of a coordinate vector.
pub fn denominator(coords: &[BigRational]) -> BigInt {
    coords.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_discriminants() {
        let k = NumberField::new(IntPoly::from_i64(&[1, 0, 1]), None).unwrap();
        assert_eq!(k.disc(), &BigInt::from(-4));
        assert_eq!(k.integral_basis(), &linalg::identity(2));
        let k = NumberField::new(IntPoly::from_i64(&[5, 0, 1]), None).unwrap();
        assert_eq!(k.disc(), &BigInt::from(-20));
        assert_eq!(k.var_name(), "√-5");
        let k = NumberField::new(IntPoly::from_i64(&[-1, -1, 1]), None).unwrap();
        assert_eq!(k.disc(), &BigInt::from(5));
        assert_eq!(k.integral_basis(), &linalg::identity(2));
        // x^2 - 5 gets the basis {1, (1 + sqrt 5)/2}
        let k = NumberField::new(IntPoly::from_i64(&[-5, 0, 1]), None).unwrap();
        assert_eq!(k.disc(), &BigInt::from(5));
        assert_eq!(k.integral_basis()[1], vec![BigRational::new(1.into(), 2.into()), BigRational::new(1.into(), 2.into())]);
        // x^2 - 12 = 4 * 3: basis {1, sqrt 3} = {1, theta/2}
        let k = NumberField::new(IntPoly::from_i64(&[-12, 0, 1]), None).unwrap();
        assert_eq!(k.disc(), &BigInt::from(12));
    }

    #[test]
    fn rejects_bad_polynomials() {
        assert!(matches!(NumberField::new(IntPoly::from_i64(&[1, 0, 2]), None), Err(Error::NonMonic)));
        assert!(matches!(NumberField::new(IntPoly::from_i64(&[1, 2, 1]), None), Err(Error::NonSquarefree)));
        assert!(matches!(NumberField::new(IntPoly::from_i64(&[-1, 0, 1]), None), Err(Error::NotAField)));
    }

    #[test]
    fn power_sums_match_roots() {
        // x^2 + 1: Tr(1) = 2, Tr(i) = 0, Tr(i^2) = -2
        assert_eq!(newton_power_sums(&IntPoly::from_i64(&[1, 0, 1])), vec![2.into(), 0.into(), BigInt::from(-2)]);
        // x^3 - 2: Tr(theta^3) = 6
        let s = newton_power_sums(&IntPoly::from_i64(&[-2, 0, 0, 1]));
        assert_eq!(s[3], BigInt::from(6));
        assert_eq!(s[4], BigInt::zero());
    }

    #[test]
    fn embeddings_of_basis() {
        let k = NumberField::new(IntPoly::from_i64(&[1, 0, 1]), None).unwrap();
        let v = k.embed_coords(&[q(3), q(4)], 0, 100).unwrap();
        assert!(v.contains(&Dyadic::from_int(3), &Dyadic::from_int(4)));
        assert!(v.width() <= Dyadic::pow2(-100));
        assert_eq!(k.places(), vec![0]);
    }
}
