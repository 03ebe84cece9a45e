//! Multiquadratic fields and quadratic extensions.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::linalg::{self, QMatrix};
use crate::arith::modular::is_squarefree;
use crate::arith::IntPoly;
use crate::error::{Error, Result};

use super::field::{quadratic_disc, squarefree_decompose, BasisOrigin, NumberField, SqrtPresentation};

fn q(x: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(x.into())
}

/// Multiplication in `Q[s_1..s_k]/(s_i^2 - d_i)`, monomials indexed by bitmask.
fn mono_mul(a: &[BigRational], b: &[BigRational], ds: &[i64]) -> Vec<BigRational> {
    let n = a.len();
    let mut out = vec![BigRational::zero(); n];
    for (s, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (t, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            let common = s & t;
            let mut f = BigInt::one();
            for (i, d) in ds.iter().enumerate() {
                if common >> i & 1 == 1 {
                    f *= *d;
                }
            }
            out[s ^ t] += x * y * BigRational::from_integer(f);
        }
    }
    out
}

/// Minimal polynomial and power table of `theta` in an algebra of dimension
/// `n`, or `None` when `theta` does not generate it.
fn primitive(theta: &[BigRational], mul: &dyn Fn(&[BigRational], &[BigRational]) -> Vec<BigRational>) -> Option<(IntPoly, QMatrix)> {
    let n = theta.len();
    let mut one = vec![BigRational::zero(); n];
    one[0] = BigRational::one();
    let mut powers = vec![one];
    for j in 1..=n {
        let next = mul(&powers[j - 1], theta);
        powers.push(next);
    }
    let p: QMatrix = powers[..n].to_vec();
    let pinv = linalg::inverse(&p)?;
    let a = linalg::vec_mat(&powers[n], &pinv);
    let mut coeffs: Vec<BigInt> = Vec::with_capacity(n + 1);
    for c in &a {
        if !c.is_integer() {
            return None;
        }
        coeffs.push(-c.to_integer());
    }
    coeffs.push(BigInt::one());
    Some((IntPoly::new(coeffs), p))
}

/// Small positive coefficient vectors, ordered by max entry then lexicographically.
fn coefficient_search(k: usize, cap: i64) -> impl Iterator<Item = Vec<i64>> {
    (1..=cap).flat_map(move |m| {
        let total = (m as u64).pow(k as u32);
        (0..total).filter_map(move |idx| {
            let mut v = Vec::with_capacity(k);
            let mut x = idx;
            for _ in 0..k {
                v.push((x % m as u64) as i64 + 1);
                x /= m as u64;
            }
            v.reverse();
            (v.iter().copied().max() == Some(m)).then_some(v)
        })
    })
}

/// Row HNF basis of the Z-span of rational vectors.
fn rational_span(vectors: &[Vec<BigRational>], n: usize) -> Option<QMatrix> {
    let den = linalg::common_denominator(vectors.iter().flatten());
    let dq = BigRational::from_integer(den.clone());
    let rows: Vec<Vec<BigInt>> = vectors.iter().map(|v| v.iter().map(|c| (c * &dq).to_integer()).collect()).collect();
    let h = linalg::hnf(&rows, n)?;
    Some(h.into_iter().map(|r| r.into_iter().map(|c| BigRational::new(c, den.clone())).collect()).collect())
}

/// Smallest ring containing `generators` (which must include 1).
fn ring_closure(generators: Vec<Vec<BigRational>>, n: usize, mul: &dyn Fn(&[BigRational], &[BigRational]) -> Vec<BigRational>) -> Option<QMatrix> {
    let mut basis = rational_span(&generators, n)?;
    loop {
        let mut vecs = basis.clone();
        for i in 0..n {
            for j in i..n {
                vecs.push(mul(&basis[i], &basis[j]));
            }
        }
        let next = rational_span(&vecs, n)?;
        if next == basis {
            return Some(basis);
        }
        basis = next;
    }
}

fn sqrt_label(d: i64) -> String {
    if d == -1 {
        "i".into()
    } else {
        format!("√{d}")
    }
}

/// `Q(sqrt d_1, ..., sqrt d_k)` with primitive element `sum c_i sqrt d_i`.
pub fn compositum_multiquadratic(ds: &[i64]) -> Result<Arc<NumberField>> {
    let k = ds.len();
    if k > 4 {
        return Err(Error::InvalidArgument("at most 4 square-root generators (degree 16)".into()));
    }
    for &d in ds {
        if d == 0 || d == 1 || !is_squarefree(d) {
            return Err(Error::NotSquarefree(d.to_string()));
        }
    }
    let n = 1usize << k;
    // squarefree kernel of each subproduct; independence means none is 1
    let mut kernels = vec![(1i64, 1i64); n];
    for (mask, slot) in kernels.iter_mut().enumerate().skip(1) {
        let mut prod: i128 = 1;
        for (i, d) in ds.iter().enumerate() {
            if mask >> i & 1 == 1 {
                prod *= *d as i128;
            }
        }
        let prod = i64::try_from(prod).map_err(|_| Error::InvalidArgument("generators too large".into()))?;
        let (e, m) = squarefree_decompose(prod);
        if e == 1 {
            return Err(Error::DependentGenerators);
        }
        *slot = (e, m);
    }
    let mul = |a: &[BigRational], b: &[BigRational]| mono_mul(a, b, ds);
    let mut found = None;
    let search: Box<dyn Iterator<Item = Vec<i64>>> = if k == 0 { Box::new(std::iter::once(vec![])) } else { Box::new(coefficient_search(k, 8)) };
    for c in search {
        let mut theta = vec![BigRational::zero(); n];
        for (i, ci) in c.iter().enumerate() {
            theta[1 << i] = q(*ci);
        }
        if let Some(res) = primitive(&theta, &mul) {
            found = Some(res);
            break;
        }
    }
    let (min_poly, p) = found.ok_or(Error::DependentGenerators)?;
    let pinv = linalg::inverse(&p).expect("primitive element");
    // 1 and omega_e for every quadratic subfield Q(sqrt e)
    let mut gens = Vec::with_capacity(n);
    let mut one = vec![BigRational::zero(); n];
    one[0] = BigRational::one();
    gens.push(one);
    for (mask, &(e, m)) in kernels.iter().enumerate().skip(1) {
        let mut v = vec![BigRational::zero(); n];
        // sqrt e = s_mask / m
        if e.rem_euclid(4) == 1 {
            v[0] = BigRational::new(1.into(), 2.into());
            v[mask] = BigRational::new(1.into(), (2 * m).into());
        } else {
            v[mask] = BigRational::new(1.into(), m.into());
        }
        gens.push(v);
    }
    let ring = ring_closure(gens, n, &mul).ok_or(Error::DependentGenerators)?;
    let basis: QMatrix = ring.iter().map(|v| linalg::vec_mat(v, &pinv)).collect();
    let label = if k == 0 { "Q".to_string() } else { format!("Q({})", ds.iter().map(|&d| sqrt_label(d)).collect::<Vec<_>>().join(", ")) };
    let var = if k == 1 { sqrt_label(ds[0]) } else { "θ".to_string() };
    let sp = SqrtPresentation { ds: ds.to_vec(), theta_powers: p };
    let field = NumberField::assemble(min_poly.clone(), basis.clone(), BasisOrigin::Multiquadratic, label.clone(), var.clone(), Some(sp.clone()))?;
    // conductor-discriminant formula certifies maximality
    let expected: BigInt = kernels.iter().skip(1).map(|&(e, _)| BigInt::from(quadratic_disc(e)).abs()).product();
    if field.disc().abs() == expected {
        Ok(field)
    } else {
        NumberField::assemble(min_poly, basis, BasisOrigin::Order, label, var, Some(sp))
    }
}

/// `L(sqrt d)`. Multiquadratic `L` stays multiquadratic; otherwise the basis
/// is the tensor product with `Z[omega_d]`, maximal when the discriminants
/// are coprime.
pub fn adjoin_sqrt(l: &Arc<NumberField>, d: i64) -> Result<Arc<NumberField>> {
    if let Some(sp) = l.sqrt_presentation() {
        let mut ds = sp.ds.clone();
        ds.push(d);
        return compositum_multiquadratic(&ds);
    }
    if d == 0 || !is_squarefree(d) {
        return Err(Error::NotSquarefree(d.to_string()));
    }
    let m = l.degree();
    let n = 2 * m;
    // algebra basis theta^i s^j at index i + m j
    let mul = |a: &[BigRational], b: &[BigRational]| -> Vec<BigRational> {
        let split = |v: &[BigRational]| (v[..m].to_vec(), v[m..].to_vec());
        let (a0, a1) = split(a);
        let (b0, b1) = split(b);
        let dd = q(d);
        let p00 = l.mul_power(&a0, &b0);
        let p11 = l.mul_power(&a1, &b1);
        let p01 = l.mul_power(&a0, &b1);
        let p10 = l.mul_power(&a1, &b0);
        let mut out: Vec<BigRational> = p00.iter().zip(&p11).map(|(x, y)| x + y * &dd).collect();
        out.extend(p01.iter().zip(&p10).map(|(x, y)| x + y));
        out
    };
    let mut found = None;
    for c in 1..=20i64 {
        let mut theta = vec![BigRational::zero(); n];
        if m > 1 {
            theta[1] = BigRational::one();
        } else {
            theta[0] = -q(l.min_poly().coeffs()[0].clone());
        }
        theta[m] = q(c);
        if let Some(res) = primitive(&theta, &mul) {
            found = Some(res);
            break;
        }
    }
    let (min_poly, p) = found.ok_or(Error::DependentGenerators)?;
    let pinv = linalg::inverse(&p).expect("primitive element");
    let omega: Vec<BigRational> = if d.rem_euclid(4) == 1 {
        vec![BigRational::new(1.into(), 2.into()), BigRational::new(1.into(), 2.into())]
    } else {
        vec![q(0), q(1)]
    };
    let mut tensor = Vec::with_capacity(n);
    for b in l.integral_basis() {
        let mut v = b.clone();
        v.resize(n, BigRational::zero());
        tensor.push(v);
    }
    for b in l.integral_basis() {
        // b * (omega_0 + omega_1 s)
        let mut v: Vec<BigRational> = b.iter().map(|c| c * &omega[0]).collect();
        v.extend(b.iter().map(|c| c * &omega[1]));
        tensor.push(v);
    }
    let basis: QMatrix = tensor.iter().map(|v| linalg::vec_mat(v, &pinv)).collect();
    let coprime = num_integer::Integer::gcd(l.disc(), &BigInt::from(quadratic_disc(d))).is_one();
    let origin = if coprime && !l.index_conditional() { BasisOrigin::Tensor } else { BasisOrigin::Order };
    let label = format!("{}({})", l.label(), sqrt_label(d));
    NumberField::assemble(min_poly, basis, origin, label, "θ".into(), None)
}

/// `L(i)` for a totally real field `L`.
pub fn adjoin_i(l: &Arc<NumberField>) -> Result<Arc<NumberField>> {
    if !l.is_totally_real() {
        return Err(Error::AlreadyImaginary);
    }
    adjoin_sqrt(l, -1)
}

/// The rationals as a degree-1 field.
pub fn rationals() -> Arc<NumberField> {
    compositum_multiquadratic(&[]).expect("Q is constructible")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::cm::detect_cm;

    #[test]
    fn sqrt5_sqrt13() {
        let k = compositum_multiquadratic(&[5, 13]).unwrap();
        assert_eq!(k.min_poly(), &IntPoly::from_i64(&[64, 0, -36, 0, 1]));
        assert!(k.is_totally_real());
        assert_eq!(k.disc(), &BigInt::from(5 * 5 * 13 * 13));
        assert_eq!(k.basis_origin(), &BasisOrigin::Multiquadratic);
    }

    #[test]
    fn gaussian_sqrt5_is_cm() {
        let k = compositum_multiquadratic(&[-1, 5]).unwrap();
        assert_eq!(k.degree(), 4);
        assert_eq!(k.disc(), &BigInt::from(400));
        assert!(detect_cm(&k).is_some());
        assert_eq!(k.basis_origin(), &BasisOrigin::Multiquadratic);
    }

    #[test]
    fn dependent_generators() {
        assert!(matches!(compositum_multiquadratic(&[5, 13, 65]), Err(Error::DependentGenerators)));
        assert!(matches!(compositum_multiquadratic(&[12]), Err(Error::NotSquarefree(_))));
    }

    #[test]
    fn adjoin_i_chain() {
        let q = rationals();
        assert_eq!(q.degree(), 1);
        let qi = adjoin_i(&q).unwrap();
        assert_eq!(qi.min_poly(), &IntPoly::from_i64(&[1, 0, 1]));
        assert!(matches!(adjoin_i(&qi), Err(Error::AlreadyImaginary)));
        let l = compositum_multiquadratic(&[5]).unwrap();
        let k = adjoin_i(&l).unwrap();
        assert_eq!(k.degree(), 4);
        assert!(detect_cm(&k).is_some());
    }

    #[test]
    fn overlapping_conductors_are_still_maximal() {
        // Q(sqrt 21, sqrt 33) contains sqrt 77; disc = 21 * 33 * 77
        let k = compositum_multiquadratic(&[21, 33]).unwrap();
        assert_eq!(k.disc(), &BigInt::from(21 * 33 * 77));
        assert_eq!(k.basis_origin(), &BasisOrigin::Multiquadratic);
    }

    #[test]
    fn generic_adjoin_on_cubic() {
        // x^3 - 3x - 1 is totally real with disc 81 (power basis maximal)
        let l = NumberField::new(IntPoly::from_i64(&[-1, -3, 0, 1]), None).unwrap();
        assert!(l.is_totally_real());
        let k = adjoin_i(&l).unwrap();
        assert_eq!(k.degree(), 6);
        assert!(detect_cm(&k).is_some());
    }
}
