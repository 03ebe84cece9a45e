//! Detection of CM structure: complex conjugation as a field automorphism.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::linalg::{self, QMatrix, ZMatrix};
use crate::arith::{Dyadic, QPoly, Round};

use super::field::NumberField;

/// Complex conjugation on a CM field, as an exact linear map.
#[derive(Clone, Debug)]
pub struct CmStructure {
    /// `c(theta) = g(theta)`
    pub conj_poly: QPoly,
    /// Row `j`: basis coordinates of `c(b_j)`. Acts on row vectors.
    pub conjugation: QMatrix,
    /// Z-basis of the fixed ring `O_F`, rows in basis coordinates of `K`.
    pub totally_real_basis: ZMatrix,
    /// `[F : Q]`
    pub f: usize,
}

impl CmStructure {
    /// Coordinates of `c(z)`.
    pub fn apply(&self, coords: &[BigRational]) -> Vec<BigRational> {
        linalg::vec_mat(coords, &self.conjugation)
    }

    /// True if the coordinates describe an element of `F`.
    pub fn is_real(&self, coords: &[BigRational]) -> bool {
        self.apply(coords) == coords
    }
}

#[derive(Clone)]
struct C(Dyadic, Dyadic);

impl C {
    fn add(&self, o: &C) -> C {
        C(&self.0 + &o.0, &self.1 + &o.1)
    }
    fn mul(&self, o: &C, w: i64) -> C {
        C(
            (&(&self.0 * &o.0) - &(&self.1 * &o.1)).round_to(w, Round::Nearest),
            (&(&self.0 * &o.1) + &(&self.1 * &o.0)).round_to(w, Round::Nearest),
        )
    }
    fn div(&self, o: &C, w: i64) -> C {
        let d = &(&o.0 * &o.0) + &(&o.1 * &o.1);
        let t = C(&(&self.0 * &o.0) + &(&self.1 * &o.1), &(&self.1 * &o.0) - &(&self.0 * &o.1));
        C(t.0.div(&d, w, Round::Nearest), t.1.div(&d, w, Round::Nearest))
    }
}

/// Numerical interpolation of `g` with `g(theta_k) = conj(theta_k)`.
fn interpolate_conjugation(field: &NumberField, bits: u32) -> Option<Vec<Dyadic>> {
    let n = field.degree();
    let roots = field.roots_at(bits).ok()?;
    let w = bits as i64;
    let z: Vec<C> = roots.disks.iter().map(|d| C(d.re.clone(), d.im.clone())).collect();
    let a: Vec<Dyadic> = field.min_poly().coeffs().iter().map(|c| Dyadic::from_int(c.clone())).collect();
    let mut g = vec![C(Dyadic::zero(), Dyadic::zero()); n];
    for (k, t) in z.iter().enumerate() {
        // f(x) = (x - t) q(x) by synthetic division
        let mut q = vec![C(Dyadic::zero(), Dyadic::zero()); n];
        q[n - 1] = C(a[n].clone(), Dyadic::zero());
        for i in (1..n).rev() {
            q[i - 1] = C(a[i].clone(), Dyadic::zero()).add(&t.mul(&q[i], w));
        }
        // f'(t) = q(t)
        let mut fp = C(Dyadic::zero(), Dyadic::zero());
        for c in q.iter().rev() {
            fp = fp.mul(t, w).add(c);
        }
        if fp.0.is_zero() && fp.1.is_zero() {
            return None;
        }
        let target = &z[roots.conj[k]];
        let coef = target.div(&fp, w);
        for i in 0..n {
            g[i] = g[i].add(&coef.mul(&q[i], w));
        }
    }
    Some(g.into_iter().map(|c| c.0).collect())
}

/// Round `g` to rationals with denominator dividing `den`.
fn rationalize(g: &[Dyadic], den: &BigInt) -> Option<QPoly> {
    let dd = Dyadic::from_int(den.clone());
    let quarter = Dyadic::pow2(-2);
    let mut out = Vec::with_capacity(g.len());
    for c in g {
        let scaled = &dd * c;
        let r = scaled.round_to(0, Round::Nearest);
        if (&scaled - &r).abs() > quarter {
            return None;
        }
        out.push(BigRational::new(r.floor(), den.clone()));
    }
    Some(QPoly::new(out))
}

/// Exact check that `g` induces complex conjugation in every embedding.
fn verify(field: &NumberField, g: &QPoly) -> bool {
    let f = field.min_poly().to_qpoly();
    let x = QPoly::new(vec![BigRational::zero(), BigRational::one()]);
    if g.rem(&f) == x || !f.compose_mod(g, &f).is_zero() || g.compose_mod(g, &f) != x {
        return false;
    }
    // g permutes the roots; the permutation must be complex conjugation
    let mut bits = 64u32;
    while bits <= 2048 {
        let Ok(roots) = field.roots_at(bits) else { return false };
        let boxes = roots.boxes();
        let mut decided = true;
        for (k, b) in boxes.iter().enumerate() {
            let v = g.eval_complex_interval(b, bits as i64 + 16);
            let hits: Vec<usize> = (0..boxes.len()).filter(|&j| boxes[j].intersects(&v)).collect();
            if !hits.contains(&roots.conj[k]) {
                return false;
            }
            if hits.len() > 1 {
                decided = false;
            }
        }
        if decided {
            return true;
        }
        bits *= 2;
    }
    false
}

/// CM structure of `field`, if it is a CM field. Cached on the field.
pub fn detect_cm(field: &NumberField) -> Option<Arc<CmStructure>> {
    field.cm_cell().get_or_init(|| compute_cm(field).map(Arc::new)).clone()
}

fn compute_cm(field: &NumberField) -> Option<CmStructure> {
    let n = field.degree();
    if n % 2 != 0 || !field.is_totally_imaginary() {
        return None;
    }
    let disc = field.min_poly().discriminant().abs();
    let need = disc.bits() as u32 + 64;
    let mut bits = need.max(128);
    let g = loop {
        if bits > 4096 {
            return None;
        }
        if let Some(g) = interpolate_conjugation(field, bits).and_then(|g| rationalize(&g, &disc)) {
            if verify(field, &g) {
                break g;
            }
        }
        bits *= 2;
    };
    let fq = field.min_poly().to_qpoly();
    // powers of g mod f give c(theta^i)
    let mut gpow = vec![QPoly::constant(BigRational::one())];
    for i in 1..n {
        gpow.push(gpow[i - 1].mul(&g).rem(&fq));
    }
    let conjugation: QMatrix = field
        .integral_basis()
        .iter()
        .map(|b| {
            let mut acc = QPoly::zero();
            for (c, p) in b.iter().zip(&gpow) {
                if !c.is_zero() {
                    acc = acc.add(&p.scale(c));
                }
            }
            let pc: Vec<BigRational> = (0..n).map(|i| acc.coeff(i)).collect();
            field.from_power(&pc)
        })
        .collect();
    // fixed lattice: integer v with v (C - I) = 0
    let den = linalg::common_denominator(conjugation.iter().flatten());
    let a: ZMatrix = conjugation
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, c)| {
                    let v = if i == j { c - BigRational::one() } else { c.clone() };
                    (v * BigRational::from_integer(den.clone())).to_integer()
                })
                .collect()
        })
        .collect();
    let fixed = linalg::integer_left_kernel(&a);
    if fixed.len() * 2 != n {
        return None;
    }
    Some(CmStructure { conj_poly: g, conjugation, totally_real_basis: fixed, f: n / 2 })
}
