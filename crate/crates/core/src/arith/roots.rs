//! Certified isolation of all complex roots of a squarefree integer polynomial.
//!
//! Approximations come from Aberth iteration in `f64` followed by
//! Weierstrass (Durand-Kerner) refinement in dyadic arithmetic. They are then
//! certified with Weierstrass inclusion disks: for approximations `z_i` with
//! corrections `W_i = p(z_i) / (lc * prod_{j != i} (z_i - z_j))`, every
//! connected component of the union of the disks `D(z_i, n |W_i|)` holds as
//! many roots as disks. Pairwise disjoint disks therefore isolate one root
//! each. Centers are made exactly conjugation-symmetric first, so a disk with
//! a real center holds a real root and mirrored disks hold conjugate roots.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_complex::Complex64;

use super::dyadic::{Dyadic, Round};
use super::interval::{ComplexInterval, Interval};
use super::poly::{bigint_to_f64, IntPoly};
use crate::error::{Error, Result};

/// Working-precision ceiling for root refinement.
pub const MAX_ROOT_BITS: u32 = 8192;

/// Closed disk containing exactly one root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDisk {
    pub re: Dyadic,
    pub im: Dyadic,
    pub radius: Dyadic,
}

impl RootDisk {
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Bounding box. Real roots get an exact zero imaginary part.
    pub fn to_box(&self) -> ComplexInterval {
        let re = Interval::new(&self.re - &self.radius, &self.re + &self.radius);
        let im = if self.is_real() {
            Interval::zero()
        } else {
            Interval::new(&self.im - &self.radius, &self.im + &self.radius)
        };
        ComplexInterval::new(re, im)
    }

    fn contains_disk(&self, inner: &RootDisk) -> bool {
        // |c_in - c_out| + r_in <= r_out
        let slack = &self.radius - &inner.radius;
        if slack.signum() < 0 {
            return false;
        }
        let dr = &self.re - &inner.re;
        let di = &self.im - &inner.im;
        &(&dr * &dr) + &(&di * &di) <= &slack * &slack
    }
}

/// All roots of a polynomial, in canonical order: real roots ascending, then
/// conjugate pairs with the upper-half-plane member first, pairs sorted by
/// the real then imaginary part of that member.
#[derive(Clone, Debug)]
pub struct RootIsolation {
    pub disks: Vec<RootDisk>,
    /// `conj[i]` is the index of the conjugate root (`i` itself when real).
    pub conj: Vec<usize>,
}

impl RootIsolation {
    pub fn boxes(&self) -> Vec<ComplexInterval> {
        self.disks.iter().map(RootDisk::to_box).collect()
    }

    pub fn real_count(&self) -> usize {
        self.disks.iter().filter(|d| d.is_real()).count()
    }

    /// Largest disk radius.
    pub fn max_radius(&self) -> Dyadic {
        self.disks.iter().map(|d| d.radius.clone()).max().unwrap_or_else(Dyadic::zero)
    }
}

/// Boxes around every root, each of width at most `2^-precision_bits`.
pub fn isolate_complex_roots(p: &IntPoly, precision_bits: u32) -> Result<Vec<ComplexInterval>> {
    Ok(isolate_roots(p, precision_bits)?.boxes())
}

/// Certified isolation with disk radii at most `2^-(precision_bits + 1)`.
pub fn isolate_roots(p: &IntPoly, precision_bits: u32) -> Result<RootIsolation> {
    if p.degree() == 0 {
        return Ok(RootIsolation { disks: vec![], conj: vec![] });
    }
    if !p.is_squarefree() {
        return Err(Error::NonSquarefree);
    }
    let start = aberth_f64(p);
    let approx: Vec<(Dyadic, Dyadic)> = start.iter().map(|z| (Dyadic::from_f64(z.re), Dyadic::from_f64(z.im))).collect();
    let disks = refine_to(p, approx, precision_bits, None)?;
    Ok(canonicalize(disks))
}

/// Shrink an existing isolation to `precision_bits`, keeping root order.
/// Every new disk is certified to lie inside the old one with the same index.
pub fn refine_roots(p: &IntPoly, iso: &RootIsolation, precision_bits: u32) -> Result<RootIsolation> {
    let approx = iso.disks.iter().map(|d| (d.re.clone(), d.im.clone())).collect();
    let disks = refine_to(p, approx, precision_bits, Some(&iso.disks))?;
    Ok(RootIsolation { disks, conj: iso.conj.clone() })
}

fn aberth_f64(p: &IntPoly) -> Vec<Complex64> {
    let n = p.degree();
    let c: Vec<f64> = p.coeffs().iter().map(bigint_to_f64).collect();
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for a in c.iter().rev() {
            d = d * z + v;
            v = v * z + a;
        }
        (v, d)
    };
    let r = p.root_bound().min(1e150);
    let mut z: Vec<Complex64> =
        (0..n).map(|k| Complex64::from_polar(r * 0.7, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4)).collect();
    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (v, d) = eval(z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j])).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z
}

type Approx = (Dyadic, Dyadic);

fn cmul(a: &Approx, b: &Approx) -> Approx {
    (&(&a.0 * &b.0) - &(&a.1 * &b.1), &(&a.0 * &b.1) + &(&a.1 * &b.0))
}

fn csub(a: &Approx, b: &Approx) -> Approx {
    (&a.0 - &b.0, &a.1 - &b.1)
}

fn abs_sq(a: &Approx) -> Dyadic {
    &(&a.0 * &a.0) + &(&a.1 * &a.1)
}

/// `p(z_i)` and `lc * prod_{j != i} (z_i - z_j)`, both exact.
fn weierstrass_parts(p: &IntPoly, z: &[Approx], i: usize) -> (Approx, Approx) {
    let num = p.eval_dyadic_complex(&z[i].0, &z[i].1);
    let mut den: Approx = (Dyadic::from_int(p.lead().clone()), Dyadic::zero());
    for (j, zj) in z.iter().enumerate() {
        if j != i {
            den = cmul(&den, &csub(&z[i], zj));
        }
    }
    (num, den)
}

fn round_approx(a: &Approx, bits: i64) -> Approx {
    let scale = a.0.msb().max(a.1.msb()).max(0);
    let prec = bits - scale;
    (a.0.round_to(prec, Round::Nearest), a.1.round_to(prec, Round::Nearest))
}

/// One Jacobi sweep of Durand-Kerner; returns the largest correction's msb.
fn dk_sweep(p: &IntPoly, z: &mut [Approx], bits: i64) -> i64 {
    let n = z.len();
    let mut next = Vec::with_capacity(n);
    let mut worst = i64::MIN;
    for i in 0..n {
        let (num, den) = weierstrass_parts(p, z, i);
        let d2 = abs_sq(&den);
        if d2.is_zero() {
            // coincident approximations: nudge apart
            let bump = Dyadic::pow2(-(bits / 2));
            next.push((&z[i].0 + &bump, &z[i].1 + &bump));
            worst = worst.max(0);
            continue;
        }
        let t = cmul(&num, &(den.0.clone(), -&den.1));
        let w = (t.0.div(&d2, bits + 8, Round::Nearest), t.1.div(&d2, bits + 8, Round::Nearest));
        if !(w.0.is_zero() && w.1.is_zero()) {
            worst = worst.max(w.0.msb().max(w.1.msb()));
        }
        next.push(round_approx(&csub(&z[i], &w), bits));
    }
    z.clone_from_slice(&next);
    worst
}

/// Snap near-real approximations to the real axis and mirror conjugate pairs.
fn symmetrize(z: &[Approx], bits: i64) -> Option<Vec<Approx>> {
    let tol = Dyadic::pow2(-(bits * 3 / 4));
    let mut out: Vec<Approx> = z.to_vec();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for (i, a) in z.iter().enumerate() {
        let scale = Dyadic::one().max(a.0.abs());
        if a.1.abs() <= &tol * &scale {
            out[i].1 = Dyadic::zero();
        } else if a.1.signum() > 0 {
            upper.push(i);
        } else {
            lower.push(i);
        }
    }
    if upper.len() != lower.len() {
        return None;
    }
    let mut used = vec![false; lower.len()];
    for &u in &upper {
        let target = (z[u].0.clone(), -&z[u].1);
        let best = lower
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .min_by(|(_, &a), (_, &b)| abs_sq(&csub(&z[a], &target)).cmp(&abs_sq(&csub(&z[b], &target))))
            .map(|(k, _)| k)?;
        used[best] = true;
        out[lower[best]] = target;
    }
    Some(out)
}

/// Certified inclusion disks for symmetric approximations, or `None`.
fn certify(p: &IntPoly, z: &[Approx], radius_bits: i64) -> Option<Vec<RootDisk>> {
    let n = z.len();
    let nn = Dyadic::from_int(BigInt::from((n * n) as u64));
    let mut disks = Vec::with_capacity(n);
    for i in 0..n {
        let (num, den) = weierstrass_parts(p, z, i);
        let d2 = abs_sq(&den);
        if d2.is_zero() {
            return None;
        }
        let n2 = &nn * &abs_sq(&num);
        let radius = if n2.is_zero() {
            Dyadic::zero()
        } else {
            let q = n2.div(&d2, 2 * radius_bits + 8, Round::Up);
            q.sqrt(radius_bits + 4, Round::Up)
        };
        disks.push(RootDisk { re: z[i].0.clone(), im: z[i].1.clone(), radius });
    }
    for i in 0..n {
        for j in i + 1..n {
            let s = &disks[i].radius + &disks[j].radius;
            let d = abs_sq(&csub(&z[i], &z[j]));
            if d <= &s * &s {
                return None;
            }
        }
    }
    Some(disks)
}

fn refine_to(p: &IntPoly, mut z: Vec<Approx>, precision_bits: u32, within: Option<&[RootDisk]>) -> Result<Vec<RootDisk>> {
    let target = Dyadic::pow2(-(precision_bits as i64 + 1));
    let mut bits: i64 = (precision_bits as i64 + 32).max(64);
    loop {
        for _ in 0..200 {
            let worst = dk_sweep(p, &mut z, bits);
            if worst < -(bits - 6) {
                break;
            }
        }
        if let Some(sym) = symmetrize(&z, bits) {
            if let Some(disks) = certify(p, &sym, precision_bits as i64 + 2) {
                let small = disks.iter().all(|d| d.radius <= target);
                let nested = within.is_none_or(|old| old.iter().zip(&disks).all(|(o, d)| o.contains_disk(d)));
                if small && nested {
                    return Ok(disks);
                }
            }
        }
        bits *= 2;
        if bits > MAX_ROOT_BITS as i64 {
            return Err(Error::PrecisionExhausted(MAX_ROOT_BITS));
        }
    }
}

fn canonicalize(disks: Vec<RootDisk>) -> RootIsolation {
    let mut reals: Vec<RootDisk> = disks.iter().filter(|d| d.is_real()).cloned().collect();
    reals.sort_by(|a, b| a.re.cmp(&b.re));
    let mut uppers: Vec<RootDisk> = disks.iter().filter(|d| d.im.signum() > 0).cloned().collect();
    uppers.sort_by(|a, b| match a.re.cmp(&b.re) {
        Ordering::Equal => a.im.cmp(&b.im),
        o => o,
    });
    let mut out = Vec::with_capacity(disks.len());
    let mut conj = Vec::with_capacity(disks.len());
    for r in reals {
        conj.push(out.len());
        out.push(r);
    }
    for u in uppers {
        let lower = disks
            .iter()
            .find(|d| d.re == u.re && d.im == -&u.im)
            .cloned()
            .expect("symmetrized isolation has mirrored disks");
        let k = out.len();
        conj.push(k + 1);
        conj.push(k);
        out.push(u);
        out.push(lower);
    }
    RootIsolation { disks: out, conj }
}

/// Enclosure of a polynomial's value at every isolated root, for checks.
pub fn eval_at_roots(p: &IntPoly, iso: &RootIsolation) -> Vec<ComplexInterval> {
    iso.boxes().iter().map(|b| p.eval_complex_interval(b)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn width_ok(iso: &RootIsolation, bits: u32) -> bool {
        iso.boxes().iter().all(|b| b.width() <= Dyadic::pow2(-(bits as i64)))
    }

    #[test]
    fn gaussian_roots_pair_up() {
        let p = IntPoly::from_i64(&[1, 0, 1]);
        let iso = isolate_roots(&p, 30).unwrap();
        assert_eq!(iso.disks.len(), 2);
        assert_eq!(iso.conj, vec![1, 0]);
        let b = iso.boxes();
        assert!(b[0].contains(&Dyadic::zero(), &Dyadic::one()));
        assert!(b[1].contains(&Dyadic::zero(), &-Dyadic::one()));
        assert!(width_ok(&iso, 30));
    }

    #[test]
    fn sqrt5_against_bisection() {
        // bisection oracle on x^2 - 5 over the rationals
        let (mut lo, mut hi) = (BigRational::from_integer(2.into()), BigRational::from_integer(3.into()));
        let five = BigRational::from_integer(5.into());
        for _ in 0..40 {
            let mid = (&lo + &hi) / BigRational::from_integer(2.into());
            if &mid * &mid < five {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let iso = isolate_roots(&IntPoly::from_i64(&[-5, 0, 1]), 30).unwrap();
        assert_eq!(iso.real_count(), 2);
        let b = iso.boxes();
        assert!(b[1].re.contains_rational(&lo) || b[1].re.contains_rational(&hi));
        assert!(b[0].re.contains_rational(&-lo.clone()) || b[0].re.contains_rational(&-hi.clone()));
    }

    #[test]
    fn rejects_repeated_roots() {
        let p = IntPoly::from_i64(&[1, 2, 1]);
        assert_eq!(isolate_roots(&p, 20).unwrap_err(), Error::NonSquarefree);
    }

    #[test]
    fn refinement_keeps_order_and_nests() {
        let p = IntPoly::from_i64(&[9, 0, -2, 0, 1]);
        let iso = isolate_roots(&p, 20).unwrap();
        let fine = refine_roots(&p, &iso, 120).unwrap();
        assert!(width_ok(&fine, 120));
        for (a, b) in iso.boxes().iter().zip(fine.boxes()) {
            assert!(a.intersects(&b));
        }
    }

    #[test]
    fn close_real_roots_are_separated() {
        // (x - 1000)(x - 1000.001) scaled: 10^6 x^2 - 2000001000 x + 1000001000000
        let p = IntPoly::new(vec![BigInt::from(1_000_001_000_000i64), BigInt::from(-2_000_001_000i64), BigInt::from(1_000_000)]);
        let iso = isolate_roots(&p, 40).unwrap();
        assert_eq!(iso.real_count(), 2);
        assert!(!iso.boxes()[0].intersects(&iso.boxes()[1]));
    }
}
