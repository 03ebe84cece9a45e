//! Certified enclosures of pi and natural logarithms, and interval ceilings.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::dyadic::Dyadic;
use super::interval::Interval;
use crate::error::{Error, Result};

/// Default cap for precision escalation in certified ceilings.
pub const DEFAULT_CEIL_CAP_BITS: u32 = 4096;

const GUARD: i64 = 24;

/// `atan(1/k)` for an integer `k >= 2`, enclosed on the grid `2^-g`.
fn atan_inv(k: u64, g: i64) -> Interval {
    let k2 = BigInt::from(k) * BigInt::from(k);
    let mut kpow = BigInt::from(k);
    let mut sum = Interval::zero();
    let mut j: u64 = 0;
    loop {
        let term = BigRational::new(BigInt::one(), &kpow * BigInt::from(2 * j + 1));
        let t = Interval::from_rational(&term, g);
        if t.hi <= Dyadic::pow2(-g) {
            // alternating with decreasing terms: the tail is bounded by this term
            return sum.add(&Interval::symmetric(t.hi));
        }
        sum = if j % 2 == 0 { sum.add(&t) } else { sum.sub(&t) };
        kpow *= &k2;
        j += 1;
    }
}

/// Enclosure of pi with width at most `2^-precision_bits` (Machin's formula).
pub fn pi_interval(precision_bits: u32) -> Interval {
    let g = precision_bits as i64 + GUARD;
    let a = atan_inv(5, g).mul_int(&BigInt::from(16));
    let b = atan_inv(239, g).mul_int(&BigInt::from(4));
    a.sub(&b).round_out(precision_bits as i64 + 2)
}

/// `atanh(z)` for `0 <= z <= 1/3` given as an enclosure, on the grid `2^-g`.
fn atanh_small(z: &Interval, g: i64) -> Interval {
    let z2 = z.sqr().round_out(g);
    let mut power = z.round_out(g);
    let mut sum = Interval::zero();
    let mut j: i64 = 0;
    loop {
        let term = power.div_int(2 * j + 1, g);
        if power.hi <= Dyadic::pow2(-g) {
            // positive terms with ratio <= z^2 <= 1/9: tail <= 9/8 of this term
            let tail = term.hi.mul_pow2(1);
            return sum.add(&Interval::new(Dyadic::zero(), tail));
        }
        sum = sum.add(&term);
        power = power.mul(&z2).round_out(g);
        j += 1;
    }
}

fn ln2_grid(g: i64) -> Interval {
    let third = Interval::from_rational(&BigRational::new(1.into(), 3.into()), g);
    atanh_small(&third, g).mul_int(&BigInt::from(2))
}

/// `ln n` for a positive integer, on the grid `2^-g`.
fn ln_int_grid(n: &BigInt, g: i64) -> Interval {
    assert!(n.is_positive());
    let m = n.bits() as i64 - 1;
    let pm = BigInt::one() << m as u64;
    // n = 2^m * y with 1 <= y < 2; ln y = 2 atanh((n - 2^m) / (n + 2^m))
    let z = BigRational::new(n - &pm, n + &pm);
    let g2 = g + 8 + (64 - (m.max(1) as u64).leading_zeros() as i64);
    let zi = Interval::from_rational(&z, g2);
    let ly = atanh_small(&zi, g2).mul_int(&BigInt::from(2));
    ln2_grid(g2).mul_int(&BigInt::from(m)).add(&ly).round_out(g)
}

/// Enclosure of `ln q` for a positive rational, width at most `2^-precision_bits`.
pub fn ln_interval(q: &BigRational, precision_bits: u32) -> Result<Interval> {
    if !q.is_positive() {
        return Err(Error::InvalidArgument("logarithm of a nonpositive number".into()));
    }
    let g = precision_bits as i64 + GUARD;
    let a = ln_int_grid(q.numer(), g);
    let b = ln_int_grid(q.denom(), g);
    Ok(a.sub(&b).round_out(precision_bits as i64 + 2))
}

/// Enclosure of `ln 2` with width at most `2^-precision_bits`.
pub fn ln2_interval(precision_bits: u32) -> Interval {
    ln2_grid(precision_bits as i64 + GUARD).round_out(precision_bits as i64 + 2)
}

/// Exact ceiling of a rational.
pub fn ceil_rational(q: &BigRational) -> BigInt {
    q.numer().div_ceil(q.denom())
}

/// Ceiling of a real number known through enclosures `f(bits)` that tighten
/// as `bits` grows. Precision doubles from 64 until both endpoints share a
/// ceiling, or fails past `cap_bits`.
pub fn certified_ceil(mut f: impl FnMut(u32) -> Interval, cap_bits: u32) -> Result<BigInt> {
    let mut bits = 64u32;
    loop {
        let iv = f(bits);
        let (a, b) = (iv.lo.ceil(), iv.hi.ceil());
        if a == b {
            return Ok(a);
        }
        if bits >= cap_bits {
            return Err(Error::PrecisionExhausted(cap_bits));
        }
        bits = (bits * 2).min(cap_bits);
    }
}

/// Enclosure of `a / pi` for a positive rational `a`, absolute width at most
/// `2^-precision_bits`.
pub fn rational_over_pi(a: &BigRational, precision_bits: u32) -> Interval {
    // relative error of pi is amplified by a/pi
    let mag = a.numer().bits() as i64 - a.denom().bits() as i64 + 2;
    let pb = (precision_bits as i64 + mag.max(0) + 8) as u32;
    let pi = pi_interval(pb);
    let num = Interval::from_rational(a, pb as i64 + 4);
    num.div(&pi, precision_bits as i64 + 4).expect("pi is positive")
}

/// Certified `ceil(a / pi)`.
pub fn ceil_over_pi(a: &BigRational, cap_bits: u32) -> Result<BigInt> {
    if a.is_zero() {
        return Ok(BigInt::zero());
    }
    certified_ceil(|bits| rational_over_pi(a, bits), cap_bits)
}
