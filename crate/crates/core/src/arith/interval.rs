use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::dyadic::{Dyadic, Round};

/// Closed real interval with dyadic endpoints.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Dyadic,
    pub hi: Dyadic,
}

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        debug_assert!(lo <= hi, "inverted interval {lo:?} > {hi:?}");
        Interval { lo, hi }
    }

    pub fn point(x: Dyadic) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Self::point(Dyadic::zero())
    }

    pub fn one() -> Self {
        Self::point(Dyadic::one())
    }

    pub fn from_int<T: Into<BigInt>>(v: T) -> Self {
        Self::point(Dyadic::from_int(v))
    }

    /// Tightest enclosure of `q` on the grid `2^-prec` (a point when exact).
    pub fn from_rational(q: &BigRational, prec: i64) -> Self {
        Interval {
            lo: Dyadic::from_rational(q, prec, Round::Down),
            hi: Dyadic::from_rational(q, prec, Round::Up),
        }
    }

    /// Symmetric interval `[-r, r]`.
    pub fn symmetric(r: Dyadic) -> Self {
        let r = r.abs();
        Interval { lo: -&r, hi: r }
    }

    pub fn width(&self) -> Dyadic {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Dyadic {
        (&self.lo + &self.hi).mul_pow2(-1)
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid().to_f64()
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_rational(&self, q: &BigRational) -> bool {
        &self.lo.to_rational() <= q && q <= &self.hi.to_rational()
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.signum() <= 0 && self.hi.signum() >= 0
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn is_positive(&self) -> bool {
        self.lo.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.hi.signum() < 0
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    /// Largest absolute value of any member.
    pub fn mag(&self) -> Dyadic {
        self.lo.abs().max(self.hi.abs())
    }

    /// Outward rounding onto the grid `2^-prec`; bounds bit growth.
    pub fn round_out(&self, prec: i64) -> Interval {
        Interval { lo: self.lo.round_to(prec, Round::Down), hi: self.hi.round_to(prec, Round::Up) }
    }

    /// Outward rounding to `bits` significant bits.
    pub fn round_sig(&self, bits: u64) -> Interval {
        Interval { lo: self.lo.round_sig(bits, Round::Down), hi: self.hi.round_sig(bits, Round::Up) }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval { lo, hi }
    }

    pub fn mul_dyadic(&self, d: &Dyadic) -> Interval {
        let a = &self.lo * d;
        let b = &self.hi * d;
        if d.signum() >= 0 {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    pub fn mul_int(&self, k: &BigInt) -> Interval {
        self.mul_dyadic(&Dyadic::from_int(k.clone()))
    }

    /// Square; tighter than `self.mul(self)` when the interval straddles zero.
    pub fn sqr(&self) -> Interval {
        if self.contains_zero() {
            let m = self.mag();
            Interval { lo: Dyadic::zero(), hi: &m * &m }
        } else {
            let a = &self.lo * &self.lo;
            let b = &self.hi * &self.hi;
            if a <= b {
                Interval { lo: a, hi: b }
            } else {
                Interval { lo: b, hi: a }
            }
        }
    }

    /// `1/self` enclosed on the grid `2^-prec`; `None` if zero is a member.
    pub fn recip(&self, prec: i64) -> Option<Interval> {
        if self.contains_zero() {
            return None;
        }
        let one = Dyadic::one();
        Some(Interval { lo: one.div(&self.hi, prec, Round::Down), hi: one.div(&self.lo, prec, Round::Up) })
    }

    /// `self / o` enclosed on the grid `2^-prec`; `None` if `o` contains zero.
    pub fn div(&self, o: &Interval, prec: i64) -> Option<Interval> {
        if o.contains_zero() {
            return None;
        }
        let cands_lo = [
            self.lo.div(&o.lo, prec, Round::Down),
            self.lo.div(&o.hi, prec, Round::Down),
            self.hi.div(&o.lo, prec, Round::Down),
            self.hi.div(&o.hi, prec, Round::Down),
        ];
        let cands_hi = [
            self.lo.div(&o.lo, prec, Round::Up),
            self.lo.div(&o.hi, prec, Round::Up),
            self.hi.div(&o.lo, prec, Round::Up),
            self.hi.div(&o.hi, prec, Round::Up),
        ];
        Some(Interval {
            lo: cands_lo.iter().min().unwrap().clone(),
            hi: cands_hi.iter().max().unwrap().clone(),
        })
    }

    pub fn div_int(&self, k: i64, prec: i64) -> Interval {
        self.div(&Interval::from_int(k), prec).expect("nonzero integer divisor")
    }

    /// Square root of a nonnegative interval (negative parts clamp to 0).
    pub fn sqrt(&self, prec: i64) -> Interval {
        let lo = if self.lo.signum() <= 0 { Dyadic::zero() } else { self.lo.sqrt(prec, Round::Down) };
        let hi = if self.hi.signum() <= 0 { Dyadic::zero() } else { self.hi.sqrt(prec, Round::Up) };
        Interval { lo, hi }
    }

    pub fn pow(&self, mut e: u32) -> Interval {
        let mut base = self.clone();
        let mut acc = Interval::one();
        if e % 2 == 0 {
            // even powers are nonnegative: square first
            if e == 0 {
                return acc;
            }
            base = base.sqr();
            e /= 2;
        }
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.lo.to_f64(), self.hi.to_f64())
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo.to_sci(12, Round::Down), self.hi.to_sci(12, Round::Up))
    }
}

/// Axis-aligned complex box `re x im`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ComplexInterval {
    pub re: Interval,
    pub im: Interval,
}

impl ComplexInterval {
    pub fn new(re: Interval, im: Interval) -> Self {
        ComplexInterval { re, im }
    }

    pub fn real(re: Interval) -> Self {
        ComplexInterval { re, im: Interval::zero() }
    }

    pub fn zero() -> Self {
        Self::real(Interval::zero())
    }

    pub fn one() -> Self {
        Self::real(Interval::one())
    }

    pub fn from_rational(q: &BigRational, prec: i64) -> Self {
        Self::real(Interval::from_rational(q, prec))
    }

    pub fn point(re: Dyadic, im: Dyadic) -> Self {
        ComplexInterval { re: Interval::point(re), im: Interval::point(im) }
    }

    pub fn re_lo(&self) -> &Dyadic {
        &self.re.lo
    }
    pub fn re_hi(&self) -> &Dyadic {
        &self.re.hi
    }
    pub fn im_lo(&self) -> &Dyadic {
        &self.im.lo
    }
    pub fn im_hi(&self) -> &Dyadic {
        &self.im.hi
    }

    /// Larger of the two side lengths.
    pub fn width(&self) -> Dyadic {
        self.re.width().max(self.im.width())
    }

    pub fn mid_f64(&self) -> (f64, f64) {
        (self.re.mid_f64(), self.im.mid_f64())
    }

    pub fn add(&self, o: &ComplexInterval) -> ComplexInterval {
        ComplexInterval { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &ComplexInterval) -> ComplexInterval {
        ComplexInterval { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn neg(&self) -> ComplexInterval {
        ComplexInterval { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn conj(&self) -> ComplexInterval {
        ComplexInterval { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn mul(&self, o: &ComplexInterval) -> ComplexInterval {
        let re = self.re.mul(&o.re).sub(&self.im.mul(&o.im));
        let im = self.re.mul(&o.im).add(&self.im.mul(&o.re));
        ComplexInterval { re, im }
    }

    pub fn scale(&self, k: &Interval) -> ComplexInterval {
        ComplexInterval { re: self.re.mul(k), im: self.im.mul(k) }
    }

    /// Enclosure of `|z|^2`.
    pub fn abs_sq(&self) -> Interval {
        self.re.sqr().add(&self.im.sqr())
    }

    pub fn div(&self, o: &ComplexInterval, prec: i64) -> Option<ComplexInterval> {
        let d = o.abs_sq();
        let num = self.mul(&o.conj());
        Some(ComplexInterval { re: num.re.div(&d, prec)?, im: num.im.div(&d, prec)? })
    }

    pub fn round_out(&self, prec: i64) -> ComplexInterval {
        ComplexInterval { re: self.re.round_out(prec), im: self.im.round_out(prec) }
    }

    pub fn contains(&self, re: &Dyadic, im: &Dyadic) -> bool {
        self.re.contains(re) && self.im.contains(im)
    }

    pub fn contains_box(&self, o: &ComplexInterval) -> bool {
        self.re.contains_interval(&o.re) && self.im.contains_interval(&o.im)
    }

    pub fn intersects(&self, o: &ComplexInterval) -> bool {
        self.re.intersects(&o.re) && self.im.intersects(&o.im)
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }
}

impl fmt::Debug for ComplexInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} + {:?}i", self.re, self.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(Dyadic::from_f64(a), Dyadic::from_f64(b))
    }

    #[test]
    fn multiplication_covers_sign_mixes() {
        let p = iv(-2.0, 3.0).mul(&iv(-1.0, 4.0));
        assert_eq!(p, iv(-8.0, 12.0));
    }

    #[test]
    fn sqr_is_nonnegative() {
        assert_eq!(iv(-2.0, 1.0).sqr(), iv(0.0, 4.0));
        assert_eq!(iv(-3.0, -2.0).pow(2), iv(4.0, 9.0));
        assert_eq!(iv(-3.0, -2.0).pow(3), iv(-27.0, -8.0));
    }

    #[test]
    fn division_excludes_zero_divisor() {
        assert!(iv(1.0, 2.0).div(&iv(-1.0, 1.0), 10).is_none());
        let q = iv(1.0, 2.0).div(&iv(4.0, 8.0), 10).unwrap();
        assert!(q.contains(&Dyadic::from_f64(0.125)) && q.contains(&Dyadic::from_f64(0.5)));
    }

    #[test]
    fn complex_product_of_conjugates_is_real_positive() {
        let z = ComplexInterval::point(Dyadic::from_f64(2.0), Dyadic::from_f64(1.0));
        let w = z.mul(&z.conj());
        assert_eq!(w.re, Interval::from_int(5));
        assert_eq!(w.im, Interval::zero());
    }
}
