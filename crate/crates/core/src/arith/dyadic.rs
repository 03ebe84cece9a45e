use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact binary rational `mant * 2^exp`.
///
/// Kept normalized: the mantissa is odd, or zero with `exp == 0`, so
/// structural equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

/// Rounding direction for operations that leave the dyadic grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
    Nearest,
}

fn pow2(k: u64) -> BigInt {
    BigInt::one() << k
}

/// `floor(num / den)` or `ceil` for positive or negative operands.
fn div_round(num: &BigInt, den: &BigInt, round: Round) -> BigInt {
    let (num, den) = if den.is_negative() { (-num, -den) } else { (num.clone(), den.clone()) };
    match round {
        Round::Down => num.div_floor(&den),
        Round::Up => Integer::div_ceil(&num, &den),
        Round::Nearest => Integer::div_floor(&(&num * 2 + &den), &(&den * 2)),
    }
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { mant, exp };
        d.normalize();
        d
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz;
            self.exp += tz as i64;
        }
    }

    pub fn zero() -> Self {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { mant: BigInt::one(), exp: 0 }
    }

    pub fn from_int<T: Into<BigInt>>(v: T) -> Self {
        Self::new(v.into(), 0)
    }

    /// `2^e`
    pub fn pow2(e: i64) -> Self {
        Dyadic { mant: BigInt::one(), exp: e }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic { mant: self.mant.abs(), exp: self.exp }
    }

    /// Position of the leading bit: `2^(msb-1) <= |x| < 2^msb`.
    pub fn msb(&self) -> i64 {
        self.mant.bits() as i64 + self.exp
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic { mant: self.mant.clone(), exp: self.exp + k }
    }

    /// Round onto the grid `2^-prec * Z`.
    pub fn round_to(&self, prec: i64, round: Round) -> Self {
        if self.exp >= -prec {
            return self.clone();
        }
        let shift = (-prec - self.exp) as u64;
        let m = div_round(&self.mant, &pow2(shift), round);
        Dyadic::new(m, -prec)
    }

    /// Round to `bits` significant bits (relative precision).
    pub fn round_sig(&self, bits: u64, round: Round) -> Self {
        let len = self.mant.bits();
        if len <= bits {
            return self.clone();
        }
        let shift = len - bits;
        let m = div_round(&self.mant, &pow2(shift), round);
        Dyadic::new(m, self.exp + shift as i64)
    }

    pub fn from_rational(q: &BigRational, prec: i64, round: Round) -> Self {
        let (num, den) = (q.numer(), q.denom());
        let m = if prec >= 0 {
            div_round(&(num << prec as u64), den, round)
        } else {
            div_round(num, &(den << (-prec) as u64), round)
        };
        Dyadic::new(m, -prec)
    }

    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite());
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if raw_exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), raw_exp - 1075) };
        Dyadic::new(BigInt::from(m) * sign, e)
    }

    /// `floor(a / b)` (or other rounding) on the grid `2^-prec`.
    pub fn div(&self, other: &Dyadic, prec: i64, round: Round) -> Self {
        assert!(!other.is_zero(), "dyadic division by zero");
        let s = self.exp - other.exp + prec;
        let (num, den) = if s >= 0 {
            (&self.mant << s as u64, other.mant.clone())
        } else {
            (self.mant.clone(), &other.mant << (-s) as u64)
        };
        Dyadic::new(div_round(&num, &den, round), -prec)
    }

    /// Square root of a nonnegative value rounded onto the grid `2^-prec`.
    pub fn sqrt(&self, prec: i64, round: Round) -> Self {
        assert!(self.signum() >= 0, "sqrt of negative dyadic");
        if self.is_zero() {
            return Self::zero();
        }
        // sqrt(m 2^e) * 2^prec = sqrt(m 2^(e + 2 prec))
        let e = self.exp + 2 * prec;
        let (num, den_shift) = if e >= 0 { (&self.mant << e as u64, 0u64) } else { (self.mant.clone(), (-e) as u64) };
        // integer sqrt of num / 2^den_shift: make the shift even
        let (num, half) = if den_shift % 2 == 1 { (num << 1u32, (den_shift + 1) / 2) } else { (num, den_shift / 2) };
        // value = sqrt(num) / 2^half
        let pad = 2 * (half + 2);
        let r = (num.clone() << pad).sqrt(); // floor(sqrt(num) * 2^(half+2))
        let exact = &r * &r == (num << pad);
        let denom = pow2(2 * half + 2);
        let m = match round {
            Round::Down | Round::Nearest => r.div_floor(&denom),
            Round::Up => {
                if exact {
                    Integer::div_ceil(&r, &denom)
                } else {
                    Integer::div_ceil(&(r + 1), &denom)
                }
            }
        };
        Dyadic::new(m, -prec)
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            self.mant.div_floor(&pow2((-self.exp) as u64))
        }
    }

    pub fn ceil(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            self.mant.div_ceil(&pow2((-self.exp) as u64))
        }
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << self.exp as u64)
        } else {
            BigRational::new(self.mant.clone(), pow2((-self.exp) as u64))
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        let shift = (bits - 60).max(0);
        let m = (&self.mant >> shift as u64).to_f64().unwrap_or(0.0);
        let e = self.exp + shift;
        if e > 1023 + 64 {
            return if m > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
        }
        if e < -1074 - 64 {
            return 0.0;
        }
        m * 2f64.powi(e as i32)
    }

    /// Scientific decimal rendering with `digits` significant digits.
    pub fn to_sci(&self, digits: usize, round: Round) -> String {
        rational_to_sci(&self.to_rational(), digits, round)
    }
}

/// Decimal scientific rendering of an exact rational.
pub fn rational_to_sci(q: &BigRational, digits: usize, round: Round) -> String {
    assert!(digits >= 1);
    if q.is_zero() {
        return "0".to_string();
    }
    let neg = q.is_negative();
    let a = q.abs();
    // estimate decimal exponent, then correct
    let est = {
        let nb = a.numer().bits() as f64;
        let db = a.denom().bits() as f64;
        ((nb - db) * std::f64::consts::LOG10_2).floor() as i64
    };
    let ten = BigInt::from(10);
    let pow10 = |k: i64| -> BigRational {
        if k >= 0 {
            BigRational::from_integer(num_traits::pow(ten.clone(), k as usize))
        } else {
            BigRational::new(BigInt::one(), num_traits::pow(ten.clone(), (-k) as usize))
        }
    };
    let mut e = est;
    loop {
        let lo = pow10(e);
        if a < lo {
            e -= 1;
            continue;
        }
        if a >= pow10(e + 1) {
            e += 1;
            continue;
        }
        break;
    }
    // directed rounding refers to the signed value
    let mag_round = match (round, neg) {
        (Round::Down, true) => Round::Up,
        (Round::Up, true) => Round::Down,
        (r, _) => r,
    };
    let scaled = &a * pow10(digits as i64 - 1 - e);
    let mut m = div_round(scaled.numer(), scaled.denom(), mag_round);
    let limit = num_traits::pow(ten.clone(), digits);
    if m >= limit {
        m /= &ten;
        e += 1;
    }
    let s = m.to_string();
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(&s[..1]);
    if s.len() > 1 {
        out.push('.');
        out.push_str(&s[1..]);
    }
    out.push_str(&format!("e{}", e));
    out
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self - other).signum() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mant, self.exp)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci(20, Round::Nearest))
    }
}

impl<'a> Add<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn add(self, o: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(o.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &o.mant << (o.exp - e) as u64;
        Dyadic::new(a + b, e)
    }
}

impl<'a> Sub<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn sub(self, o: &Dyadic) -> Dyadic {
        self + &(-o)
    }
}

impl<'a> Mul<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn mul(self, o: &Dyadic) -> Dyadic {
        if self.is_zero() || o.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { mant: &self.mant * &o.mant, exp: self.exp + o.exp }
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { mant: -&self.mant, exp: self.exp }
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { mant: -self.mant, exp: self.exp }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $m(self, o: Dyadic) -> Dyadic {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
