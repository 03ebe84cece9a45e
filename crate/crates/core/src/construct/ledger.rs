//! The exponent `1 + ln(u pi / 36 v) / ln(36 / delta^2)` and the parameter
//! ledger for a prime set `T` and split prime `p`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::arith::consts::{ceil_over_pi, ln_interval, pi_interval, DEFAULT_CEIL_CAP_BITS};
use crate::arith::{format_rational, is_prime, Interval, Round};
use crate::error::{Error, Result};

/// `delta`, either an exact rational or `base^-exp` kept symbolic.
#[derive(Clone, Debug, PartialEq)]
pub enum Delta {
    Rational(BigRational),
    Power { base: u64, exp: BigInt },
}

impl Delta {
    /// Enclosure of `ln(36 / delta^2)`.
    fn log_term(&self, bits: u32) -> Result<Interval> {
        let ln36 = ln_interval(&BigRational::from_integer(36.into()), bits)?;
        match self {
            Delta::Rational(d) => {
                if !d.is_positive() || d > &BigRational::one() {
                    return Err(Error::InvalidArgument("delta must lie in (0, 1]".into()));
                }
                Ok(ln36.sub(&ln_interval(d, bits)?.mul_int(&BigInt::from(2))))
            }
            Delta::Power { base, exp } => {
                if *base < 1 || exp.is_negative() {
                    return Err(Error::InvalidArgument("delta must lie in (0, 1]".into()));
                }
                // the multiplier 2 exp may be huge; widen the precision accordingly
                let extra = exp.bits() as u32 + 2;
                let lp = ln_interval(&BigRational::from_integer((*base).into()), bits + extra)?;
                Ok(ln36.add(&lp.mul_int(&(exp * 2))))
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Delta::Rational(q) => serde_json::Value::String(format_rational(q)),
            Delta::Power { base, exp } => serde_json::json!({ "base": base, "exp": format!("-{exp}") }),
        }
    }
}

/// Enclosure of `ln pi`.
fn ln_pi(bits: u32) -> Result<Interval> {
    let pi = pi_interval(bits + 4);
    let lo = ln_interval(&pi.lo.to_rational(), bits + 2)?;
    let hi = ln_interval(&pi.hi.to_rational(), bits + 2)?;
    Ok(Interval::new(lo.lo, hi.hi))
}

/// Exponent from an enclosure of `ln u`.
pub fn exponent_from_log_u(ln_u: &Interval, v: &BigRational, delta: &Delta, bits: u32) -> Result<Interval> {
    if !v.is_positive() {
        return Err(Error::InvalidArgument("v must be positive".into()));
    }
    let prec = bits as i64 + 16;
    let num = ln_u.add(&ln_pi(bits + 16)?).sub(&ln_interval(&(v * BigRational::from_integer(36.into())), bits + 16)?);
    if !num.is_positive() {
        return Err(Error::ConditionFailed("u pi > 36 v is not certified at this precision".into()));
    }
    let den = delta.log_term(bits + 16)?;
    let q = num.div(&den, prec).ok_or_else(|| Error::ConditionFailed("ln(36 / delta^2) is not positive".into()))?;
    Ok(Interval::one().add(&q))
}

/// Certified enclosure of `1 + ln(u pi / (36 v)) / ln(36 / delta^2)`.
pub fn exponent(u: &BigRational, v: &BigRational, delta: &Delta, bits: u32) -> Result<Interval> {
    let ln_u = ln_interval(u, bits + 16).map_err(|_| Error::InvalidArgument("u must be positive".into()))?;
    exponent_from_log_u(&ln_u, v, delta, bits)
}

/// Ledger for the parameter choice `r = 2 prod T`, `k = ceil(18 r^3 / pi) - 1`,
/// `u = (k + 1) / r^2`, `v = r / 2`, `delta = D^-1 = p^-2k`.
#[derive(Clone, Debug)]
pub struct TheoremLedger {
    pub t: Vec<u64>,
    pub p: u64,
    pub r: BigInt,
    pub k: BigInt,
    pub u: BigRational,
    pub v: BigRational,
    pub delta: Delta,
    pub d: Delta,
    /// `None` when `u pi > 36 v` fails.
    pub exponent: Option<Interval>,
    pub feasible: bool,
    pub precision_bits: u32,
}

pub fn theorem_parameters(t: &[u64], p: u64, bits: u32) -> Result<TheoremLedger> {
    let mut ts = t.to_vec();
    ts.sort_unstable();
    ts.dedup();
    for &q in &ts {
        if q == 2 || !is_prime(q) {
            return Err(Error::NotOddPrime(q.to_string()));
        }
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    if ts.contains(&p) {
        return Err(Error::InvalidArgument(format!("{p} lies in T")));
    }
    let r: BigInt = ts.iter().fold(BigInt::from(2), |acc, &q| acc * q);
    let r3 = BigRational::from_integer(r.pow(3) * 18);
    let k = ceil_over_pi(&r3, DEFAULT_CEIL_CAP_BITS)? - 1;
    let u = BigRational::new(&k + 1, r.pow(2));
    let v = BigRational::new(r.clone(), 2.into());
    let delta = Delta::Power { base: p, exp: &k * 2 };
    let (exponent, feasible) = match exponent(&u, &v, &delta, bits) {
        Ok(iv) => (Some(iv), true),
        Err(Error::ConditionFailed(_)) => (None, false),
        Err(e) => return Err(e),
    };
    Ok(TheoremLedger { t: ts, p, r, d: delta.clone(), k, u, v, delta, exponent, feasible, precision_bits: bits })
}

/// Certified decimal rendering of an interval: `(lo, hi)` with `digits`
/// significant digits, rounded outward.
pub fn interval_sci(iv: &Interval, digits: usize) -> (String, String) {
    (iv.lo.to_sci(digits, Round::Down), iv.hi.to_sci(digits, Round::Up))
}

/// Enclosure of `x - 1`.
pub fn excess(iv: &Interval) -> Interval {
    iv.sub(&Interval::one())
}

#[derive(Serialize)]
struct LedgerJson {
    t: Vec<u64>,
    p: u64,
    r: String,
    k: String,
    u: String,
    v: String,
    delta: serde_json::Value,
    d: serde_json::Value,
    feasible: bool,
    precision_bits: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    exponent: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    notice: Option<String>,
}

impl TheoremLedger {
    pub fn to_json(&self) -> serde_json::Value {
        let exponent = self.exponent.as_ref().map(|iv| {
            let ex = excess(iv);
            let (lo, hi) = interval_sci(&ex, 30);
            let w = ex.width();
            serde_json::json!({
                "excess_lo": lo,
                "excess_hi": hi,
                "excess": ex.mid().to_sci(3, Round::Nearest),
                "width": w.to_sci(3, Round::Up),
                "display": format!("1 + {}", ex.mid().to_sci(3, Round::Nearest)),
            })
        });
        let j = LedgerJson {
            t: self.t.clone(),
            p: self.p,
            r: self.r.to_string(),
            k: self.k.to_string(),
            u: format_rational(&self.u),
            v: format_rational(&self.v),
            delta: self.delta.to_json(),
            d: match &self.d {
                Delta::Power { base, exp } => serde_json::json!({ "base": base, "exp": exp.to_string() }),
                other => other.to_json(),
            },
            feasible: self.feasible,
            precision_bits: self.precision_bits,
            exponent,
            notice: (!self.feasible).then(|| "infeasible: u pi <= 36 v, the exponent bound gives nothing".to_string()),
        };
        serde_json::to_value(j).expect("ledger serializes")
    }
}
