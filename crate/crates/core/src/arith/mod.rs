//! Exact and certified-approximate scalar arithmetic.

pub mod consts;
pub mod dyadic;
pub mod interval;
pub mod linalg;
pub mod modular;
pub mod poly;
pub mod roots;

pub use consts::{ceil_over_pi, ceil_rational, certified_ceil, ln_interval, pi_interval};
pub use dyadic::{Dyadic, Round};
pub use interval::{ComplexInterval, Interval};
pub use modular::{is_prime, legendre_symbol};
pub use poly::{resultant, IntPoly, QPoly};
pub use roots::{isolate_complex_roots, isolate_roots, refine_roots, RootDisk, RootIsolation};

pub type BigRat = num_rational::BigRational;

/// Parse `"p/q"` or `"p"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: num_bigint::BigInt = n.trim().parse().ok()?;
            let d: num_bigint::BigInt = d.trim().parse().ok()?;
            if d == num_bigint::BigInt::from(0) {
                return None;
            }
            Some(BigRat::new(n, d))
        }
        None => Some(BigRat::from_integer(s.parse().ok()?)),
    }
}

/// Render a rational as `"p/q"`, or `"p"` when integral.
pub fn format_rational(q: &BigRat) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
