//! Golod–Shafarevich bookkeeping for multiquadratic towers: generators of
//! `L_T`, Frattini rank, relation bound and complete splitting.

use num_bigint::BigInt;
use serde::Serialize;

use crate::arith::modular::legendre_i64;
use crate::arith::is_prime;
use crate::error::{Error, Result};

/// Default cap for [`find_split_primes`].
pub const DEFAULT_PRIME_CAP: u64 = 1_000_000;

fn check_odd_primes(t: &[u64]) -> Result<Vec<u64>> {
    let mut ts = t.to_vec();
    ts.sort_unstable();
    ts.dedup();
    if let Some(&q) = ts.iter().find(|&&q| q == 2 || !is_prime(q)) {
        return Err(Error::NotOddPrime(q.to_string()));
    }
    Ok(ts)
}

/// An `F_2`-basis of the positive squarefree `d ≡ 1 mod 4` supported on `T`,
/// in increasing order: the primes `≡ 1 mod 4`, and `q_0 q` for the other
/// primes `q ≡ 3 mod 4`, `q_0` the smallest one.
pub fn multiquadratic_generators(t: &[u64]) -> Result<Vec<i64>> {
    let ts = check_odd_primes(t)?;
    let mut gens: Vec<i64> = ts.iter().filter(|&&q| q % 4 == 1).map(|&q| q as i64).collect();
    let threes: Vec<u64> = ts.iter().copied().filter(|&q| q % 4 == 3).collect();
    if let Some((&q0, rest)) = threes.split_first() {
        gens.extend(rest.iter().map(|&q| (q0 * q) as i64));
    }
    gens.sort_unstable();
    Ok(gens)
}

/// `|T| - 1` if `T` has a prime `≡ 3 mod 4`, else `|T|`.
pub fn frattini_rank(t: &[u64]) -> Result<usize> {
    let ts = check_odd_primes(t)?;
    let any_three = ts.iter().any(|q| q % 4 == 3);
    Ok(if any_three { ts.len() - 1 } else { ts.len() })
}

/// Whether the odd prime `q` splits completely in `Q(sqrt d : d in gens)`,
/// with `i` adjoined when `require_i`.
pub fn splits_completely(q: u64, gens: &[i64], require_i: bool) -> Result<bool> {
    if q == 2 || !is_prime(q) {
        return Err(Error::NotOddPrime(q.to_string()));
    }
    if gens.iter().any(|&d| d.unsigned_abs() % q == 0) {
        return Err(Error::RamifiedPrime(q));
    }
    if require_i && q % 4 != 1 {
        return Ok(false);
    }
    for &d in gens {
        if legendre_i64(d, q)? != 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The first `count` primes outside `T` splitting completely in `L_T` (and in
/// `L_T(i)` when `require_1_mod_4`), scanning below `cap`.
pub fn find_split_primes(t: &[u64], count: usize, require_1_mod_4: bool, cap: u64) -> Result<Vec<u64>> {
    let ts = check_odd_primes(t)?;
    let gens = multiquadratic_generators(&ts)?;
    let mut out = Vec::with_capacity(count);
    let mut q = 3u64;
    while out.len() < count {
        if q > cap {
            return Err(Error::SearchExhausted(cap));
        }
        if is_prime(q) && !ts.contains(&q) && splits_completely(q, &gens, require_1_mod_4)? {
            out.push(q);
        }
        q += 2;
    }
    Ok(out)
}

/// `|disc|`, the class-number bound used for fields of degree at least 4.
pub fn class_number_bound(disc: &BigInt, degree: usize) -> Result<BigInt> {
    if degree < 4 {
        return Err(Error::DegreeTooSmall(degree));
    }
    Ok(num_traits::Signed::abs(disc))
}

/// `T`, the finite primes of `S` (infinity is implicit) and the prime used
/// for the construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerSpec {
    pub t: Vec<u64>,
    pub s_finite: Vec<u64>,
    pub p_split: Option<u64>,
}

impl TowerSpec {
    pub fn new(t: &[u64], s_finite: &[u64]) -> Self {
        TowerSpec { t: t.to_vec(), s_finite: s_finite.to_vec(), p_split: s_finite.first().copied() }
    }

    /// `|S|`, counting the infinite place.
    pub fn s_size(&self) -> usize {
        let mut s = self.s_finite.clone();
        s.sort_unstable();
        s.dedup();
        s.len() + 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GSReport {
    pub t: Vec<u64>,
    pub s: Vec<String>,
    pub d: usize,
    pub r_bound: usize,
    pub gs_satisfied: bool,
    pub generators: Vec<i64>,
    pub root_disc_bound: String,
}

/// `d`, `r <= d + |S| - 1` and the test `4 r <= d^2`, after checking that
/// every finite prime of `S` splits completely in `L_T(i)`.
pub fn gs_check(spec: &TowerSpec) -> Result<GSReport> {
    let ts = check_odd_primes(&spec.t)?;
    let mut sf = spec.s_finite.clone();
    sf.sort_unstable();
    sf.dedup();
    if let Some(&q) = sf.iter().find(|q| ts.contains(q)) {
        return Err(Error::InvalidArgument(format!("{q} lies in both T and S")));
    }
    if let Some(p) = spec.p_split {
        if !sf.contains(&p) {
            return Err(Error::InvalidArgument(format!("split prime {p} is not in S")));
        }
    }
    let gens = multiquadratic_generators(&ts)?;
    for &q in &sf {
        if q == 2 || !splits_completely(q, &gens, true)? {
            return Err(Error::SplitConditionFailed(q));
        }
    }
    let d = frattini_rank(&ts)?;
    debug_assert_eq!(d, gens.len());
    let r_bound = d + spec.s_size() - 1;
    let root: BigInt = ts.iter().fold(BigInt::from(2), |acc, &q| acc * q);
    let mut s: Vec<String> = sf.iter().map(|q| q.to_string()).collect();
    s.push("inf".into());
    Ok(GSReport { t: ts, s, d, r_bound, gs_satisfied: 4 * r_bound <= d * d, generators: gens, root_disc_bound: root.to_string() })
}
