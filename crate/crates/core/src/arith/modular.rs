//! Word-size modular arithmetic: primality and Legendre symbols.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// `a mod q` in `[0, q)` for an arbitrary integer.
pub fn reduce(a: &BigInt, q: u64) -> u64 {
    a.mod_floor(&BigInt::from(q)).to_u64().expect("residue fits")
}

/// Legendre symbol `(a | q)` by Euler's criterion.
pub fn legendre_symbol(a: &BigInt, q: u64) -> Result<i8> {
    if q == 2 || !is_prime(q) {
        return Err(Error::NotOddPrime(q.to_string()));
    }
    let r = reduce(a, q);
    if r == 0 {
        return Ok(0);
    }
    let e = pow_mod(r, (q - 1) / 2, q);
    Ok(if e == 1 { 1 } else { -1 })
}

pub fn legendre_i64(a: i64, q: u64) -> Result<i8> {
    legendre_symbol(&BigInt::from(a), q)
}

/// Prime factorization by trial division (desk-scale inputs).
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_squarefree(n: i64) -> bool {
    n != 0 && factorize(n.unsigned_abs()).iter().all(|&(_, e)| e == 1)
}
