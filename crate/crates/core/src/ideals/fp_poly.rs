//! Polynomials over F_p and their factorization (distinct-degree, then
//! Cantor-Zassenhaus equal-degree splitting).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::modular::{mul_mod, pow_mod};

/// Polynomial over F_p, constant term first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FpPoly {
    pub c: Vec<u64>,
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

impl FpPoly {
    pub fn new(mut c: Vec<u64>) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly { c }
    }

    pub fn zero() -> Self {
        FpPoly { c: vec![] }
    }

    pub fn one() -> Self {
        FpPoly { c: vec![1] }
    }

    pub fn x() -> Self {
        FpPoly { c: vec![0, 1] }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn lead(&self) -> u64 {
        *self.c.last().unwrap_or(&0)
    }

    pub fn add(&self, o: &FpPoly, p: u64) -> FpPoly {
        let n = self.c.len().max(o.c.len());
        FpPoly::new((0..n).map(|i| (self.c.get(i).unwrap_or(&0) + o.c.get(i).unwrap_or(&0)) % p).collect())
    }

    pub fn sub(&self, o: &FpPoly, p: u64) -> FpPoly {
        let n = self.c.len().max(o.c.len());
        FpPoly::new((0..n).map(|i| (self.c.get(i).unwrap_or(&0) + p - o.c.get(i).unwrap_or(&0)) % p).collect())
    }

    pub fn mul(&self, o: &FpPoly, p: u64) -> FpPoly {
        if self.is_zero() || o.is_zero() {
            return FpPoly::zero();
        }
        let mut out = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(a, b, p)) % p;
            }
        }
        FpPoly::new(out)
    }

    pub fn divrem(&self, d: &FpPoly, p: u64) -> (FpPoly, FpPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.c.len() < d.c.len() {
            return (FpPoly::zero(), self.clone());
        }
        let mut r = self.c.clone();
        let dd = d.degree();
        let inv = inv_mod(d.lead(), p);
        let mut q = vec![0u64; self.c.len() - dd];
        for i in (0..q.len()).rev() {
            let coef = mul_mod(r[i + dd], inv, p);
            q[i] = coef;
            if coef != 0 {
                for (j, &dc) in d.c.iter().enumerate() {
                    r[i + j] = (r[i + j] + p - mul_mod(coef, dc, p)) % p;
                }
            }
        }
        (FpPoly::new(q), FpPoly::new(r))
    }

    pub fn rem(&self, d: &FpPoly, p: u64) -> FpPoly {
        self.divrem(d, p).1
    }

    pub fn monic(&self, p: u64) -> FpPoly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = inv_mod(self.lead(), p);
        FpPoly::new(self.c.iter().map(|&a| mul_mod(a, inv, p)).collect())
    }

    pub fn gcd(&self, o: &FpPoly, p: u64) -> FpPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b, p);
            a = b;
            b = r;
        }
        a.monic(p)
    }

    /// `self^e mod m`
    pub fn pow_mod(&self, mut e: u128, m: &FpPoly, p: u64) -> FpPoly {
        let mut base = self.rem(m, p);
        let mut acc = FpPoly::one().rem(m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, p).rem(m, p);
            }
            base = base.mul(&base, p).rem(m, p);
            e >>= 1;
        }
        acc
    }
}

/// Distinct irreducible monic factors of `f` (any multiplicities), grouped
/// by degree: `(degree, product of the factors of that degree)`.
fn distinct_degree(f: &FpPoly, p: u64) -> Vec<(usize, FpPoly)> {
    let mut rest = f.monic(p);
    let mut out = Vec::new();
    let mut h = FpPoly::x();
    let mut k = 0;
    while rest.degree() > 0 {
        k += 1;
        if k > f.degree() {
            break;
        }
        h = h.pow_mod(p as u128, f, p);
        let g = h.sub(&FpPoly::x(), p).gcd(&rest, p);
        if g.degree() > 0 {
            // strip every copy of these factors
            loop {
                let c = rest.gcd(&g, p);
                if c.degree() == 0 {
                    break;
                }
                rest = rest.divrem(&c, p).0;
            }
            out.push((k, g));
        }
    }
    out
}

/// Split a squarefree product of irreducibles of degree `d`.
fn equal_degree(g: &FpPoly, d: usize, p: u64, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
    if g.degree() == d {
        return vec![g.clone()];
    }
    loop {
        let a = FpPoly::new((0..g.degree()).map(|_| rng.gen_range(0..p)).collect());
        if a.degree() == 0 {
            continue;
        }
        let b = if p == 2 {
            // trace map a + a^2 + ... + a^(2^(d-1))
            let mut t = a.clone();
            let mut s = a.clone();
            for _ in 1..d {
                t = t.mul(&t, p).rem(g, p);
                s = s.add(&t, p);
            }
            s
        } else {
            let e = ((p as u128).pow(d as u32) - 1) / 2;
            a.pow_mod(e, g, p).sub(&FpPoly::one(), p)
        };
        let h = b.gcd(g, p);
        if h.degree() > 0 && h.degree() < g.degree() {
            let other = g.divrem(&h, p).0.monic(p);
            let mut out = equal_degree(&h, d, p, rng);
            out.extend(equal_degree(&other, d, p, rng));
            return out;
        }
    }
}

/// Monic irreducible factors with multiplicities, sorted by degree then
/// coefficients (constant term first).
pub fn factor(f: &FpPoly, p: u64) -> Vec<(FpPoly, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ p);
    let mut irreducibles = Vec::new();
    for (d, g) in distinct_degree(f, p) {
        irreducibles.extend(equal_degree(&g, d, p, &mut rng));
    }
    let mut out: Vec<(FpPoly, u32)> = irreducibles
        .into_iter()
        .map(|g| {
            let mut e = 0;
            let mut rest = f.monic(p);
            loop {
                let (q, r) = rest.divrem(&g, p);
                if !r.is_zero() {
                    break;
                }
                e += 1;
                rest = q;
            }
            (g, e)
        })
        .collect();
    out.sort_by(|a, b| (a.0.degree(), &a.0.c).cmp(&(b.0.degree(), &b.0.c)));
    out
}
