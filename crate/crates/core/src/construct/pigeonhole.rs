//! Unit-modulus elements from ideals in a common class.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::ideals::{class_number_imag_quadratic, is_principal, FracIdeal, PrimeIdeal, Principality};
use crate::numberfield::{detect_cm, FieldElement, NumberField};

/// Settings for the principality searches behind class grouping.
#[derive(Clone, Debug)]
pub struct SearchParams {
    pub slack: BigRational,
    pub depth: u32,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams { slack: crate::ideals::default_slack(), depth: crate::ideals::DEFAULT_UNIT_SEARCH_DEPTH }
    }
}

/// Partition of a list of ideals into classes by certified principality of
/// ratios.
#[derive(Clone, Debug)]
pub struct ClassGrouping {
    /// Class index of each ideal; classes are numbered by first appearance.
    pub class_of: Vec<usize>,
    /// Comparisons whose outcome was inconclusive.
    pub inconclusive: usize,
}

impl ClassGrouping {
    pub fn class_count(&self) -> usize {
        self.class_of.iter().max().map_or(0, |m| m + 1)
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Union-find over the ideals: each ideal is compared against the current
/// representative of every class and merged wherever the ratio is principal.
pub fn class_grouping(ideals: &[FracIdeal], params: &SearchParams) -> Result<ClassGrouping> {
    let m = ideals.len();
    let mut parent: Vec<usize> = (0..m).collect();
    let mut reps: Vec<usize> = Vec::new();
    let mut inconclusive = 0;
    for i in 0..m {
        let mut merged = false;
        for &r in &reps.clone() {
            let root = find(&mut parent, r);
            if root != r {
                continue;
            }
            if merged && find(&mut parent, i) == root {
                continue;
            }
            let ratio = ideals[i].div(&ideals[r])?;
            match is_principal(&ratio, &params.slack, params.depth)? {
                Principality::Generator(_) => {
                    let a = find(&mut parent, i);
                    let (lo, hi) = if r < a { (r, a) } else { (a, r) };
                    parent[hi] = lo;
                    merged = true;
                }
                Principality::NotFound => {}
                Principality::Inconclusive => inconclusive += 1,
            }
        }
        if !merged {
            reps.push(i);
        }
        reps.retain(|&r| parent[r] == r);
    }
    let mut index = BTreeMap::new();
    let class_of = (0..m)
        .map(|i| {
            let root = find(&mut parent, i);
            let next = index.len();
            *index.entry(root).or_insert(next)
        })
        .collect();
    Ok(ClassGrouping { class_of, inconclusive })
}

/// Output of the pigeonhole step.
#[derive(Clone, Debug)]
pub struct UnitSet {
    pub field: Arc<NumberField>,
    /// Exactly unit-modulus, pairwise distinct principal ideals.
    pub units: Vec<FieldElement>,
    /// `Q = prod (P_j conj(P_j))^k_j`
    pub q: FracIdeal,
    pub d: BigInt,
    /// `prod (k_j + 1) / h` when `h` is known.
    pub guaranteed_min: Option<BigRational>,
    pub class_number: Option<u64>,
    /// Exponent vectors of the largest class, base first.
    pub class_members: Vec<Vec<u32>>,
    pub classes_found: usize,
    /// Principality comparisons that could not be decided.
    pub inconclusive: usize,
}

impl UnitSet {
    /// True when the set holds nothing beyond `1`.
    pub fn is_trivial(&self) -> bool {
        self.units.iter().all(|u| u.is_one())
    }
}

/// `D = prod_p p^(max ceil(2 k_j / e_j))` over the primes `p` below the `P_j`.
pub fn denominator_bound(primes: &[(PrimeIdeal, u32)]) -> BigInt {
    let mut exps: BTreeMap<u64, u32> = BTreeMap::new();
    for (p, k) in primes {
        let e = (2 * k).div_ceil(p.e);
        let slot = exps.entry(p.p).or_insert(0);
        *slot = (*slot).max(e);
    }
    exps.into_iter().fold(BigInt::one(), |acc, (p, e)| acc * BigInt::from(p).pow(e))
}

/// Squarefree `d` with `K = Q(sqrt d)` for a quadratic field.
fn quadratic_d(field: &NumberField) -> Option<i64> {
    if field.degree() != 2 {
        return None;
    }
    let disc: i64 = field.disc().try_into().ok()?;
    Some(if disc.rem_euclid(4) == 1 { disc } else { disc / 4 })
}

/// Class number when it can be computed here (imaginary quadratic fields
/// and `Q`).
pub fn known_class_number(field: &NumberField) -> Option<u64> {
    match field.degree() {
        1 => Some(1),
        2 if field.is_totally_imaginary() => class_number_imag_quadratic(quadratic_d(field)?).ok(),
        _ => None,
    }
}

fn exponent_vectors(ks: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for &k in ks {
        out = out.into_iter().flat_map(|v| (0..=k).map(move |a| [v.clone(), vec![a]].concat())).collect();
    }
    out
}

/// Norm-one units by pigeonhole. The ideals `prod P_j^a_j conj(P_j)^(k_j - a_j)`
/// are grouped into classes; ratios inside the largest class give generators
/// `alpha` and units `alpha / c(alpha)`. The set is closed under inverses.
pub fn pigeonhole_units(field: &Arc<NumberField>, primes: &[(PrimeIdeal, u32)], params: &SearchParams) -> Result<UnitSet> {
    let cm = detect_cm(field).ok_or(Error::NotCm)?;
    let conjs: Vec<FracIdeal> = primes.iter().map(|(p, _)| p.ideal.conj(&cm)).collect::<Result<_>>()?;
    for (i, (pi, ki)) in primes.iter().enumerate() {
        if !Arc::ptr_eq(pi.ideal.field(), field) {
            return Err(Error::FieldMismatch);
        }
        if *ki == 0 {
            return Err(Error::InvalidArgument("every k_j must be at least 1".into()));
        }
        for (j, (pj, _)) in primes.iter().enumerate() {
            if pi.ideal == conjs[j] {
                return Err(Error::ConjugateCollision(i, j));
            }
            if i < j && pi.ideal == pj.ideal {
                return Err(Error::InvalidArgument(format!("primes {i} and {j} coincide")));
            }
        }
    }
    let ks: Vec<u32> = primes.iter().map(|(_, k)| *k).collect();
    let vectors = exponent_vectors(&ks);
    let ideals: Vec<FracIdeal> = vectors
        .iter()
        .map(|a| {
            let mut acc = FracIdeal::unit(field);
            for (j, (p, k)) in primes.iter().enumerate() {
                acc = acc.mul(&p.ideal.pow(a[j])?)?.mul(&conjs[j].pow(k - a[j])?)?;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let grouping = class_grouping(&ideals, params)?;
    let mut sizes = vec![0usize; grouping.class_count()];
    for &c in &grouping.class_of {
        sizes[c] += 1;
    }
    // largest class; ties go to the class seen first (smallest member)
    let best = (0..sizes.len()).fold(0, |b, c| if sizes[c] > sizes[b] { c } else { b });
    let members: Vec<usize> = (0..ideals.len()).filter(|&i| grouping.class_of[i] == best).collect();
    let base = &ideals[members[0]];
    let mut q = FracIdeal::unit(field);
    for (j, (p, k)) in primes.iter().enumerate() {
        q = q.mul(&p.ideal.mul(&conjs[j])?.pow(*k)?)?;
    }
    let q_inv2 = q.pow(2)?.inv()?;
    let d = denominator_bound(primes);
    let d_q = BigRational::from_integer(d.clone());
    let mut inconclusive = grouping.inconclusive;
    let mut units: Vec<FieldElement> = Vec::new();
    let mut seen: Vec<FracIdeal> = Vec::new();
    let mut push = |u: FieldElement| -> Result<()> {
        if !u.is_unit_modulus(&cm) {
            return Err(Error::InvalidArgument("pigeonhole produced a non-unit-modulus element".into()));
        }
        if !q_inv2.contains(&u) || !u.scale(&d_q).is_integral() {
            return Err(Error::InvalidArgument("pigeonhole unit outside D^-1 O_K".into()));
        }
        let id = FracIdeal::principal(&u)?;
        if !seen.contains(&id) {
            seen.push(id);
            units.push(u);
        }
        Ok(())
    };
    for &i in &members {
        let ratio = ideals[i].div(base)?;
        let alpha = match is_principal(&ratio, &params.slack, params.depth)? {
            Principality::Generator(g) => g,
            _ => {
                inconclusive += 1;
                continue;
            }
        };
        let u = alpha.div(&alpha.conj(&cm))?;
        let inv = u.conj(&cm);
        push(u)?;
        push(inv)?;
    }
    let class_number = known_class_number(field);
    let total: u64 = ks.iter().map(|&k| k as u64 + 1).product();
    let guaranteed_min = class_number.map(|h| BigRational::new(total.into(), h.into()));
    Ok(UnitSet {
        field: field.clone(),
        units,
        q,
        d,
        guaranteed_min,
        class_number,
        class_members: members.iter().map(|&i| vectors[i].clone()).collect(),
        classes_found: grouping.class_count(),
        inconclusive,
    })
}

/// A maximal list of primes above `p` containing no conjugate pair and no
/// prime fixed by conjugation, in splitting order.
pub fn conjugate_free_primes(field: &Arc<NumberField>, p: u64) -> Result<Vec<PrimeIdeal>> {
    let cm = detect_cm(field).ok_or(Error::NotCm)?;
    let mut chosen: Vec<PrimeIdeal> = Vec::new();
    let mut blocked: Vec<FracIdeal> = Vec::new();
    for q in crate::ideals::split_prime(field, p)? {
        let c = q.ideal.conj(&cm)?;
        if c == q.ideal || blocked.contains(&q.ideal) {
            continue;
        }
        blocked.push(c);
        blocked.push(q.ideal.clone());
        chosen.push(q);
    }
    Ok(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideals::split_prime;
    use crate::numberfield::preset;

    #[test]
    fn gaussian_five_k2() {
        let k = preset("gaussian").unwrap();
        let p = split_prime(&k, 5).unwrap().remove(0);
        let us = pigeonhole_units(&k, &[(p, 2)], &SearchParams::default()).unwrap();
        assert_eq!(us.d, BigInt::from(625));
        assert_eq!(us.guaranteed_min, Some(BigRational::from_integer(3.into())));
        assert!(us.units.len() >= 3);
        let want = FieldElement::new(&k, vec![BigRational::new((-7).into(), 25.into()), BigRational::new(24.into(), 25.into())]).unwrap();
        assert!(us.units.contains(&want), "{:?}", us.units);
        assert!(us.units.contains(&FieldElement::one(&k)));
    }

    #[test]
    fn sqrt_minus_five_three_k2() {
        let k = preset("qsqrt-5").unwrap();
        let p = split_prime(&k, 3).unwrap().remove(0);
        let us = pigeonhole_units(&k, &[(p, 2)], &SearchParams::default()).unwrap();
        assert_eq!(us.d, BigInt::from(81));
        assert_eq!(us.guaranteed_min, Some(BigRational::new(3.into(), 2.into())));
        assert!(us.units.len() >= 2);
        let want = FieldElement::new(&k, vec![BigRational::new((-1).into(), 9.into()), BigRational::new(4.into(), 9.into())]).unwrap();
        assert!(us.units.contains(&want), "{:?}", us.units);
    }

    #[test]
    fn collisions_and_empty() {
        let k = preset("gaussian").unwrap();
        let ps = split_prime(&k, 5).unwrap();
        let r = pigeonhole_units(&k, &[(ps[0].clone(), 1), (ps[1].clone(), 1)], &SearchParams::default());
        assert!(matches!(r, Err(Error::ConjugateCollision(_, _))));
        let us = pigeonhole_units(&k, &[], &SearchParams::default()).unwrap();
        assert_eq!(us.units, vec![FieldElement::one(&k)]);
        assert!(us.is_trivial());
        assert_eq!(us.guaranteed_min, Some(BigRational::one()));
    }

    #[test]
    fn denominators() {
        let k = preset("gaussian").unwrap();
        let p5 = split_prime(&k, 5).unwrap().remove(0);
        let p13 = split_prime(&k, 13).unwrap().remove(0);
        assert_eq!(denominator_bound(&[(p5.clone(), 1), (p13, 1)]), BigInt::from(4225));
        let p2 = split_prime(&k, 2).unwrap().remove(0);
        // ramified: ceil(2k / 2)
        assert_eq!(denominator_bound(&[(p2, 3)]), BigInt::from(8));
    }

    #[test]
    fn class_counts() {
        for (name, h) in [("gaussian", 1usize), ("qsqrt-5", 2), ("qsqrt-23", 3)] {
            let k = preset(name).unwrap();
            let mut ideals = Vec::new();
            for p in [2u64, 3, 5, 7, 11, 13] {
                if let Ok(ps) = split_prime(&k, p) {
                    ideals.extend(ps.into_iter().map(|q| q.ideal));
                }
            }
            let g = class_grouping(&ideals, &SearchParams::default()).unwrap();
            assert_eq!(g.class_count(), h, "{name}");
            assert_eq!(g.inconclusive, 0);
        }
    }
}
