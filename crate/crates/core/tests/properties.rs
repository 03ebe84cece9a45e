use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use unitdist_core::arith::{Dyadic, Interval};
use unitdist_core::construct::{enumerate_window, exponent, Delta};
use unitdist_core::ideals::FracIdeal;
use unitdist_core::numberfield::lattice::{covolume_formula, minkowski_covolume};
use unitdist_core::numberfield::{compositum_multiquadratic, detect_cm, preset, FieldElement, NumberField};

fn cm_fields() -> &'static [Arc<NumberField>] {
    static F: OnceLock<Vec<Arc<NumberField>>> = OnceLock::new();
    F.get_or_init(|| ["gaussian", "qsqrt-5", "qsqrt-23", "qi-sqrt5"].iter().map(|s| preset(s).unwrap()).collect())
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn element(k: &Arc<NumberField>, c: &[i64]) -> FieldElement {
    FieldElement::from_ints(k, &c[..k.degree()]).unwrap()
}

fn dy(x: &BigRational) -> Dyadic {
    Dyadic::from_rational(x, 80, unitdist_core::arith::Round::Nearest)
}

/// Interval `[lo, lo + w]` and a point `lo + t w` inside it.
fn interval_and_point(lo: (i64, i64), w: (i64, i64), t: (i64, i64)) -> (Interval, BigRational) {
    let lo = dy(&rat(lo.0, lo.1));
    let hi = dy(&(lo.to_rational() + rat(w.0, w.1)));
    let x = lo.to_rational() + (hi.to_rational() - lo.to_rational()) * rat(t.0, t.1);
    (Interval::new(lo, hi), x)
}

fn coords() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-6i64..=6, 4)
}

fn nonzero_coords() -> impl Strategy<Value = Vec<i64>> {
    coords().prop_filter("nonzero in every degree", |c| c[0] != 0 || c[1] != 0)
}

fn squarefree_d() -> impl Strategy<Value = i64> {
    (-300i64..300).prop_filter("squarefree, not 0 or 1", |&d| {
        d != 0 && d != 1 && (2..=17i64).all(|p| d % (p * p) != 0)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn interval_ops_contain_pointwise_results(
        a in ((-1000i64..1000, 1i64..97), (0i64..50, 1i64..13), (0i64..=16, 16i64..=16)),
        b in ((-1000i64..1000, 1i64..97), (0i64..50, 1i64..13), (0i64..=16, 16i64..=16)),
    ) {
        let (ia, x) = interval_and_point(a.0, a.1, a.2);
        let (ib, y) = interval_and_point(b.0, b.1, b.2);
        prop_assert!(ia.add(&ib).contains_rational(&(&x + &y)));
        prop_assert!(ia.sub(&ib).contains_rational(&(&x - &y)));
        prop_assert!(ia.mul(&ib).contains_rational(&(&x * &y)));
        prop_assert!(ia.sqr().contains_rational(&(&x * &x)));
        if let Some(q) = ia.div(&ib, 96) {
            prop_assert!(!y.is_zero());
            prop_assert!(q.contains_rational(&(&x / &y)));
        } else {
            prop_assert!(ib.contains_zero());
        }
        let s = ia.mul(&ia).sqrt(96);
        let ax = x.abs();
        prop_assert!(s.lo.to_rational() <= ax && ax <= s.hi.to_rational());
    }

    #[test]
    fn ideal_norm_is_multiplicative(fi in 0usize..4, x in nonzero_coords(), y in coords(), w in nonzero_coords()) {
        let k = &cm_fields()[fi];
        let (x, y, w) = (element(k, &x), element(k, &y), element(k, &w));
        let i = FracIdeal::from_generators(k, &[x.clone(), y]).unwrap();
        let j = FracIdeal::principal(&w).unwrap();
        prop_assert_eq!(i.mul(&j).unwrap().norm(), i.norm() * j.norm());
        prop_assert_eq!(FracIdeal::principal(&x).unwrap().norm(), x.norm().abs());
        let q = i.div(&j).unwrap();
        prop_assert_eq!(q.norm(), i.norm() / j.norm());
    }

    #[test]
    fn conjugation_is_an_involution(fi in 0usize..4, x in coords(), y in nonzero_coords(), z in coords()) {
        let k = &cm_fields()[fi];
        let cm = detect_cm(k).unwrap();
        let (x, y, z) = (element(k, &x), element(k, &y), element(k, &z));
        prop_assert_eq!(x.conj(&cm).conj(&cm), x.clone());
        prop_assert_eq!(x.mul(&z).unwrap().conj(&cm), x.conj(&cm).mul(&z.conj(&cm)).unwrap());
        let i = FracIdeal::from_generators(k, &[y.clone(), z]).unwrap();
        let j = FracIdeal::principal(&y.add(&x).unwrap().add(&FieldElement::one(k)).unwrap());
        prop_assert_eq!(i.conj(&cm).unwrap().conj(&cm).unwrap(), i.clone());
        if let Ok(j) = j {
            prop_assert_eq!(i.mul(&j).unwrap().conj(&cm).unwrap(), i.conj(&cm).unwrap().mul(&j.conj(&cm).unwrap()).unwrap());
        }
        prop_assert_eq!(i.conj(&cm).unwrap().norm(), i.norm());
    }

    #[test]
    fn cm_modulus_is_consistent(fi in 0usize..4, x in nonzero_coords()) {
        let k = &cm_fields()[fi];
        let cm = detect_cm(k).unwrap();
        let x = element(k, &x);
        let u = x.div(&x.conj(&cm)).unwrap();
        prop_assert!(u.is_unit_modulus(&cm));
        let one = Interval::one();
        for b in u.minkowski_embed(64).unwrap() {
            prop_assert!(b.abs_sq().intersects(&one));
        }
        let tight = Dyadic::pow2(-200);
        for b in u.minkowski_embed(256).unwrap() {
            let d = b.abs_sq().sub(&one);
            prop_assert!(d.mag() <= tight);
        }
        let n2 = x.abs_sq(&cm);
        prop_assert!(cm.is_real(n2.coords()));
        for &p in &k.complex_places() {
            let real = n2.embed(p, 96).unwrap();
            let modsq = x.embed(p, 96).unwrap().abs_sq();
            prop_assert!(real.re.intersects(&modsq));
            prop_assert!(real.re.is_positive());
        }
    }

    #[test]
    fn quadratic_covolume(d in squarefree_d()) {
        let k = compositum_multiquadratic(&[d]).unwrap();
        let c = minkowski_covolume(&k, 64).unwrap();
        prop_assert!(c.intersects(&covolume_formula(&k, 64)));
    }

    #[test]
    fn scaled_lattice_is_separated(fi in 0usize..4, x in nonzero_coords(), m in 1i64..40, up in any::<bool>()) {
        let k = &cm_fields()[fi];
        let delta = if up { rat(m, 1) } else { rat(1, m) };
        let z = element(k, &x).scale(&delta);
        // |N(z)| >= delta^n because z / delta is a nonzero integer
        let n = k.degree();
        prop_assert!(z.norm().abs() >= num_traits::pow(delta.clone(), n));
        let d2 = Interval::from_rational(&(&delta * &delta), 96);
        let places = k.complex_places();
        let big = places.iter().any(|&p| !z.embed(p, 96).unwrap().abs_sq().sub(&d2).is_negative());
        prop_assert!(big);
    }
}

#[test]
fn quartic_covolumes() {
    for ds in [[-1i64, 5], [-1, 2], [-3, 5], [-1, 13], [-5, 3], [-2, 3]] {
        let k = compositum_multiquadratic(&ds).unwrap();
        let c = minkowski_covolume(&k, 64).unwrap();
        assert!(c.intersects(&covolume_formula(&k, 64)), "{ds:?}");
    }
}

#[test]
fn window_packing_bound() {
    // |W| <= (9 R^2 / delta^2)^f
    for name in ["gaussian", "qsqrt-5", "qsqrt-23", "qi-sqrt5"] {
        let k = preset(name).unwrap();
        let f = k.complex_places().len();
        for (r, delta) in [(rat(2, 1), rat(1, 1)), (rat(5, 2), rat(1, 2)), (rat(3, 1), rat(1, 1)), (rat(2, 1), rat(2, 3))] {
            if f == 2 && delta < BigRational::one() {
                continue;
            }
            let w = enumerate_window(&k, &delta, &r, None).unwrap();
            let bound = num_traits::pow(rat(9, 1) * &r * &r / (&delta * &delta), f);
            assert!(BigRational::from_integer(BigInt::from(w.len())) <= bound, "{name}");
        }
    }
}

#[test]
fn exponent_is_monotone() {
    let mut triples = Vec::new();
    for u in [50, 100, 200, 400, 800] {
        for v in [rat(1, 2), rat(1, 1)] {
            for d in [Delta::Power { base: 5, exp: BigInt::from(2) }, Delta::Rational(rat(1, 10))] {
                triples.push((rat(u, 1), v.clone(), d));
            }
        }
    }
    assert_eq!(triples.len(), 20);
    for (u, v, d) in triples {
        let e = |u: &BigRational, v: &BigRational| exponent(u, v, &d, 128).unwrap();
        let base = e(&u, &v);
        assert!(e(&(&u * rat(11, 10)), &v).lo > base.hi, "u {u}");
        assert!(e(&u, &(&v * rat(101, 100))).hi < base.lo, "v {v}");
    }
}
