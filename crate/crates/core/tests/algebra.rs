use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use kproj_core::scalar::totient;
use kproj_core::{Poly, Scalar, TruncatedSeries};

const ORDERS: [u32; 6] = [1, 3, 4, 5, 8, 12];

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn scalar_in(order: u32) -> impl Strategy<Value = Scalar> {
    prop::collection::vec((-6i64..7, 1i64..4), totient(order)).prop_map(move |c| {
        Scalar::from_coords(order, c.into_iter().map(|(n, d)| rat(n, d)).collect()).unwrap()
    })
}

fn triple() -> impl Strategy<Value = (Scalar, Scalar, Scalar)> {
    prop::sample::select(ORDERS.to_vec())
        .prop_flat_map(|l| (scalar_in(l), scalar_in(l), scalar_in(l)))
}

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(-4i64..5, 0..7).prop_map(|c| Poly::from_ints(&c))
}

fn series(n: std::ops::Range<usize>) -> impl Strategy<Value = TruncatedSeries> {
    prop::collection::vec(-4i64..5, n)
        .prop_map(|c| TruncatedSeries::new(c.into_iter().map(Scalar::from_int).collect()))
}

proptest! {
    #[test]
    fn field_axioms((a, b, c) in triple()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, Scalar::zero());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), Scalar::one());
            prop_assert_eq!((&b * &a).checked_div(&a).unwrap(), b.clone());
        }
    }

    #[test]
    fn embedding_is_a_ring_map((a, b, _) in triple(), mult in 1u32..4) {
        let l = a.order().max(b.order()) * mult;
        let (ea, eb) = (a.embed(l).unwrap(), b.embed(l).unwrap());
        prop_assert_eq!(&ea * &eb, (&a * &b).embed(l).unwrap());
        prop_assert_eq!(&ea + &eb, (&a + &b).embed(l).unwrap());
    }

    #[test]
    fn text_form_round_trips((a, _, _) in triple()) {
        prop_assert_eq!(a.to_string().parse::<Scalar>().unwrap(), a);
    }

    #[test]
    fn degree_is_additive(p in poly(), q in poly()) {
        let prod = &p * &q;
        match (p.degree(), q.degree()) {
            (Some(a), Some(b)) => prop_assert_eq!(prod.degree(), Some(a + b)),
            _ => prop_assert!(prod.is_zero()),
        }
    }

    #[test]
    fn division_identity(a in poly(), b in poly()) {
        prop_assume!(!b.is_zero());
        let (q, r) = a.div_rem(&b).unwrap();
        prop_assert_eq!(&(&q * &b) + &r, a.clone());
        prop_assert!(r.is_zero() || r.degree() < b.degree());
        let g = a.gcd(&b).unwrap();
        prop_assert!(a.div_rem(&g).unwrap().1.is_zero());
        prop_assert!(b.div_rem(&g).unwrap().1.is_zero());
    }

    #[test]
    fn series_ring_laws(f in series(1..20), g in series(1..20), h in series(1..20)) {
        prop_assert_eq!(f.mul(&g), g.mul(&f));
        prop_assert_eq!(f.mul(&g).mul(&h), f.mul(&g.mul(&h)));
        prop_assert_eq!(f.mul(&g.add(&h)), f.mul(&g).add(&f.mul(&h)));
    }

    #[test]
    fn truncation_is_sound(f in series(1..20), g in series(1..20), extra in series(5..10)) {
        // Appending terms to an input never changes the terms a result already reports.
        let n = f.trunc_order().min(g.trunc_order());
        let mut longer = f.coeffs().to_vec();
        longer.extend(extra.coeffs().iter().cloned());
        let f2 = TruncatedSeries::new(longer);
        prop_assert_eq!(f.mul(&g).trunc_order(), n);
        prop_assert_eq!(f.add(&g).trunc_order(), n);
        prop_assert_eq!(f2.mul(&g).truncate(n), f.mul(&g));
    }

    #[test]
    fn substitution_composes(f in series(1..30), a in 1usize..4, b in 1usize..4) {
        let twice = f.substitute_power(a).substitute_power(b);
        let once = f.substitute_power(a * b);
        let n = twice.trunc_order().min(once.trunc_order());
        prop_assert_eq!(twice.truncate(n), once.truncate(n));
        for (i, c) in once.coeffs().iter().enumerate() {
            let expected = if i % (a * b) == 0 { f.coeffs()[i / (a * b)].clone() } else { Scalar::zero() };
            prop_assert_eq!(c, &expected);
        }
    }

    #[test]
    fn series_inverse(f in series(1..20), c0 in 1i64..4) {
        let mut cs = f.coeffs().to_vec();
        cs[0] = Scalar::from_int(c0);
        let f = TruncatedSeries::new(cs);
        let inv = f.inverse().unwrap();
        prop_assert_eq!(f.mul(&inv), TruncatedSeries::constant(Scalar::one(), f.trunc_order()));
    }
}

#[test]
fn zeta_has_exact_order() {
    for l in ORDERS {
        let z = Scalar::zeta(l);
        assert!(z.pow(l as u64).is_one());
        for e in 1..l {
            assert!(!z.pow(e as u64).is_one(), "zeta_{l}^{e}");
        }
        let total: Scalar = (0..l).map(|e| z.pow(e as u64)).sum();
        assert_eq!(
            total,
            if l == 1 {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        );
    }
}

#[test]
fn rational_results_are_demoted() {
    let i = Scalar::zeta(4);
    let minus_one = &i * &i;
    assert_eq!(minus_one.order(), 1);
    assert_eq!(minus_one.to_string(), "-1");
    assert_eq!(Scalar::from_ratio(6, -4).to_string(), "-3/2");
}
