//! Randomised algebraic laws for the exact arithmetic types.

use pbranch_core::interp::{HalfPowerValue, Laurent};
use pbranch_core::padic::rational::{format_q, parse_q, qf, valuation};
use pbranch_core::{Artinian, Cyclotomic, Ring, Q};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Q> {
    (-50i64..=50, 1i64..=30).prop_map(|(n, d)| qf(n, d))
}

fn cyclotomic(m: u64) -> impl Strategy<Value = Cyclotomic> {
    prop::collection::vec(-6i64..=6, m as usize).prop_map(move |c| {
        c.iter().enumerate().fold(Cyclotomic::zero(m), |acc, (k, x)| {
            acc.add(&Cyclotomic::zeta_pow(m, k as i64).scale(&Q::from_integer((*x).into())))
        })
    })
}

fn artinian() -> impl Strategy<Value = Artinian<Q>> {
    prop::collection::vec(rational(), 4)
        .prop_map(|c| Artinian::from_terms(2, &Q::from_integer(0.into()), c.into_iter().enumerate().map(|(m, x)| (m as u64, x))))
}

proptest! {
    #[test]
    fn rational_text_roundtrip(x in rational()) {
        prop_assert_eq!(parse_q(&format_q(&x)).unwrap(), x);
    }

    #[test]
    fn valuation_is_additive(x in rational(), y in rational()) {
        prop_assume!(x != Q::from_integer(0.into()) && y != Q::from_integer(0.into()));
        for p in [2u64, 3, 5] {
            let v = valuation(&(x.clone() * &y), p).unwrap();
            prop_assert_eq!(v, valuation(&x, p).unwrap() + valuation(&y, p).unwrap());
        }
    }

    #[test]
    fn cyclotomic_ring_laws(a in cyclotomic(12), b in cyclotomic(12), c in cyclotomic(12)) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert!(a.sub(&a).eq_zero());
    }

    #[test]
    fn cyclotomic_inverse(a in cyclotomic(5)) {
        prop_assume!(!a.eq_zero());
        let inv = a.inv().unwrap();
        prop_assert_eq!(a.mul(&inv), Cyclotomic::one(5));
    }

    #[test]
    fn artinian_ring_laws(a in artinian(), b in artinian(), c in artinian()) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        if let Some(inv) = a.inv() {
            prop_assert_eq!(a.mul(&inv), Artinian::constant(2, Q::from_integer(1.into())));
        }
    }

    #[test]
    fn half_powers_multiply(x in rational(), i in -6i64..=6, j in -6i64..=6, e in -3i32..=3) {
        prop_assume!(x != Q::from_integer(0.into()));
        let a = HalfPowerValue::new(3, Laurent::from_q(x.clone()).mul(&Laurent::symbol("t", e)), i);
        let b = HalfPowerValue::p_half_power(3, j);
        let prod = a.mul(&b);
        prop_assert_eq!(prod.p_exponent(), a.p_exponent() + b.p_exponent());
        prop_assert_eq!(prod.div(&b).unwrap(), a.clone());
        prop_assert_eq!(a.mul(&a.inv().unwrap()), HalfPowerValue::one(3));
    }
}
