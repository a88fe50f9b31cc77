//! Exact arithmetic: frozen values checked against hand expansions.

use pbranch_core::padic::rational::{format_q, parse_q, q, qf, reduce_mod, valuation};
use pbranch_core::{Artinian, Cyclotomic, Mat, Ring, Q};

#[test]
fn zeta3_difference_squares_to_minus_three() {
    // (z - z^2)^2 = z^2 - 2 z^3 + z^4 = z^2 - 2 + z = -3, using z + z^2 = -1.
    let z = Cyclotomic::zeta_pow(3, 1);
    let d = z.sub(&z.mul(&z));
    assert_eq!(d.mul(&d), Cyclotomic::from_q(3, q(-3)));
    assert_eq!(d.mul(&d).as_rational(), Some(q(-3)));
}

#[test]
fn cross_field_equality_lifts() {
    // zeta_3 = zeta_6^2 and zeta_4^2 = -1.
    assert_eq!(Cyclotomic::zeta_pow(3, 1), Cyclotomic::zeta_pow(6, 2));
    assert_eq!(Cyclotomic::zeta_pow(4, 2), Cyclotomic::from_q(1, q(-1)));
    assert_eq!(Cyclotomic::zeta_pow(5, 5), Cyclotomic::one(5));
}

#[test]
fn dual_number_matrix_inverse() {
    // [[1, T1], [T2, 1]]^{-1} = (1 - T1 T2)^{-1} adj = [[1 + T1T2, -T1], [-T2, 1 + T1T2]].
    let t = |i: u32| Artinian::var(2, i, Q::from_integer(1.into()));
    let one = Artinian::constant(2, q(1));
    let m = Mat::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => t(0),
        (1, 0) => t(1),
        _ => one.clone(),
    });
    let t1t2 = t(0).mul(&t(1));
    assert_eq!(m.det(), one.sub(&t1t2));
    let inv = m.inverse().unwrap();
    let expect = Mat::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => t(0).neg(),
        (1, 0) => t(1).neg(),
        _ => one.add(&t1t2),
    });
    assert_eq!(inv, expect);
    assert_eq!(m.mul(&inv), Mat::identity(2, &Artinian::constant(2, q(0))));
}

#[test]
fn rational_helpers() {
    assert_eq!(valuation(&qf(18, 5), 3), Some(2));
    assert_eq!(valuation(&qf(5, 27), 3), Some(-3));
    assert_eq!(valuation(&q(0), 3), None);
    // 1/2 = 5 mod 9
    assert_eq!(reduce_mod(&qf(1, 2), 3, 9).unwrap(), 5);
    assert!(reduce_mod(&qf(1, 3), 3, 9).is_err());
    assert_eq!(parse_q("-7/21").unwrap(), qf(-1, 3));
    assert_eq!(format_q(&qf(6, -4)), "-3/2");
    assert!(parse_q("1/0").is_err());
}

#[test]
fn non_unit_determinant_is_rejected() {
    let m = Mat::from_ints(&[vec![1, 2], vec![2, 4]]);
    assert!(m.inverse().is_err());
}
