//! Iwahori factorisation, coset combinatorics and matrix identities.

use pbranch_core::iwahori::{
    conjugation_witness, double_coset_check, gl2_index_by_enumeration, intersection_check, iwahori_factor,
    iwahori_index_exponent, orbit_stabilizer, residue_mod_p, x_sigma, OrbitCase, DEFAULT_ENUMERATION_BUDGET,
};
use pbranch_core::padic::rational::q;
use pbranch_core::{Artinian, Error, Mat, Ring, Q};

#[test]
fn two_by_two_elimination() {
    // X = [[1, t1], [t2, 1]] = [[1 - t1 t2, t1], [0, 1]] [[1, 0], [t2, 1]].
    let x = x_sigma(&[1, 0]);
    let f = iwahori_factor(&x).unwrap();
    let t = |i: u32| Artinian::var(2, i, q(1));
    let one = Artinian::constant(2, q(1));
    let zero = Artinian::constant(2, q(0));
    let plus = Mat::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => one.sub(&t(0).mul(&t(1))),
        (0, 1) => t(0),
        (1, 0) => zero.clone(),
        _ => one.clone(),
    });
    let minus = Mat::from_fn(2, 2, |i, j| match (i, j) {
        (1, 0) => t(1),
        (0, 1) => zero.clone(),
        _ => one.clone(),
    });
    assert_eq!(f.plus, plus);
    assert_eq!(f.minus, minus);
    assert_eq!(f.plus.mul(&f.minus), x);
}

#[test]
fn congruence_index() {
    // For GL_2 the depth-2 subgroup has index p in the depth-1 subgroup: only
    // the lower-left entry is constrained one more p-adic digit.
    assert_eq!(iwahori_index_exponent(1, 1, 2).unwrap(), 1);
    assert_eq!(gl2_index_by_enumeration(3, 1, 2, DEFAULT_ENUMERATION_BUDGET).unwrap(), 3);
    assert_eq!(iwahori_index_exponent(2, 1, 3).unwrap(), 12);
    assert!(matches!(gl2_index_by_enumeration(3, 1, 2, 100), Err(Error::Budget(_))));
}

#[test]
fn double_coset_singletons() {
    let r = double_coset_check(2, 2, 1, DEFAULT_ENUMERATION_BUDGET).unwrap();
    assert_eq!(r.representatives, 64);
    assert!(r.singleton && r.witnesses_verified);
    let r = double_coset_check(2, 3, 1, DEFAULT_ENUMERATION_BUDGET).unwrap();
    assert_eq!(r.representatives, 729);
    assert!(r.singleton && r.witnesses_verified);
}

#[test]
fn intersection_membership() {
    let (r, members) = intersection_check(2, 3, 1, 200, 31).unwrap();
    assert!(r.pass, "{r:?}");
    assert_eq!(r.samples, 200);
    assert!(members > 0);
}

#[test]
fn open_orbits() {
    let g = orbit_stabilizer(OrbitCase::GammaHat, 2).unwrap();
    assert!(g.open);
    let other = orbit_stabilizer(OrbitCase::UvOther, 2).unwrap();
    assert!(other.open);
    assert_eq!(other.acting_dim + other.right_dim - other.stabilizer_dim, other.ambient_dim);
    let dist = orbit_stabilizer(OrbitCase::UvDistinguished, 2).unwrap();
    assert_eq!(dist.stabilizer_dim, 2);
}

/// Residue mod p is upper triangular with nonzero diagonal.
fn residue_is_iwahori(k: &Mat<Q>, p: u64) -> bool {
    let r = residue_mod_p(k, p).unwrap();
    (0..r.len()).all(|i| r[i][i] != 0 && (0..i).all(|j| r[i][j] == 0))
}

#[test]
fn conjugation_witness_in_iwahori() {
    for (n, beta) in [(2, 1), (2, 3), (3, 1)] {
        let k = conjugation_witness(n, 3, beta).unwrap();
        assert!(residue_is_iwahori(&k, 3), "n = {n}, beta = {beta}");
        assert!(k.det().is_unit());
    }
}
