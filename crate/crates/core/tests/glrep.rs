//! Weights, Pieri expansions and branching vectors.

use pbranch_core::glrep::branch::{eigen_check, unit_check};
use pbranch_core::glrep::{cone_decompose, pieri_decompose, weyl_dimension, BranchVector, MgPoint, MhPoint, WeightData, DEFAULT_DIM_CAP};
use pbranch_core::padic::rational::q;

fn wd(kappa: Vec<i64>, j: i64) -> WeightData {
    WeightData { n: kappa.len() / 2, d: 1, tau0: 0, kappa0: 0, kappa: vec![kappa], j: vec![j] }
}

fn sorted(mut v: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    v.sort();
    v
}

#[test]
fn pieri_examples() {
    // Characters: s_(2,0) * (x1^-1 + x2^-1) = s_(1,0) + s_(2,-1) by direct expansion.
    assert_eq!(sorted(pieri_decompose(&[2, 0], 1).unwrap()), vec![vec![1, 0], vec![2, -1]]);
    assert_eq!(sorted(pieri_decompose(&[1, 1, 0], 1).unwrap()), vec![vec![1, 0, 0], vec![1, 1, -1]]);
}

#[test]
fn weyl_dimension_examples() {
    // Sym^3 of the dual standard twisted: dim Sym^3(C^3) = 10.
    assert_eq!(weyl_dimension(&[1, -2, -2]), 10);
    assert_eq!(weyl_dimension(&[0, 0, 0, 0]), 1);
    // Adjoint of GL_4: 15.
    assert_eq!(weyl_dimension(&[1, 0, 0, -1]), 15);
}

#[test]
fn cone_violations_name_the_condition() {
    let err = BranchVector::solve(&wd(vec![2, 0, -1, -2], 1), DEFAULT_DIM_CAP).unwrap_err();
    assert!(err.to_string().contains("exceeds w"), "{err}");
    let err = BranchVector::solve(&wd(vec![3, 2, -2, -3], 2), DEFAULT_DIM_CAP).unwrap_err();
    assert!(err.to_string().contains("j_tau0"), "{err}");
}

#[test]
fn multiplicity_one_and_normalisation() {
    for (k, j) in [(vec![2, 1, -2, -2], 0), (vec![3, 2, -2, -3], 1)] {
        let w = wd(k, j);
        assert!(cone_decompose(&w).unwrap().signs_ok(0));
        let bv = BranchVector::solve(&w, DEFAULT_DIM_CAP).unwrap();
        assert_eq!(bv.components[0].eigenspace_dim, 1);
        let x = bv.x_eval(&MgPoint::identity(2, 1, 0), &MhPoint::open_orbit_point(2, 1, 0)).unwrap();
        assert_eq!(x, q(1));
        // Re-apply the group action at random points.
        assert!(eigen_check(&bv, 6, 17).unwrap().pass);
    }
}

#[test]
fn unit_values_mod_three() {
    let bv = BranchVector::solve(&wd(vec![3, 2, -2, -3], 1), DEFAULT_DIM_CAP).unwrap();
    let r = unit_check(&bv, 3, 1, 20, 23).unwrap();
    assert!(r.pass, "{r:?}");
}
