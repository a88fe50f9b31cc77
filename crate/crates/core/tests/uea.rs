//! Enveloping-algebra operators: determinants, the branching operator and
//! the nonvanishing closed form.

use pbranch_core::glrep::{BorelSide, IrrepModel, WeightData, DEFAULT_DIM_CAP};
use pbranch_core::padic::rational::{q, qabs, qf};
use pbranch_core::uea::{
    commutator_leibniz_check, delta_operator, det_k, equivariant_instances, nonvanishing_rows, Gen, UEAElement,
};
use pbranch_core::Poly;

fn wd(kappa: Vec<i64>, j: i64) -> WeightData {
    WeightData { n: kappa.len() / 2, d: 1, tau0: 0, kappa0: 0, kappa: vec![kappa], j: vec![j] }
}

#[test]
fn minor_determinant_for_n_two() {
    assert_eq!(det_k(2, 3, 0).unwrap(), UEAElement::gen(Gen::new(0, 2, 4)));
}

#[test]
fn delta_constants() {
    // Hand computation for n = 2: S_1 is trivial, so the closed-form constant
    // is kappa_3 - kappa_4 - 0 = -2 - (-3) = 1, and C = -1 (same up to sign).
    let d = delta_operator(&wd(vec![3, 2, -2, -3], 1), DEFAULT_DIM_CAP).unwrap();
    assert_eq!(d.c_proportional, q(-1));
    assert_eq!(d.c_evaluated, q(-1));
    assert_eq!(qabs(&d.proof_constant), q(1));
    // Cone boundary j = kappa_3 - kappa_4 = 3: the product over steps is 3 * 2 * 1.
    let d = delta_operator(&wd(vec![4, 3, -2, -5], 3), DEFAULT_DIM_CAP).unwrap();
    assert_eq!(d.c_proportional, qf(-1, 6));
    assert_eq!(qabs(&d.proof_constant), q(6));
}

#[test]
fn nonvanishing_closed_form_matches_dual_numbers() {
    let mut rows = 0;
    for (a, b) in [(1, 1), (1, 2), (1, 3), (2, 2), (2, 3)] {
        for f in equivariant_instances(a, b, 2, 2, DEFAULT_DIM_CAP).unwrap() {
            for r in nonvanishing_rows(&f).unwrap() {
                assert_eq!(r.computed, r.expected, "{r:?}");
                rows += 1;
            }
        }
    }
    assert!(rows > 0);
}

#[test]
fn commutator_leibniz_examples() {
    let sample = IrrepModel::build(&[1, 0, 0, -1], BorelSide::Lower, DEFAULT_DIM_CAP).unwrap();
    let x = Poly::var(2, 0);
    let xy = x.mul(&Poly::var(2, 1));
    assert!(commutator_leibniz_check(2, 2, &x, &sample).unwrap());
    assert!(commutator_leibniz_check(2, 2, &xy, &sample).unwrap());
    assert!(commutator_leibniz_check(2, 1, &x, &sample).is_err());
}
