//! Derivation-twisted binomial operators and analytic bounds.

use pbranch_core::padic::rational::{q, qf};
use pbranch_core::tate::{
    self, epsilon_action_bound, f_i_eval, fk_td_closed, fk_td_direct, overconvergence_chain_bound, BaseMap,
    NilpotentDerivation, SubsetPattern, TateElement,
};
use pbranch_core::{Artinian, Mat, Ring, Q};

fn eps() -> Artinian<Q> {
    Artinian::var(1, 0, q(1))
}

fn c(x: Q) -> Artinian<Q> {
    Artinian::constant(1, x)
}

#[test]
fn subset_product_example() {
    let pat = SubsetPattern::new(3, vec![0, 2]).unwrap();
    assert_eq!(f_i_eval(&pat, &q(5)), q(15));
}

#[test]
fn second_binomial_operator_on_eps_x() {
    // By hand: T(eX) = X + l e Y, T^2(eX) = 2 l Y, so f_2 = (T^2 - T)/2 gives
    // -X/2 + l Y - (l/2) e Y.
    let lambda = q(3);
    let td = NilpotentDerivation { d: BaseMap::d_de(), lambda: lambda.clone() };
    let mono = |s: Artinian<Q>, a, b| TateElement::monomial(s, a, b, 12).unwrap();
    let expect = mono(c(qf(-1, 2)), 1, 0).add(&mono(c(lambda.clone()).add(&eps().scale(&(-lambda.clone() / q(2)))), 0, 1));
    let closed = fk_td_closed(2, &eps(), 1, 0, &td, 12).unwrap();
    let direct = fk_td_direct(2, &TateElement::monomial(eps(), 1, 0, 12).unwrap(), &td).unwrap();
    assert_eq!(closed, expect);
    assert_eq!(direct, expect);
}

#[test]
fn zero_derivation_truncates() {
    // D = 0, a = 1: T is nilpotent of order 2 on {X, Y}, so
    // f_k(T) = binom'(0, k) T = (-1)^{k-1}/k * T and f_k(T)(sX) = (-1)^{k-1} l s Y / k.
    let lambda = q(2);
    let td = NilpotentDerivation { d: BaseMap::zero(1), lambda: lambda.clone() };
    let s = c(q(1)).add(&eps());
    for k in 1..=6usize {
        let sign = if k % 2 == 1 { q(1) } else { q(-1) };
        let expect = TateElement::monomial(s.scale(&(sign * &lambda / q(k as i64))), 0, 1, 12).unwrap();
        assert_eq!(fk_td_closed(k, &s, 1, 0, &td, 12).unwrap(), expect, "k = {k}");
    }
}

#[test]
fn closed_form_degree_window() {
    let td = NilpotentDerivation { d: BaseMap::d_de(), lambda: q(1) };
    assert!(fk_td_closed(3, &eps(), 5, 5, &td, 12).is_err());
}

#[test]
fn perturbed_shift_weights() {
    // 3 N + 27 S on a rank-4 lattice, eps = 1/2, K = 12.
    let t = tate::nilpotent_shift(4).scale(&q(3)).add(&tate::cyclic_shift(4).scale(&q(27)));
    let b = epsilon_action_bound(&t, 3, &qf(1, 2), 12, &Q::from_integer(0.into())).unwrap();
    let frozen = ["0", "-3/2", "-2", "-3/2", "-3", "-7/2", "-3", "-9/2", "-5", "-7/2", "-5", "-11/2", "-5"];
    assert_eq!(b.weighted, frozen);
    assert!(b.pass);
    // The unit shift alone has bounded, non-decaying weights at eps = 0.
    let s = epsilon_action_bound(&tate::cyclic_shift(4), 3, &Q::from_integer(0.into()), 12, &q(1)).unwrap();
    assert!(!s.pass);
    let m = Mat::identity(3, &Q::from_integer(0.into()));
    assert!(epsilon_action_bound(&m, 3, &qf(-1, 2), 4, &q(0)).is_err());
}

#[test]
fn chain_bound_example() {
    let b = overconvergence_chain_bound(3, 1, &qf(1, 2), 20, 200, 5).unwrap();
    assert_eq!((b.annihilator, b.s), (9, 2));
    assert!(b.pass);
    assert!(overconvergence_chain_bound(3, 1, &q(1), 20, 10, 5).is_err());
}
