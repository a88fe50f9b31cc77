//! Gauss sums, epsilon factors and the interpolation factor against
//! hand-derived closed forms.

use pbranch_core::interp::{
    epsilon_expression_check, epsilon_factor, epsilon_identities, gauss_sum, interpolation_factor, modulus_delta_b,
    step3_eigen_factor, HalfPowerValue, Laurent, LocalCharacter, SatakeData,
};
use pbranch_core::iwahori::t_p;
use pbranch_core::padic::rational::{q, qf};
use pbranch_core::padic::PCharacter;
use pbranch_core::{Cyclotomic, Mat, Ring};

/// sum_{a mod m, p ∤ a} chi(a) zeta_m^a by direct summation.
fn direct_gauss(chi: &PCharacter) -> Cyclotomic {
    let m = chi.modulus();
    let mut acc = Cyclotomic::zero(m);
    for a in 1..m {
        if a % chi.p != 0 {
            acc = acc.add(&chi.value(a as i64).mul(&Cyclotomic::zeta_pow(m, a as i64)));
        }
    }
    acc
}

fn g3() -> Cyclotomic {
    let z = Cyclotomic::zeta_pow(3, 1);
    z.sub(&z.mul(&z))
}

#[test]
fn quadratic_gauss_sum_mod_three() {
    let chi = PCharacter::quadratic(3).unwrap();
    assert_eq!(direct_gauss(&chi), g3());
    assert_eq!(gauss_sum(&chi, 1).unwrap(), g3());
    assert_eq!(gauss_sum(&chi, 2).unwrap(), g3());
    assert_eq!(g3().mul(&g3()), Cyclotomic::from_q(1, q(-3)));
}

#[test]
fn quartic_gauss_norm() {
    let chi = PCharacter::from_generator(5, 1, 4, 1).unwrap();
    assert_eq!(gauss_sum(&chi, 1).unwrap(), direct_gauss(&chi));
    let n = gauss_sum(&chi, 1).unwrap().mul(&gauss_sum(&chi.inverse(), 1).unwrap());
    assert_eq!(n.as_rational(), Some(q(-5)));
}

#[test]
fn modulus_character_examples() {
    let t = t_p(2, 3, 1);
    assert_eq!(modulus_delta_b(3, 2, &[t]).unwrap(), HalfPowerValue::p_half_power(3, -20));
    let t = Mat::diag(&[q(5), q(1), q(1), q(1)]);
    assert_eq!(modulus_delta_b(5, 2, &[t]).unwrap(), HalfPowerValue::p_half_power(5, -6));
}

#[test]
fn epsilon_factor_example() {
    let eta = LocalCharacter::new(PCharacter::quadratic(3).unwrap(), Laurent::from_q(q(1)));
    let want = HalfPowerValue::new(3, Laurent::constant(g3().neg()), -1);
    assert_eq!(epsilon_factor(&eta).unwrap(), want);
    for p in [3, 5] {
        assert!(epsilon_identities(p, 10, 99).unwrap().pass);
    }
}

#[test]
fn formal_interpolation_factor() {
    // n = 2: alpha_1 = p^{3/2} t1, alpha_2 = p^2 t1 t2, alpha_3 = p^{3/2} t1, so
    // alpha_p delta_B(t_p) = p^{5-10} t1^3 t2 and
    // E = p^{-1} (p^{1/2} t2) chi(-1) chi(p)^{-1} G chi(-1)^2 p^5 t1^{-3} t2^{-1}
    //   = -G p^{9/2} t1^{-3} chi(p)^{-1}.
    let data = SatakeData::formal(3, 2, 1);
    let chi = LocalCharacter::new(PCharacter::quadratic(3).unwrap(), Laurent::symbol("chi_p_0", 1));
    let f = interpolation_factor(&data, &[chi], &[1]).unwrap();
    let coeff = Laurent::constant(g3().neg()).mul(&Laurent::symbol("theta_1_0", -3)).mul(&Laurent::symbol("chi_p_0", -1));
    assert_eq!(f, HalfPowerValue::new(3, coeff, 9));
    assert_eq!(f.p_exponent(), qf(9, 2));
}

#[test]
fn epsilon_expressions_agree() {
    let chi = LocalCharacter::new(PCharacter::quadratic(3).unwrap(), Laurent::symbol("chi_p_0", 1));
    for signs in [[1, 1], [1, -1], [-1, 1], [-1, -1]] {
        let data = SatakeData::from_values(3, 2, vec![signs.iter().map(|s| Laurent::from_q(q(*s))).collect()]).unwrap();
        assert!(epsilon_expression_check(&data, &[chi.clone()], &[1]).unwrap().pass());
    }
    let quartic = LocalCharacter::new(PCharacter::from_generator(5, 1, 4, 1).unwrap(), Laurent::from_q(q(1)));
    assert!(epsilon_expression_check(&SatakeData::formal(5, 2, 1), &[quartic.clone()], &[1]).unwrap().pass());
    // e_0 must equal the conductor exponent for the expressions to apply.
    assert!(epsilon_expression_check(&SatakeData::formal(5, 2, 1), &[quartic], &[2]).is_err());
}

#[test]
fn eigen_factor_example() {
    let a = HalfPowerValue::symbol(3, "alpha");
    let chi = LocalCharacter::new(PCharacter::quadratic(3).unwrap(), Laurent::symbol("chi_p", 1));
    let v = step3_eigen_factor(&a, &a, 1, 0, &chi).unwrap();
    let want = Laurent::constant(g3()).scale(&qf(-2, 3)).mul(&Laurent::symbol("chi_p", -1));
    assert_eq!(v, HalfPowerValue::new(3, want, 0));
    // (1 - 1/3) = 2 * 3^{-1}: the p-exponent is beta' kappa + beta' (v(a0) - v(a1)) - 1.
    assert_eq!(v.p_exponent(), q(-1));
    let a1 = HalfPowerValue::p_half_power(3, 3).mul(&a);
    let v = step3_eigen_factor(&a, &a1, 2, 1, &chi).unwrap();
    assert_eq!(v.p_exponent(), q(2) + q(2) * qf(-3, 2) - q(1));
}
