//! Timing of the main exact-arithmetic kernels.

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use pbranch_core::glrep::{BranchVector, WeightData, DEFAULT_DIM_CAP};
use pbranch_core::interp::{self, LocalCharacter, SatakeData};
use pbranch_core::iwahori;
use pbranch_core::padic::rational::q;
use pbranch_core::padic::PCharacter;
use pbranch_core::tate::{self, BaseMap, NilpotentDerivation, TateElement};
use pbranch_core::{Artinian, Ring, Q};

fn tate_kernels(c: &mut Criterion) {
    let td = NilpotentDerivation { d: BaseMap::d_de(), lambda: q(3) };
    let s = Artinian::constant(1, q(1)).add(&Artinian::var(1, 0, q(1)));
    c.bench_function("fk_td_closed k=8 a=5 b=5", |b| {
        b.iter(|| tate::fk_td_closed(black_box(8), &s, 5, 5, &td, 18).unwrap())
    });
    let f = TateElement::monomial(s.clone(), 5, 5, 18).unwrap();
    c.bench_function("fk_td_direct k=8 a=5 b=5", |b| b.iter(|| tate::fk_td_direct(black_box(8), &f, &td).unwrap()));
}

fn branch_kernels(c: &mut Criterion) {
    let w = WeightData { n: 2, d: 1, tau0: 0, kappa0: 0, kappa: vec![vec![4, 3, -2, -5]], j: vec![2] };
    c.bench_function("branch vector (4,3,-2,-5), j=2", |b| {
        b.iter(|| BranchVector::solve(black_box(&w), DEFAULT_DIM_CAP).unwrap())
    });
}

fn iwahori_kernels(c: &mut Criterion) {
    c.bench_function("factor formula a<=5", |b| b.iter(|| iwahori::check_factor_formula(black_box(5)).unwrap()));
    c.bench_function("double coset n=2 p=3", |b| {
        b.iter(|| iwahori::double_coset_check(2, black_box(3), 1, iwahori::DEFAULT_ENUMERATION_BUDGET).unwrap())
    });
}

fn interp_kernels(c: &mut Criterion) {
    let chi = PCharacter::from_generator(7, 2, 42, 1).unwrap();
    c.bench_function("gauss sum conductor 49", |b| b.iter(|| interp::gauss_sum(black_box(&chi), 2).unwrap()));
    let data = SatakeData::formal(5, 3, 2);
    let chars = vec![
        LocalCharacter::new(PCharacter::from_generator(5, 1, 4, 1).unwrap(), interp::Laurent::symbol("chi_p_0", 1)),
        LocalCharacter::new(PCharacter::trivial(5, 0), interp::Laurent::from_q(Q::from_integer(1.into()))),
    ];
    c.bench_function("epsilon-factor expressions n=3 d=2", |b| {
        b.iter(|| interp::epsilon_expression_check(black_box(&data), &chars, &[1, 1]).unwrap())
    });
}

criterion_group!(benches, tate_kernels, branch_kernels, iwahori_kernels, interp_kernels);
criterion_main!(benches);
