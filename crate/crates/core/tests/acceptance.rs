//! Acceptance run: one line per criterion with its pass/fail status, the
//! measured runtime and the pinned limit. Exits non-zero if any criterion
//! fails or overruns its limit.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use pbranch_core::glrep::branch::unit_check;
use pbranch_core::glrep::{BorelSide, BranchVector, IrrepModel, MgPoint, MhPoint, DEFAULT_DIM_CAP};
use pbranch_core::interp::{self, primitive_characters};
use pbranch_core::iwahori::{self, DEFAULT_ENUMERATION_BUDGET};
use pbranch_core::padic::rational::{ppow, q, qabs, qf};
use pbranch_core::report::{monomials, standard_branch_instances};
use pbranch_core::tate::{self, BaseMap, NilpotentDerivation, TateElement};
use pbranch_core::{mahler, uea, Result, Q};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20240;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Result<(bool, String)>,
}

/// Criterion 1: closed form of `f_k(T_D)` against direct iteration.
fn closed_form() -> Result<(bool, String)> {
    const DMAX: u32 = 18;
    let p = 3u64;
    let mut rings: Vec<BaseMap> = vec![BaseMap::d_de()];
    rings.extend(tate::derivation_family(2, 1, SEED));
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut n = 0;
    for d in &rings {
        for lambda in [Q::one(), q(p as i64), q((p * p) as i64)] {
            let td = NilpotentDerivation { d: d.clone(), lambda };
            for a in 0..=5u32 {
                for b in 0..=5u32 {
                    let s = tate::random_base(&mut rng, d.nvars, 4);
                    let f = TateElement::monomial(s.clone(), a, b, DMAX)?;
                    for k in 0..=8usize {
                        if tate::fk_td_closed(k, &s, a, b, &td, DMAX)? != tate::fk_td_direct(k, &f, &td)? {
                            return Ok((false, format!("mismatch at a={a} b={b} k={k}")));
                        }
                        n += 1;
                    }
                }
            }
        }
    }
    Ok((true, format!("{n} instances, 2 rings, lambda in {{1, p, p^2}}, exact")))
}

/// Criterion 2: Iwahori factorisation diagonal formula for a <= 5.
fn factor_formula() -> Result<(bool, String)> {
    let r = iwahori::check_factor_formula(5)?;
    Ok((r.pass, format!("{} permutations, exact", r.permutations)))
}

/// Criterion 3: nonvanishing closed form against the dual-number oracle.
fn nonvanishing() -> Result<(bool, String)> {
    let mut rows = 0;
    for (a, b) in [(1, 1), (1, 2), (1, 3), (2, 2), (2, 3)] {
        for f in uea::equivariant_instances(a, b, 2, 2, DEFAULT_DIM_CAP)? {
            for r in uea::nonvanishing_rows(&f)? {
                if r.computed != r.expected {
                    return Ok((false, format!("a={a} b={b}: {r:?}")));
                }
                rows += 1;
            }
        }
    }
    Ok((rows > 0, format!("{rows} permutation rows, exact")))
}

/// Criterion 4: multiplicity one and normalisation.
fn multiplicity_one() -> Result<(bool, String)> {
    let ws = standard_branch_instances();
    let mut boundary = false;
    let mut js = std::collections::BTreeSet::new();
    for w in &ws {
        let bv = BranchVector::solve(w, DEFAULT_DIM_CAP)?;
        if bv.components.iter().any(|c| c.eigenspace_dim != 1) {
            return Ok((false, format!("eigenspace dimension != 1 at {:?}", w.kappa)));
        }
        let x = bv.x_eval(&MgPoint::identity(w.n, w.d, w.tau0), &MhPoint::open_orbit_point(w.n, w.d, w.tau0))?;
        if !x.is_one() {
            return Ok((false, format!("normalisation {x} at {:?}", w.kappa)));
        }
        let k = &w.kappa[w.tau0];
        js.insert(w.j[w.tau0].min(1));
        boundary |= w.n == 2 && w.j[w.tau0] == k[2] - k[3] && w.j[w.tau0] > 1;
    }
    let ok = ws.len() >= 10 && js.len() == 2 && boundary;
    Ok((ok, format!("{} instances, dim cap {DEFAULT_DIM_CAP}, j in {{0, 1, boundary}}", ws.len())))
}

/// Criterion 5: unit values of `delta^dagger` modulo `p^{beta+2}`.
fn unit_values() -> Result<(bool, String)> {
    let ws = standard_branch_instances();
    let picks = [&ws[4], &ws[7], &ws[10]];
    for beta in 1..=2u32 {
        for (i, w) in picks.iter().enumerate() {
            let bv = BranchVector::solve(w, DEFAULT_DIM_CAP)?;
            let r = unit_check(&bv, 3, beta, 100, SEED + i as u64)?;
            if !r.pass || r.samples != 100 {
                return Ok((false, format!("beta={beta} kappa={:?}: {:?}", w.kappa, r.counterexample)));
            }
        }
    }
    Ok((true, "p=3, beta in {1,2}, 3 weights x 100 points, residues mod p^(beta+2)".into()))
}

/// Criterion 6: determinant operator proportional to the branching vector.
fn delta_proportional() -> Result<(bool, String)> {
    let mut n = 0;
    for w in standard_branch_instances().iter().filter(|w| w.j[w.tau0] >= 1) {
        let d = uea::delta_operator(w, DEFAULT_DIM_CAP)?;
        let good = !d.c_proportional.is_zero()
            && d.c_proportional == d.c_evaluated
            && qabs(&(d.c_proportional.clone() * &d.proof_constant)).is_one();
        if !good {
            return Ok((false, format!("kappa={:?} j={:?}", w.kappa, w.j)));
        }
        n += 1;
    }
    Ok((n > 0, format!("{n} instances with j >= 1, C nonzero rational")))
}

/// Criterion 7: commutator Leibniz identity.
fn commutator_leibniz() -> Result<(bool, String)> {
    let mut count = 0;
    for n in [2usize, 3] {
        let mut lambda = vec![0i64; 2 * n];
        lambda[0] = 1;
        lambda[2 * n - 1] = -1;
        let sample = IrrepModel::build(&lambda, BorelSide::Lower, DEFAULT_DIM_CAP)?;
        for mono in monomials(n, 3) {
            for i in 2..=n {
                if !uea::commutator_leibniz_check(n, i, &mono, &sample)? {
                    return Ok((false, format!("n={n} i={i}")));
                }
                count += 1;
            }
        }
    }
    Ok((true, format!("{count} (n, i, monomial) triples, degree <= 3")))
}

/// Criterion 8: Gauss sum, epsilon factor and Fourier identities.
fn gauss_epsilon_fourier() -> Result<(bool, String)> {
    let mut n_checks: u64 = 0;
    for p in [3u64, 5] {
        let (norm, level) = interp::gauss_identities(p, 2)?;
        let eps = interp::epsilon_identities(p, 20, SEED)?;
        if !(norm.pass && level.pass && eps.pass) {
            return Ok((false, format!("p={p}: Gauss/epsilon identity failed")));
        }
        n_checks += (norm.instances + level.instances + eps.instances) as u64;
        for beta in 1..=2u32 {
            for bp in 1..=beta {
                for chi in primitive_characters(p, bp)? {
                    let r = mahler::fourier_expand_fchi(beta, bp, &chi)?;
                    if !r.pass {
                        return Ok((false, format!("f_chi p={p} beta={beta} beta'={bp}")));
                    }
                    n_checks += r.points;
                }
            }
            for n in [2usize, 3] {
                for bp in 0..=beta {
                    let r = mahler::fourier_expand_unit_indicator(p, beta, bp, n)?;
                    if !r.pass {
                        return Ok((false, format!("unit indicator p={p} beta={beta} n={n}")));
                    }
                    n_checks += r.points;
                }
            }
        }
    }
    Ok((true, format!("p in {{3,5}}, beta <= 2, n in {{2,3}}: {n_checks} exact checks")))
}

/// Criterion 9: two epsilon-factor expressions of the interpolation factor.
fn epsilon_expression_grid() -> Result<(bool, String)> {
    let grid = interp::epsilon_expression_grid(50, SEED)?;
    let failing = grid.iter().filter(|g| !g.pass).count();
    Ok((grid.len() == 50 && failing == 0, format!("{} instances, {failing} failing", grid.len())))
}

/// Criterion 10: coset combinatorics and the conjugation witness.
fn cosets() -> Result<(bool, String)> {
    for p in [2u64, 3] {
        for beta in 1..=2u32 {
            let e = iwahori::iwahori_index_exponent(1, 1, beta)?;
            if iwahori::gl2_index_by_enumeration(p, 1, beta, DEFAULT_ENUMERATION_BUDGET)? != p.pow(e as u32) {
                return Ok((false, format!("index mismatch p={p} beta={beta}")));
            }
        }
        let dc = iwahori::double_coset_check(2, p, 1, DEFAULT_ENUMERATION_BUDGET)?;
        let (inter, _) = iwahori::intersection_check(2, p, 1, 200, SEED)?;
        if !(dc.singleton && dc.witnesses_verified && inter.pass) {
            return Ok((false, format!("p={p}: singleton {} intersection {}", dc.singleton, inter.pass)));
        }
    }
    for n in [2usize, 3] {
        let k = iwahori::conjugation_witness(n, 3, 1)?;
        let r = iwahori::residue_mod_p(&k, 3)?;
        if !(0..r.len()).all(|i| r[i][i] != 0 && (0..i).all(|j| r[i][j] == 0)) {
            return Ok((false, format!("witness not in the Iwahori subgroup for n={n}")));
        }
    }
    Ok((true, "index p in {2,3}; singleton + intersection n=2, beta=1; witness n in {2,3}".into()))
}

/// Criterion 11: eventual decay and the overconvergence chain bound.
fn decay_and_chain() -> Result<(bool, String)> {
    let p = 3u64;
    let t1 = tate::nilpotent_shift(4).scale(&q(p as i64));
    let t2 = tate::cyclic_shift(4);
    for m in 3..=5 {
        let t = t1.add(&t2.scale(&ppow(p, m)));
        let b = tate::epsilon_action_bound(&t, p, &qf(1, 2), 12, &Q::zero())?;
        if !b.pass || b.decay_from.is_none() {
            return Ok((false, format!("no decay for m={m}")));
        }
    }
    let c = tate::overconvergence_chain_bound(p, 1, &qf(1, 2), 2 * (p * p) as u32, 200, SEED)?;
    Ok((c.pass && c.samples == 200, format!("m in 3..=5 decay; chain bound s={} on {} samples", c.s, c.samples)))
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { id: 1, name: "closed form vs direct iteration", limit: secs(30), run: closed_form },
        Criterion { id: 2, name: "Iwahori factorisation diagonal formula", limit: secs(10), run: factor_formula },
        Criterion { id: 3, name: "nonvanishing closed form", limit: secs(60), run: nonvanishing },
        Criterion { id: 4, name: "branching multiplicity one and normalisation", limit: secs(120), run: multiplicity_one },
        Criterion { id: 5, name: "unit values", limit: secs(30), run: unit_values },
        Criterion { id: 6, name: "determinant operator proportionality", limit: secs(120), run: delta_proportional },
        Criterion { id: 7, name: "commutator Leibniz identity", limit: secs(30), run: commutator_leibniz },
        Criterion { id: 8, name: "Gauss, epsilon and Fourier identities", limit: secs(60), run: gauss_epsilon_fourier },
        Criterion { id: 9, name: "epsilon-factor expressions agree", limit: secs(30), run: epsilon_expression_grid },
        Criterion { id: 10, name: "coset combinatorics", limit: secs(300), run: cosets },
        Criterion { id: 11, name: "perturbation and overconvergence bounds", limit: secs(120), run: decay_and_chain },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let took = start.elapsed();
        let (pass, detail) = match outcome {
            Ok((ok, d)) => (ok && took <= c.limit, d),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!(
            "criterion {:>2}: {} - {} ({:.2}s / limit {}s) - {}",
            c.id,
            if pass { "PASS" } else { "FAIL" },
            c.name,
            took.as_secs_f64(),
            c.limit.as_secs(),
            detail
        );
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
