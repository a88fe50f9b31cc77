//! Verification suites: each suite runs the invariant checks of one module at
//! a configurable scale and returns a deterministic JSON-serialisable report.
//!
//! Every entry carries an `anchor`, a short stable name of the identity it
//! checks, so that reports from different runs can be compared line by line.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::glrep::branch::{
    eigen_check, generator_vectors, multiplicativity_check, twist_character_check, unit_check, z_check,
};
use crate::glrep::weights::pieri_character_check;
use crate::glrep::{BorelSide, BranchVector, IrrepModel, MgPoint, MhPoint, WeightData, DEFAULT_DIM_CAP};
use crate::interp;
use crate::iwahori::{self, OrbitCase};
use crate::mahler::{self, BoxFunction};
use crate::padic::rational::{format_q, ppow, q, qabs, qf};
use crate::padic::{PCharacter, Poly, Q};
use crate::tate::{self, BaseMap, NilpotentDerivation, TateElement};
use crate::uea;

/// The available suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Mahler expansions and Fourier expansions of test functions.
    Mahler,
    /// Derivation-twisted operators and analytic bounds.
    Tate,
    /// Branching vectors.
    Rep,
    /// Enveloping-algebra operators.
    Uea,
    /// Iwahori factorisation and coset combinatorics.
    Iwahori,
    /// Gauss sums, epsilon factors and the interpolation factor.
    Interp,
    /// Every suite, in the order above.
    All,
}

impl Suite {
    /// The individual suites, in report order.
    pub const EACH: [Suite; 6] = [Suite::Mahler, Suite::Tate, Suite::Rep, Suite::Uea, Suite::Iwahori, Suite::Interp];

    /// Lower-case name.
    pub fn name(self) -> &'static str {
        match self {
            Suite::Mahler => "mahler",
            Suite::Tate => "tate",
            Suite::Rep => "rep",
            Suite::Uea => "uea",
            Suite::Iwahori => "iwahori",
            Suite::Interp => "interp",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .iter()
            .chain(std::iter::once(&Suite::All))
            .find(|x| x.name() == s)
            .copied()
            .ok_or_else(|| Error::InvalidInput(format!("unknown suite '{s}'")))
    }
}

/// Scale parameters shared by all suites.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteConfig {
    /// Odd prime used by the arithmetic checks.
    pub p: u64,
    /// Half rank for the group-theoretic checks.
    pub n: usize,
    /// Depth `beta`.
    pub beta: u32,
    /// Seed for every sampled check.
    pub seed: u64,
    /// Samples per sampled check.
    pub samples: usize,
    /// Enumeration budget (number of group elements or classes).
    pub budget: u64,
    /// Dimension cap for representation models.
    pub dim_cap: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            p: 3,
            n: 2,
            beta: 1,
            seed: 0,
            samples: 20,
            budget: iwahori::DEFAULT_ENUMERATION_BUDGET,
            dim_cap: DEFAULT_DIM_CAP,
        }
    }
}

impl SuiteConfig {
    /// Validate the parameters.
    pub fn validate(&self) -> Result<()> {
        crate::padic::check_prime(self.p)?;
        if self.n < 2 {
            return Err(Error::InvalidInput("n must be at least 2".into()));
        }
        if self.beta == 0 {
            return Err(Error::InvalidInput("beta must be at least 1".into()));
        }
        if self.samples == 0 || self.budget == 0 || self.dim_cap == 0 {
            return Err(Error::InvalidInput("samples, budget and dimension cap must be positive".into()));
        }
        Ok(())
    }
}

/// One checked identity.
#[derive(Clone, Debug, Serialize)]
pub struct CheckEntry {
    /// Stable identity name.
    pub anchor: String,
    /// Whether the check passed.
    pub pass: bool,
    /// Instance data and counterexamples.
    pub detail: Value,
}

/// All checks of one suite.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    /// Suite name.
    pub suite: Suite,
    /// Entries in execution order.
    pub checks: Vec<CheckEntry>,
    /// Whether every entry passed.
    pub pass: bool,
}

/// The full output of a verification run.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    /// The configuration used.
    pub config: SuiteConfig,
    /// Per-suite reports in fixed order.
    pub suites: Vec<SuiteReport>,
    /// Whether every suite passed.
    pub pass: bool,
}

impl VerifyReport {
    /// Anchors of failing checks.
    pub fn failures(&self) -> Vec<String> {
        self.suites
            .iter()
            .flat_map(|s| s.checks.iter().filter(|c| !c.pass).map(move |c| format!("{}: {}", s.suite, c.anchor)))
            .collect()
    }
}

struct Collector {
    checks: Vec<CheckEntry>,
}

impl Collector {
    fn new() -> Self {
        Collector { checks: Vec::new() }
    }

    /// Run one check; budget errors are re-raised naming the check.
    fn check(&mut self, anchor: &str, f: impl FnOnce() -> Result<(bool, Value)>) -> Result<()> {
        let (pass, detail) = f().map_err(|e| match e {
            Error::Budget(m) => Error::Budget(format!("{anchor}: {m}")),
            other => other,
        })?;
        self.checks.push(CheckEntry { anchor: anchor.to_string(), pass, detail });
        Ok(())
    }

    fn finish(self, suite: Suite) -> SuiteReport {
        let pass = self.checks.iter().all(|c| c.pass);
        SuiteReport { suite, checks: self.checks, pass }
    }
}

/// Run a suite (or all of them).
pub fn run(suite: Suite, cfg: &SuiteConfig) -> Result<VerifyReport> {
    cfg.validate()?;
    let list: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    let suites = list.into_iter().map(|s| run_one(s, cfg)).collect::<Result<Vec<_>>>()?;
    let pass = suites.iter().all(|s| s.pass);
    Ok(VerifyReport { config: cfg.clone(), suites, pass })
}

fn run_one(suite: Suite, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut c = Collector::new();
    match suite {
        Suite::Mahler => mahler_suite(&mut c, cfg)?,
        Suite::Tate => tate_suite(&mut c, cfg)?,
        Suite::Rep => rep_suite(&mut c, cfg)?,
        Suite::Uea => uea_suite(&mut c, cfg)?,
        Suite::Iwahori => iwahori_suite(&mut c, cfg)?,
        Suite::Interp => interp_suite(&mut c, cfg)?,
        Suite::All => unreachable!("expanded by run"),
    }
    Ok(c.finish(suite))
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

fn mahler_suite(c: &mut Collector, cfg: &SuiteConfig) -> Result<()> {
    let p = cfg.p;
    c.check("Mahler coefficients reproduce the function", || {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut tables = 0;
        for _ in 0..cfg.samples.min(8) {
            let values: Vec<Q> = (0..p * p).map(|_| q(rand::Rng::gen_range(&mut rng, -9..=9))).collect();
            let f = BoxFunction::new(p, 2, values)?;
            let s = mahler::mahler_coefficients(&f, f.values.len())?;
            if (0..p * p).any(|x| s.eval(x) != f.values[x as usize]) {
                return Ok((false, json!({ "table": tables })));
            }
            tables += 1;
        }
        Ok((true, json!({ "tables": tables, "depth": 2 })))
    })?;
    c.check("Mahler product is the pointwise product", || {
        let a = mahler::series_from_ints(p, &[1, -2, 3, 0, 5]);
        let b = mahler::series_from_ints(p, &[0, 4, -1, 2]);
        let prod = mahler::mahler_product(&a, &b);
        let ok = (0..40).all(|x| prod.eval(x) == a.eval(x) * b.eval(x));
        Ok((ok, json!({ "points": 40 })))
    })?;
    c.check("Fourier expansion of the twisted character function", || {
        let mut count = 0;
        for bp in 1..=cfg.beta {
            for chi in interp::primitive_characters(p, bp)? {
                let r = mahler::fourier_expand_fchi(cfg.beta, bp, &chi)?;
                if !r.pass {
                    return Ok((false, json!({ "beta_prime": bp, "counterexample": r.counterexample })));
                }
                count += 1;
            }
        }
        Ok((true, json!({ "beta": cfg.beta, "characters": count })))
    })?;
    c.check("Fourier expansion of the unit box indicator", || {
        let mut points = 0;
        for bp in 0..=cfg.beta {
            let r = mahler::fourier_expand_unit_indicator(p, cfg.beta, bp, cfg.n)?;
            if !r.pass {
                return Ok((false, json!({ "beta_prime": bp, "counterexample": r.counterexample })));
            }
            points += r.points;
        }
        Ok((true, json!({ "n": cfg.n, "beta": cfg.beta, "points": points })))
    })?;
    Ok(())
}

fn tate_suite(c: &mut Collector, cfg: &SuiteConfig) -> Result<()> {
    let p = cfg.p;
    let lambdas = [Q::one(), q(p as i64), q((p * p) as i64)];
    let mut rings: Vec<(String, BaseMap)> = vec![("d/de on Q[e]/e^2".into(), BaseMap::d_de())];
    rings.extend(tate::derivation_family(2, 1, cfg.seed).into_iter().map(|d| ("derivation of Q[e1,e2]/(e1^2,e2^2)".into(), d)));
    c.check("closed form of f_k(T_D) agrees with direct iteration", || {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut instances = 0;
        for (name, d) in &rings {
            for lambda in &lambdas {
                let td = NilpotentDerivation { d: d.clone(), lambda: lambda.clone() };
                for a in 0..=3u32 {
                    for b in 0..=2u32 {
                        let s = tate::random_base(&mut rng, d.nvars, 4);
                        for k in 0..=5usize {
                            let closed = tate::fk_td_closed(k, &s, a, b, &td, 12)?;
                            let direct = tate::fk_td_direct(k, &TateElement::monomial(s.clone(), a, b, 12)?, &td)?;
                            if closed != direct {
                                return Ok((false, json!({ "ring": name, "lambda": format_q(lambda), "a": a, "b": b, "k": k })));
                            }
                            instances += 1;
                        }
                    }
                }
            }
        }
        Ok((true, json!({ "instances": instances })))
    })?;
    c.check("binomial operator recursion and Leibniz rule", || {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed + 1);
        let mut ok = true;
        for d in tate::derivation_family(2, 2, cfg.seed) {
            let td = NilpotentDerivation { d, lambda: q(p as i64) };
            let f = TateElement::monomial(tate::random_base(&mut rng, 2, 3), 2, 1, 12)?;
            let g = TateElement::monomial(tate::random_base(&mut rng, 2, 3), 1, 2, 12)?;
            ok &= tate::leibniz_holds(&f, &g, &td);
            for k in 0..4 {
                ok &= tate::recursion_holds(k, &f, &td)?;
            }
        }
        Ok((ok, json!({ "derivations": 2 })))
    })?;
    c.check("eventual decay of the perturbed binomial operators", || {
        let t1 = tate::nilpotent_shift(4).scale(&q(p as i64));
        let t2 = tate::cyclic_shift(4);
        let eps = qf(1, 2);
        let mut rows = Vec::new();
        let mut ok = true;
        for m in 3..=5 {
            let t = t1.add(&t2.scale(&ppow(p, m)));
            let b = tate::epsilon_action_bound(&t, p, &eps, 12, &Q::zero())?;
            ok &= b.pass;
            rows.push(json!({ "m": m, "pass": b.pass, "decay_from": b.decay_from }));
        }
        Ok((ok, json!({ "eps": "1/2", "kmax": 12, "instances": rows })))
    })?;
    c.check("overconvergence norm implication", || {
        let b = tate::overconvergence_chain_bound(p, 1, &qf(1, 2), 2 * (p * p) as u32, cfg.samples, cfg.seed)?;
        Ok((b.pass, serde_json::to_value(&b).expect("serialisable")))
    })?;
    Ok(())
}

/// A fixed list of cone weights covering one and two components, `n = 2, 3`,
/// and `j_tau0` in `{0, 1, boundary}`.
pub fn standard_branch_instances() -> Vec<WeightData> {
    let one = |k: Vec<i64>, j: i64| WeightData { n: k.len() / 2, d: 1, tau0: 0, kappa0: 0, kappa: vec![k], j: vec![j] };
    vec![
        one(vec![0, 0, 0, 0], 0),
        one(vec![1, 0, -1, -1], 0),
        one(vec![2, 1, -2, -2], 0),
        one(vec![3, 2, -2, -3], 0),
        one(vec![3, 2, -2, -3], 1),
        one(vec![4, 3, -2, -5], 0),
        one(vec![4, 3, -2, -5], 1),
        one(vec![4, 3, -2, -5], 2),
        one(vec![4, 3, -2, -5], 3),
        one(vec![5, 2, -3, -4], 1),
        WeightData { n: 2, d: 2, tau0: 0, kappa0: 1, kappa: vec![vec![3, 2, -2, -3], vec![2, 1, -1, -2]], j: vec![1, 1] },
        WeightData { n: 2, d: 2, tau0: 0, kappa0: 0, kappa: vec![vec![2, 1, -2, -2], vec![1, 0, 0, -1]], j: vec![0, 0] },
        one(vec![1, 1, 0, -1, -1, -2], 0),
    ]
}

fn rep_suite(c: &mut Collector, cfg: &SuiteConfig) -> Result<()> {
    let instances = standard_branch_instances();
    let mut vectors = Vec::new();
    c.check("multiplicity one and normalisation of the branching vector", || {
        let mut rows = Vec::new();
        let mut ok = true;
        for w in &instances {
            let bv = BranchVector::solve(w, cfg.dim_cap)?;
            let dims: Vec<usize> = bv.components.iter().map(|c| c.eigenspace_dim).collect();
            let norm = bv.x_eval(&MgPoint::identity(w.n, w.d, w.tau0), &MhPoint::open_orbit_point(w.n, w.d, w.tau0))?;
            let good = dims.iter().all(|d| *d == 1) && norm.is_one();
            ok &= good;
            rows.push(json!({ "kappa": w.kappa, "j": w.j, "eigenspace_dims": dims, "normalisation": format_q(&norm) }));
            vectors.push(bv);
        }
        Ok((ok, json!({ "instances": rows })))
    })?;
    c.check("H-eigenvector property", || sampled(&vectors, |bv, i| eigen_check(bv, cfg.samples.min(5), cfg.seed + i)))?;
    c.check("box restriction equals evaluation at z(a)", || {
        sampled(&vectors, |bv, i| z_check(bv, cfg.samples.min(5), cfg.seed + i))
    })?;
    c.check("unit values on the congruence subgroup", || {
        sampled(&vectors, |bv, i| unit_check(bv, cfg.p, cfg.beta, cfg.samples.min(10), cfg.seed + i))
    })?;
    c.check("multiplicativity over cone generators", || {
        let mut ok = true;
        let mut count = 0;
        for bv in vectors.iter().filter(|b| b.weight.n == 2) {
            let w = &bv.weight;
            let gens = generator_vectors(w.n, w.d, w.tau0, cfg.dim_cap)?;
            let r = multiplicativity_check(bv, &gens, cfg.p, cfg.beta, cfg.samples.min(5), cfg.seed)?;
            ok &= r.pass;
            count += 1;
        }
        Ok((ok, json!({ "instances": count })))
    })?;
    c.check("twisting character of the j-generator", || {
        let r = twist_character_check(2, cfg.p, cfg.beta, cfg.samples.min(10), cfg.seed, cfg.dim_cap)?;
        Ok((r.pass, serde_json::to_value(&r).expect("serialisable")))
    })?;
    c.check("Pieri decomposition matches characters", || {
        let mut ok = true;
        for (k, j) in [(vec![2, 1, 0], 1), (vec![1, 0, -1], 2), (vec![3, 1, 1, 0], 2)] {
            ok &= pieri_character_check(&k, j)?;
        }
        Ok((ok, json!({ "instances": 3 })))
    })?;
    Ok(())
}

/// Full report for one weight: cone decomposition, the normalised branching
/// vector, the normalisation value, the determinant-operator constant and
/// fixed-seed values of `delta^dagger` modulo `p^{beta+2}`.
pub fn branch_report(w: &WeightData, cfg: &SuiteConfig) -> Result<Value> {
    cfg.validate()?;
    let cone = crate::glrep::cone_decompose(w)?;
    let bv = BranchVector::solve(w, cfg.dim_cap)?;
    let norm = bv.x_eval(&MgPoint::identity(w.n, w.d, w.tau0), &MhPoint::open_orbit_point(w.n, w.d, w.tau0))?;
    let delta = uea::delta_operator(w, cfg.dim_cap)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let precision = cfg.beta + 2;
    let mut samples = Vec::new();
    for _ in 0..cfg.samples.min(10) {
        let a = crate::glrep::branch::random_box_unit(&mut rng, w.n, cfg.p);
        let i = crate::glrep::branch::random_nbar(&mut rng, w.n, w.d, w.tau0, cfg.p, cfg.beta);
        let v = bv.delta_dagger_mod(&i, &a, cfg.p, cfg.beta, precision)?;
        samples.push(json!({ "a": a.iter().map(format_q).collect::<Vec<_>>(), "value_mod": v }));
    }
    Ok(json!({
        "weight": w,
        "cone_decomposition": cone,
        "branch_vector": bv.to_json(),
        "normalisation_value": format_q(&norm),
        "delta_constant": format_q(&delta.c_proportional),
        "delta_constant_by_evaluation": format_q(&delta.c_evaluated),
        "delta_dagger_samples": { "p": cfg.p, "modulus_exponent": precision, "values": samples },
    }))
}

fn sampled(
    vectors: &[BranchVector],
    mut f: impl FnMut(&BranchVector, u64) -> Result<crate::glrep::branch::SampleCheck>,
) -> Result<(bool, Value)> {
    let mut samples = 0;
    for (i, bv) in vectors.iter().enumerate() {
        let r = f(bv, i as u64)?;
        samples += r.samples;
        if !r.pass {
            return Ok((false, json!({ "kappa": bv.weight.kappa, "j": bv.weight.j, "counterexample": r.counterexample })));
        }
    }
    Ok((true, json!({ "instances": vectors.len(), "samples": samples })))
}

fn uea_suite(c: &mut Collector, cfg: &SuiteConfig) -> Result<()> {
    c.check("nonvanishing closed form on equivariant functions", || {
        let mut rows = 0;
        for (a, b) in [(1, 1), (1, 2), (2, 2), (2, 3)] {
            for f in uea::equivariant_instances(a, b, 2, 2, cfg.dim_cap)? {
                for r in uea::nonvanishing_rows(&f)? {
                    if r.computed != r.expected {
                        return Ok((false, serde_json::to_value(&r).expect("serialisable")));
                    }
                    rows += 1;
                }
            }
        }
        Ok((true, json!({ "rows": rows })))
    })?;
    c.check("determinant operator is proportional to the branching vector", || {
        let mut rows = Vec::new();
        let mut ok = true;
        for w in standard_branch_instances().iter().filter(|w| w.j[w.tau0] >= 1 && w.n == 2) {
            let d = uea::delta_operator(w, cfg.dim_cap)?;
            let good = !d.c_proportional.is_zero()
                && d.c_proportional == d.c_evaluated
                && qabs(&(d.c_proportional.clone() * &d.proof_constant)).is_one();
            ok &= good;
            rows.push(json!({ "kappa": w.kappa, "j": w.j, "constant": format_q(&d.c_proportional) }));
        }
        Ok((ok, json!({ "instances": rows })))
    })?;
    c.check("commutator Leibniz rule", || {
        let n = cfg.n.min(3);
        let mut lambda = vec![0i64; 2 * n];
        lambda[0] = 1;
        lambda[2 * n - 1] = -1;
        let sample = IrrepModel::build(&lambda, BorelSide::Lower, cfg.dim_cap)?;
        let mut count = 0;
        for mono in monomials(n, 3) {
            for i in 2..=n {
                if !uea::commutator_leibniz_check(n, i, &mono, &sample)? {
                    return Ok((false, json!({ "n": n, "i": i })));
                }
                count += 1;
            }
        }
        Ok((true, json!({ "n": n, "instances": count })))
    })?;
    Ok(())
}

/// All monomials of degree `<= deg` in `nvars` variables.
pub fn monomials(nvars: usize, deg: u32) -> Vec<Poly> {
    let mut out = vec![Poly::constant(nvars, Q::one())];
    let mut frontier = out.clone();
    for _ in 0..deg {
        let mut next = Vec::new();
        for m in &frontier {
            for v in 0..nvars {
                let x = m.mul(&Poly::var(nvars, v));
                if !next.contains(&x) {
                    next.push(x);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn iwahori_suite(c: &mut Collector, cfg: &SuiteConfig) -> Result<()> {
    let (n, p, beta) = (cfg.n, cfg.p, cfg.beta);
    c.check("Iwahori factorisation diagonal formula", || {
        let r = iwahori::check_factor_formula(4)?;
        Ok((r.pass, serde_json::to_value(&r).expect("serialisable")))
    })?;
    c.check("index of congruence subgroups", || {
        let mut rows = Vec::new();
        let mut ok = true;
        for b in 1..=2u32 {
            let formula = iwahori::iwahori_index_exponent(1, 1, b)?;
            let count = iwahori::gl2_index_by_enumeration(p, 1, b, cfg.budget)?;
            let good = count == p.pow(formula as u32);
            ok &= good;
            rows.push(json!({ "beta": b, "exponent": formula, "enumerated": count }));
        }
        Ok((ok, json!({ "p": p, "rows": rows })))
    })?;
    c.check("double coset singleton", || {
        let r = iwahori::double_coset_check(n, p, beta, cfg.budget)?;
        Ok((r.singleton && r.witnesses_verified, serde_json::to_value(&r).expect("serialisable")))
    })?;
    c.check("conjugated subgroup intersection", || {
        let (r, members) = iwahori::intersection_check(n, p, beta, cfg.samples, cfg.seed)?;
        Ok((r.pass, json!({ "samples": r.samples, "members": members, "counterexample": r.counterexample })))
    })?;
    c.check("similitude ratio on the conjugated subgroup", || {
        let r = iwahori::nu_check(n, p, beta, cfg.samples, cfg.seed)?;
        Ok((r.pass, serde_json::to_value(&r).expect("serialisable")))
    })?;
    c.check("conjugation witness lies in the Iwahori subgroup", || match iwahori::conjugation_witness(n, p, beta) {
        Ok(k) => Ok((true, json!({ "witness": k.to_json() }))),
        Err(Error::Falsified(m)) => Ok((false, json!({ "error": m }))),
        Err(e) => Err(e),
    })?;
    c.check("torus conjugation of the unipotent element", || {
        let mut ok = true;
        for bp in 1..=beta {
            for cc in 1..p as i64 {
                ok &= iwahori::xi_c_identity(n, p, cc, bp)?;
            }
        }
        Ok((ok, json!({ "beta_max": beta })))
    })?;
    c.check("diagonal Hecke bookkeeping", || {
        let r = iwahori::hecke_bookkeeping(n, p, &[1, 2], 1, beta)?;
        Ok((r.pass(), serde_json::to_value(&r).expect("serialisable")))
    })?;
    c.check("open orbits of the stabiliser actions", || {
        let mut rows = Vec::new();
        let mut ok = true;
        for case in [OrbitCase::GammaHat, OrbitCase::GammaHatSimple, OrbitCase::UvDistinguished, OrbitCase::UvOther] {
            let r = iwahori::orbit_stabilizer(case, n)?;
            ok &= r.open;
            rows.push(serde_json::to_value(&r).expect("serialisable"));
        }
        Ok((ok, json!({ "cases": rows })))
    })?;
    Ok(())
}

fn interp_suite(c: &mut Collector, cfg: &SuiteConfig) -> Result<()> {
    let p = cfg.p;
    let (norm, level) = interp::gauss_identities(p, cfg.beta.min(2))?;
    c.check("Gauss sum norm relation", || Ok((norm.pass, serde_json::to_value(&norm).expect("serialisable"))))?;
    c.check("Gauss sum independent of the summation level", || {
        Ok((level.pass, serde_json::to_value(&level).expect("serialisable")))
    })?;
    c.check("epsilon factor reciprocity", || {
        let t = interp::epsilon_identities(p, cfg.samples, cfg.seed)?;
        Ok((t.pass, serde_json::to_value(&t).expect("serialisable")))
    })?;
    c.check("modulus character multiplicativity", || {
        let t = interp::modulus_multiplicativity(p, cfg.n, cfg.samples, cfg.seed)?;
        Ok((t.pass, serde_json::to_value(&t).expect("serialisable")))
    })?;
    c.check("epsilon-factor expressions of the interpolation factor", || {
        let grid = interp::epsilon_expression_grid(50, cfg.seed)?;
        let pass = grid.iter().all(|g| g.pass);
        let failing: Vec<&interp::GridInstance> = grid.iter().filter(|g| !g.pass).collect();
        Ok((pass, json!({ "instances": grid.len(), "failing": failing })))
    })?;
    c.check("Hecke normaliser is an e-th power", || {
        let data = interp::SatakeData::formal(p, cfg.n, 1);
        let chi = interp::LocalCharacter::new(PCharacter::quadratic(p)?, interp::Laurent::symbol("chi_p_0", 1));
        let f1 = interp::interpolation_factor(&data, std::slice::from_ref(&chi), &[1])?;
        let f2 = interp::interpolation_factor(&data, std::slice::from_ref(&chi), &[2])?;
        let sign = chi.sign() * chi.sign().pow(cfg.n as u32);
        let b = interp::HalfPowerValue::from_cyclotomic(p, interp::gauss_sum(&chi.fin, 1)?)
            .mul(&interp::HalfPowerValue::from_q(p, q(sign)));
        Ok((f2.mul(&b) == f1.mul(&f1), json!({ "exponents": [1, 2] })))
    })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_roundtrip() {
        for s in Suite::EACH.iter().chain([Suite::All].iter()) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), *s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn monomial_count() {
        assert_eq!(monomials(2, 3).len(), 10);
        assert_eq!(monomials(3, 3).len(), 20);
    }

    #[test]
    fn interp_suite_is_deterministic() {
        let cfg = SuiteConfig { samples: 5, ..SuiteConfig::default() };
        let a = serde_json::to_string(&run(Suite::Interp, &cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&run(Suite::Interp, &cfg).unwrap()).unwrap();
        assert_eq!(a, b);
        assert!(run(Suite::Interp, &cfg).unwrap().pass);
    }

    #[test]
    fn budget_errors_name_the_check() {
        let cfg = SuiteConfig { budget: 10, ..SuiteConfig::default() };
        match run(Suite::Iwahori, &cfg) {
            Err(Error::Budget(m)) => assert!(m.starts_with("index of congruence subgroups"), "{m}"),
            other => panic!("expected a budget error, got {other:?}"),
        }
    }
}
