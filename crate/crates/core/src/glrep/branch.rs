//! Branching vectors: the unique eigenline of the Levi of the smaller group
//! inside `V_kappa (x) S_{-j}`, its normalisation at the open-orbit point, and
//! the evaluations derived from it.
//!
//! Conventions at the distinguished component: the Levi of the larger group
//! is `GL_1 x GL_{2n-1}` (indices `1` and `2..2n`), the smaller Levi is
//! `GL_1 x GL_{n-1} x GL_n` (indices `1`, `2..n`, `n+1..2n`). Inside the
//! `GL_{2n-1}` core, local index `0..2n-2` corresponds to global `2..2n`.
//! `S_{-j}` is realised on `h -> h_1^{-j} prod_k (h_3)_{k,1}^{J_k}` with
//! `|J| = j`.

use std::collections::BTreeMap;
use std::ops::Range;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::model::{BorelSide, IrrepModel};
use super::weights::{cone_decompose, w_max, Generator, WeightData};
use crate::error::{Error, Result};
use crate::padic::linalg::nullspace;
use crate::padic::rational::{format_q, qpow, valuation};
use crate::padic::{Mat, PCharacter, Q};

/// One term `coeff * f_index (x) e_J` of an eigenvector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Term {
    /// Basis index in the model.
    pub index: usize,
    /// Exponent vector `J` of the `S_{-j}` monomial (empty without `S`).
    pub s_exp: Vec<u8>,
    /// Coefficient.
    #[serde(with = "crate::padic::rational::qstr")]
    pub coeff: Q,
}

/// Block structure and target characters of an eigen problem.
#[derive(Clone, Debug)]
pub struct EigenSpec {
    /// Diagonal blocks (must partition `0..m`).
    pub blocks: Vec<Range<usize>>,
    /// Required `E_aa` eigenvalue on each block (on the full tensor product).
    pub targets: Vec<i64>,
    /// Block carrying the `S_{-j}` factor, if any.
    pub s_block: Option<usize>,
    /// Degree `j` of the `S_{-j}` factor.
    pub j: u32,
}

/// Basis of the space of vectors in `model (x) S` on which each block acts
/// by `det^{target}` (weights fixed, adjacent root operators annihilate).
pub fn eigen_solve(model: &IrrepModel, spec: &EigenSpec) -> Result<Vec<Vec<Term>>> {
    let m = model.m;
    let mut covered = vec![false; m];
    for r in &spec.blocks {
        for a in r.clone() {
            if a >= m || covered[a] {
                return Err(Error::InvalidInput("blocks must partition the index range".into()));
            }
            covered[a] = true;
        }
    }
    if covered.iter().any(|c| !c) || spec.blocks.len() != spec.targets.len() {
        return Err(Error::InvalidInput("blocks must partition the index range".into()));
    }
    let s_range = spec.s_block.map(|b| spec.blocks[b].clone());
    let mut unknowns: Vec<(usize, Vec<u8>)> = Vec::new();
    'outer: for (l, w) in model.weights.iter().enumerate() {
        let mut jexp = Vec::new();
        for (bi, r) in spec.blocks.iter().enumerate() {
            for a in r.clone() {
                let diff = w[a] - spec.targets[bi];
                if Some(bi) == spec.s_block {
                    if diff < 0 || diff > 255 {
                        continue 'outer;
                    }
                    jexp.push(diff as u8);
                } else if diff != 0 {
                    continue 'outer;
                }
            }
        }
        if spec.s_block.is_some() && jexp.iter().map(|x| *x as u32).sum::<u32>() != spec.j {
            continue;
        }
        unknowns.push((l, jexp));
    }
    let nu = unknowns.len();
    let mut eqs: BTreeMap<(usize, Vec<u8>), Vec<Q>> = BTreeMap::new();
    for (bi, r) in spec.blocks.iter().enumerate() {
        for a in r.start..r.end.saturating_sub(1) {
            for (x, y) in [(a, a + 1), (a + 1, a)] {
                for (ui, (l, jexp)) in unknowns.iter().enumerate() {
                    for (l2, c) in model.act_coords(x, y, *l)? {
                        eqs.entry((l2, jexp.clone())).or_insert_with(|| vec![Q::zero(); nu])[ui] += c;
                    }
                    if Some(bi) == spec.s_block {
                        let s0 = s_range.as_ref().expect("s block").start;
                        let (kx, ky) = (x - s0, y - s0);
                        if jexp[kx] > 0 {
                            let mut j2 = jexp.clone();
                            j2[kx] -= 1;
                            j2[ky] += 1;
                            eqs.entry((*l, j2)).or_insert_with(|| vec![Q::zero(); nu])[ui] -=
                                Q::from_integer((jexp[kx] as i64).into());
                        }
                    }
                }
            }
        }
    }
    let rows: Vec<Vec<Q>> = eqs.into_values().collect();
    let ns = nullspace(&rows, nu);
    Ok(ns
        .into_iter()
        .map(|v| {
            v.into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| Term { index: unknowns[i].0, s_exp: unknowns[i].1.clone(), coeff: c })
                .collect()
        })
        .collect())
}

/// The normalised eigenvector on one component.
#[derive(Clone, Debug)]
pub struct ComponentVector {
    /// Component index.
    pub tau: usize,
    /// Function model of the component representation.
    pub model: IrrepModel,
    /// Start of the `S` block in local indices (distinguished component only).
    pub s_start: Option<usize>,
    /// Degree of the `S` factor.
    pub j: u32,
    /// Normalised terms.
    pub terms: Vec<Term>,
    /// The open-orbit element `u` on this component.
    pub u: Mat<Q>,
    /// Dimension of the solved eigenspace (1 when multiplicity one holds).
    pub eigenspace_dim: usize,
}

impl ComponentVector {
    /// Evaluate `sum c f_l(g) prod s_col^J`.
    pub fn eval(&self, g: &Mat<Q>, s_col: &[Q]) -> Result<Q> {
        let idx: Vec<usize> = self.terms.iter().map(|t| t.index).collect();
        let vals = self.model.eval_selected(g, &idx)?;
        let mut acc = Q::zero();
        for (t, v) in self.terms.iter().zip(vals) {
            let mut mono = t.coeff.clone() * v;
            for (k, e) in t.s_exp.iter().enumerate() {
                if *e > 0 {
                    mono *= qpow(&s_col[k], *e as i64);
                }
            }
            acc += mono;
        }
        Ok(acc)
    }
}

/// The open-orbit element on the `GL_{2n-1}` core: `[[I, 0], [u'^t, I]]`
/// with `u'_{ij} = delta_{n+1-i, j}`.
pub fn core_u(n: usize) -> Mat<Q> {
    let m = 2 * n - 1;
    let mut u = Mat::identity(m, &Q::zero());
    for c in 0..n - 1 {
        u.set(2 * n - 2 - c, c, Q::one());
    }
    u
}

/// The open-orbit element on a non-distinguished component: `[[1, 0], [w^max, 1]]`.
pub fn other_u(n: usize) -> Mat<Q> {
    let z = Mat::zeros(n, n, &Q::zero());
    let i = Mat::identity(n, &Q::zero());
    Mat::blocks(&i, &z, &w_max(n), &i)
}

/// A point of the Levi of the larger group: similitude, the `GL_1` factor
/// at the distinguished component, and one matrix per component (the
/// `GL_{2n-1}` core at the distinguished one).
#[derive(Clone, Debug, PartialEq)]
pub struct MgPoint {
    /// Similitude factor.
    pub x: Q,
    /// `GL_1` factor at the distinguished component.
    pub g1: Q,
    /// Component matrices.
    pub comps: Vec<Mat<Q>>,
}

/// A point of the Levi of the smaller group.
#[derive(Clone, Debug, PartialEq)]
pub struct MhPoint {
    /// Similitude factor.
    pub x: Q,
    /// `GL_1` factor `y_1`.
    pub y1: Q,
    /// Diagonal blocks per component: `(y_2, y_3)` at the distinguished one,
    /// `(z_1, z_2)` elsewhere.
    pub blocks: Vec<(Mat<Q>, Mat<Q>)>,
}

impl MgPoint {
    /// The identity.
    pub fn identity(n: usize, d: usize, tau0: usize) -> Self {
        let comps = (0..d).map(|t| Mat::identity(if t == tau0 { 2 * n - 1 } else { 2 * n }, &Q::zero())).collect();
        MgPoint { x: Q::one(), g1: Q::one(), comps }
    }

    /// Product.
    pub fn mul(&self, o: &Self) -> Self {
        MgPoint {
            x: &self.x * &o.x,
            g1: &self.g1 * &o.g1,
            comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.mul(b)).collect(),
        }
    }

    /// Inverse.
    pub fn inverse(&self) -> Result<Self> {
        if self.x.is_zero() || self.g1.is_zero() {
            return Err(Error::NotUnit("singular Levi element".into()));
        }
        Ok(MgPoint {
            x: self.x.recip(),
            g1: self.g1.recip(),
            comps: self.comps.iter().map(|c| c.inverse()).collect::<Result<_>>()?,
        })
    }
}

impl MhPoint {
    /// Image in the larger Levi (block-diagonal embedding).
    pub fn to_mg(&self) -> MgPoint {
        MgPoint {
            x: self.x.clone(),
            g1: self.y1.clone(),
            comps: self.blocks.iter().map(|(a, b)| Mat::block_diag(a, b)).collect(),
        }
    }

    /// Inverse.
    pub fn inverse(&self) -> Result<Self> {
        if self.x.is_zero() || self.y1.is_zero() {
            return Err(Error::NotUnit("singular Levi element".into()));
        }
        Ok(MhPoint {
            x: self.x.recip(),
            y1: self.y1.recip(),
            blocks: self.blocks.iter().map(|(a, b)| Ok((a.inverse()?, b.inverse()?))).collect::<Result<_>>()?,
        })
    }

    /// The point `v` of the open orbit: identity except `y_3 = [[1, 0], [y, 1]]`
    /// with `y` the all-ones column.
    pub fn open_orbit_point(n: usize, d: usize, tau0: usize) -> Self {
        let mut p = MhPoint::identity(n, d, tau0);
        for k in 1..n {
            p.blocks[tau0].1.set(k, 0, Q::one());
        }
        p
    }

    /// The identity.
    pub fn identity(n: usize, d: usize, tau0: usize) -> Self {
        let blocks = (0..d)
            .map(|t| {
                let a = if t == tau0 { n - 1 } else { n };
                (Mat::identity(a, &Q::zero()), Mat::identity(n, &Q::zero()))
            })
            .collect();
        MhPoint { x: Q::one(), y1: Q::one(), blocks }
    }
}

/// The branching vector of a cone weight: one normalised eigenvector per component.
#[derive(Clone, Debug)]
pub struct BranchVector {
    /// The weight.
    pub weight: WeightData,
    /// Per-component eigenvectors.
    pub components: Vec<ComponentVector>,
}

impl BranchVector {
    /// Solve the eigen problem, assert multiplicity one and normalise at the
    /// open-orbit point.
    pub fn solve(w: &WeightData, cap: u64) -> Result<Self> {
        w.check_cone()?;
        let n = w.n;
        let t0 = w.tau0;
        let mut components = Vec::new();
        for t in 0..w.d {
            let (model, spec, u, s_start) = if t == t0 {
                let lam: Vec<i64> = w.kappa[t0][1..].to_vec();
                let model = IrrepModel::build(&lam, BorelSide::Upper, cap)?;
                let k = w.k(t0, n + 1);
                let j = w.j[t0];
                let spec = EigenSpec {
                    blocks: vec![0..n - 1, n - 1..2 * n - 1],
                    targets: vec![-k + j + w.w(), k - j],
                    s_block: Some(1),
                    j: j as u32,
                };
                (model, spec, core_u(n), Some(n - 1))
            } else {
                let model = IrrepModel::build(&w.kappa[t], BorelSide::Upper, cap)?;
                let spec = EigenSpec {
                    blocks: vec![0..n, n..2 * n],
                    targets: vec![w.j[t], -w.j[t]],
                    s_block: None,
                    j: 0,
                };
                (model, spec, other_u(n), None)
            };
            let sols = eigen_solve(&model, &spec)?;
            if sols.len() != 1 {
                return Err(Error::Falsified(format!(
                    "eigenspace on component {t} has dimension {} (expected 1)",
                    sols.len()
                )));
            }
            let mut comp = ComponentVector {
                tau: t,
                model,
                s_start,
                j: spec.j,
                terms: sols.into_iter().next().expect("one solution"),
                u: u.clone(),
                eigenspace_dim: 1,
            };
            let ones = vec![Q::one(); if t == t0 { n } else { 0 }];
            let val = comp.eval(&u, &ones)?;
            if val.is_zero() {
                return Err(Error::Falsified(format!("branching vector vanishes at the open-orbit point (component {t})")));
            }
            let inv = val.recip();
            for term in comp.terms.iter_mut() {
                term.coeff *= &inv;
            }
            components.push(comp);
        }
        Ok(BranchVector { weight: w.clone(), components })
    }

    /// `v(g, h)`.
    pub fn v_eval(&self, g: &MgPoint, h: &MhPoint) -> Result<Q> {
        let w = &self.weight;
        let t0 = w.tau0;
        let mut acc = qpow(&g.x, -w.kappa0) * qpow(&g.g1, -w.k(t0, 1)) * qpow(&h.y1, -w.j[t0]);
        for comp in &self.components {
            let col: Vec<Q> = if comp.tau == t0 {
                let y3 = &h.blocks[t0].1;
                (0..w.n).map(|k| y3.at(k, 0).clone()).collect()
            } else {
                vec![]
            };
            acc *= comp.eval(&g.comps[comp.tau], &col)?;
        }
        Ok(acc)
    }

    /// The open-orbit element `u` as a Levi point.
    pub fn u_point(&self) -> MgPoint {
        MgPoint { x: Q::one(), g1: Q::one(), comps: self.components.iter().map(|c| c.u.clone()).collect() }
    }

    /// `x(g, h) = v(u g, h)`.
    pub fn x_eval(&self, g: &MgPoint, h: &MhPoint) -> Result<Q> {
        self.v_eval(&self.u_point().mul(g), h)
    }

    /// The eigencharacter `sigma(m)`.
    pub fn sigma(&self, m: &MhPoint) -> Q {
        let w = &self.weight;
        let t0 = w.tau0;
        let (k, j) = (w.k(t0, w.n + 1), w.j[t0]);
        let mut acc = qpow(&m.x, -w.kappa0)
            * qpow(&m.y1, -w.k(t0, 1) - j)
            * qpow(&m.blocks[t0].0.det(), k - j - w.w())
            * qpow(&m.blocks[t0].1.det(), -k + j);
        for t in (0..w.d).filter(|t| *t != t0) {
            acc *= qpow(&m.blocks[t].0.det(), -w.j[t]) * qpow(&m.blocks[t].1.det(), w.j[t]);
        }
        acc
    }

    /// `delta^dagger(i, a)` with `a = (a_2, ..., a_{2n})`.
    pub fn delta_dagger(&self, i: &MgPoint, a: &[Q]) -> Result<Q> {
        let w = &self.weight;
        let n = w.n;
        if a.len() != 2 * n - 1 {
            return Err(Error::InvalidInput(format!("box point must have {} coordinates", 2 * n - 1)));
        }
        let t0 = w.tau0;
        let mut acc = qpow(&i.x, -w.kappa0) * qpow(&i.g1, -w.k(t0, 1));
        for comp in &self.components {
            let g = comp.u.mul(&i.comps[comp.tau]);
            let col: Vec<Q> = if comp.tau == t0 { box_column(n, a) } else { vec![] };
            acc *= comp.eval(&g, &col)?;
        }
        Ok(acc)
    }

    /// `delta^dagger(i, a)` reduced modulo `p^precision`; requires two guard
    /// digits over the depth `beta`.
    pub fn delta_dagger_mod(&self, i: &MgPoint, a: &[Q], p: u64, beta: u32, precision: u32) -> Result<u64> {
        if precision < beta + 2 {
            return Err(Error::Precision(format!("precision {precision} < beta + 2 = {}", beta + 2)));
        }
        let v = self.delta_dagger(i, a)?;
        let modulus = p.checked_pow(precision).ok_or_else(|| Error::Precision("modulus overflows".into()))?;
        crate::padic::rational::reduce_mod(&v, p, modulus)
    }

    /// Serialise with basis labels (pivot monomials) for reproducibility.
    pub fn to_json(&self) -> Value {
        let comps: Vec<Value> = self
            .components
            .iter()
            .map(|c| {
                let terms: Vec<Value> = c
                    .terms
                    .iter()
                    .map(|t| {
                        json!({
                            "basis": t.index,
                            "label": c.model.pivots[t.index].iter().map(|x| *x as u32).collect::<Vec<_>>(),
                            "s_exp": t.s_exp,
                            "coeff": format_q(&t.coeff),
                        })
                    })
                    .collect();
                json!({
                    "tau": c.tau,
                    "highest_weight": c.model.lambda,
                    "model_dim": c.model.dim(),
                    "eigenspace_dim": c.eigenspace_dim,
                    "terms": terms,
                })
            })
            .collect();
        json!({ "weight": self.weight, "components": comps })
    }
}

/// The first column of `y_3` produced by the box point: `(a_{n+1}, a_n + a_{n+2}, ..., a_2 + a_{2n})`.
pub fn box_column(n: usize, a: &[Q]) -> Vec<Q> {
    // a[k - 2] holds a_k.
    let mut col = vec![a[n - 1].clone()];
    for k in 1..n {
        col.push(&a[n - 1 - k] + &a[n - 1 + k]);
    }
    col
}

/// The element `z(a)` of the smaller Levi with `y_3 = [[a_{n+1}, 0], [c, 1]]`.
pub fn z_point(w: &WeightData, a: &[Q]) -> MhPoint {
    let mut h = MhPoint::identity(w.n, w.d, w.tau0);
    let col = box_column(w.n, a);
    for (k, c) in col.into_iter().enumerate() {
        h.blocks[w.tau0].1.set(k, 0, c);
    }
    h
}

/// Random integer in `[-b, b]` as a rational.
fn rint(rng: &mut impl Rng, b: i64) -> Q {
    Q::from_integer(rng.gen_range(-b..=b).into())
}

/// A random element of the Levi of the smaller group with integer entries and
/// unit determinants (products of elementary and signed permutation-free
/// diagonal matrices).
pub fn random_mh(rng: &mut impl Rng, n: usize, d: usize, tau0: usize) -> MhPoint {
    let unimod = |rng: &mut ChaCha8Rng, k: usize| -> Mat<Q> {
        let mut m = Mat::identity(k, &Q::zero());
        for _ in 0..2 * k {
            if k < 2 {
                break;
            }
            let a = rng.gen_range(0..k);
            let b = (a + rng.gen_range(1..k)) % k;
            let c = rint(rng, 2);
            let e = Mat::from_fn(k, k, |r, s| {
                if r == s {
                    Q::one()
                } else if r == a && s == b {
                    c.clone()
                } else {
                    Q::zero()
                }
            });
            m = m.mul(&e);
        }
        let diag: Vec<Q> = (0..k).map(|_| Q::from_integer([1i64, -1, 2][rng.gen_range(0..3)].into())).collect();
        m.mul(&Mat::diag(&diag))
    };
    let mut r = ChaCha8Rng::seed_from_u64(rng.gen());
    let blocks = (0..d)
        .map(|t| {
            let a = if t == tau0 { n - 1 } else { n };
            (unimod(&mut r, a), unimod(&mut r, n))
        })
        .collect();
    MhPoint { x: Q::from_integer([1i64, -1, 2][r.gen_range(0..3)].into()), y1: Q::from_integer([1i64, -1, 3][r.gen_range(0..3)].into()), blocks }
}

/// A random invertible element of the larger Levi (integer entries).
pub fn random_mg(rng: &mut impl Rng, n: usize, d: usize, tau0: usize) -> MgPoint {
    loop {
        let comps: Vec<Mat<Q>> = (0..d)
            .map(|t| {
                let k = if t == tau0 { 2 * n - 1 } else { 2 * n };
                Mat::from_fn(k, k, |_, _| Q::zero()).map(|_| Q::zero())
            })
            .map(|m| {
                let k = m.rows;
                let entries: Vec<Q> = (0..k * k).map(|_| rint(rng, 3)).collect();
                Mat::from_fn(k, k, |r, s| entries[r * k + s].clone())
            })
            .collect();
        if comps.iter().all(|c| !c.det().is_zero()) {
            return MgPoint { x: Q::from_integer(rng.gen_range(1..4i64).into()), g1: Q::from_integer(rng.gen_range(1..4i64).into()), comps };
        }
    }
}

/// A random element of the depth-`p^beta` lower unipotent congruence subgroup.
pub fn random_nbar(rng: &mut impl Rng, n: usize, d: usize, tau0: usize, p: u64, beta: u32) -> MgPoint {
    let pb = Q::from_integer((p as i64).pow(beta).into());
    let comps = (0..d)
        .map(|t| {
            let k = if t == tau0 { 2 * n - 1 } else { 2 * n };
            Mat::from_fn(k, k, |r, s| if r == s { Q::one() } else { Q::zero() })
        })
        .map(|mut m: Mat<Q>| {
            let k = m.rows;
            for r in 0..k {
                for s in 0..r {
                    m.set(r, s, rint(rng, 4) * &pb);
                }
            }
            m
        })
        .collect();
    MgPoint { x: Q::one(), g1: Q::one(), comps }
}

/// A random point of the depth-`p^beta` upper Iwahori of the larger Levi
/// (unit diagonal, integral upper part, lower part divisible by `p^beta`).
pub fn random_iwahori(rng: &mut impl Rng, n: usize, d: usize, tau0: usize, p: u64, beta: u32) -> MgPoint {
    let pb = (p as i64).pow(beta);
    let unit = |rng: &mut ChaCha8Rng| loop {
        let v: i64 = rng.gen_range(-9..=9);
        if v % p as i64 != 0 {
            return Q::from_integer(v.into());
        }
    };
    let mut r = ChaCha8Rng::seed_from_u64(rng.gen());
    let comps = (0..d)
        .map(|t| {
            let k = if t == tau0 { 2 * n - 1 } else { 2 * n };
            let mut m = Mat::identity(k, &Q::zero());
            for a in 0..k {
                for b in 0..k {
                    let v = if a == b {
                        unit(&mut r)
                    } else if a < b {
                        rint(&mut r, 5)
                    } else {
                        rint(&mut r, 3) * Q::from_integer(pb.into())
                    };
                    m.set(a, b, v);
                }
            }
            m
        })
        .collect();
    MgPoint { x: unit(&mut r), g1: unit(&mut r), comps }
}

/// A random box point in `U°`: `a_2..a_n` integral, `a_{n+1}` a unit,
/// `a_{n+2}..a_{2n}` divisible by `p`.
pub fn random_box_unit(rng: &mut impl Rng, n: usize, p: u64) -> Vec<Q> {
    let mut a = Vec::with_capacity(2 * n - 1);
    for _ in 2..=n {
        a.push(rint(rng, 9));
    }
    loop {
        let v: i64 = rng.gen_range(-9..=9);
        if v % p as i64 != 0 {
            a.push(Q::from_integer(v.into()));
            break;
        }
    }
    for _ in n + 2..=2 * n {
        a.push(rint(rng, 4) * Q::from_integer((p as i64).into()));
    }
    a
}

/// Outcome of a sampled identity check.
#[derive(Clone, Debug, Serialize)]
pub struct SampleCheck {
    /// Number of samples.
    pub samples: usize,
    /// Whether all samples passed.
    pub pass: bool,
    /// First failing sample, rendered.
    pub counterexample: Option<String>,
}

impl SampleCheck {
    pub(crate) fn run(samples: usize, mut f: impl FnMut(usize) -> Result<Option<String>>) -> Result<Self> {
        for s in 0..samples {
            if let Some(msg) = f(s)? {
                return Ok(SampleCheck { samples, pass: false, counterexample: Some(msg) });
            }
        }
        Ok(SampleCheck { samples, pass: true, counterexample: None })
    }
}

/// Check `v(m^{-1} u g, m^{-1} h) = sigma(m)^{-1} x(g, h)` for random `m`, `g`, `h`.
pub fn eigen_check(bv: &BranchVector, samples: usize, seed: u64) -> Result<SampleCheck> {
    let w = &bv.weight;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SampleCheck::run(samples, |_| {
        let m = random_mh(&mut rng, w.n, w.d, w.tau0);
        let g = random_mg(&mut rng, w.n, w.d, w.tau0);
        let h = random_mh(&mut rng, w.n, w.d, w.tau0);
        let minv = m.inverse()?;
        let lhs = bv.v_eval(&minv.to_mg().mul(&bv.u_point()).mul(&g), &minv_mul(&minv, &h))?;
        let rhs = bv.x_eval(&g, &h)? / bv.sigma(&m);
        Ok((lhs != rhs).then(|| format!("lhs {} != rhs {}", format_q(&lhs), format_q(&rhs))))
    })
}

fn minv_mul(a: &MhPoint, b: &MhPoint) -> MhPoint {
    MhPoint {
        x: &a.x * &b.x,
        y1: &a.y1 * &b.y1,
        blocks: a.blocks.iter().zip(&b.blocks).map(|((a1, a2), (b1, b2))| (a1.mul(b1), a2.mul(b2))).collect(),
    }
}

/// Check that `delta^dagger(i, a) * a_{n+1}^{-j}` lies in `1 + p^beta Z_p` on
/// the lower congruence subgroup times `U°`, and that `delta^dagger` is a
/// unit on the Iwahori times `U°`.
pub fn unit_check(bv: &BranchVector, p: u64, beta: u32, samples: usize, seed: u64) -> Result<SampleCheck> {
    let w = &bv.weight;
    let n = w.n;
    let j = w.j[w.tau0];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SampleCheck::run(samples, |_| {
        let a = random_box_unit(&mut rng, n, p);
        let i = random_nbar(&mut rng, n, w.d, w.tau0, p, beta);
        let v = bv.delta_dagger(&i, &a)? * qpow(&a[n - 1], -j);
        let ok = valuation(&(v.clone() - Q::one()), p).map_or(true, |e| e >= beta as i64);
        if !ok {
            return Ok(Some(format!("value {} not in 1 + p^beta Z_p", format_q(&v))));
        }
        let iw = random_iwahori(&mut rng, n, w.d, w.tau0, p, beta);
        let v = bv.delta_dagger(&iw, &a)?;
        Ok((valuation(&v, p) != Some(0)).then(|| format!("value {} not a unit on the Iwahori", format_q(&v))))
    })
}

/// Check `delta^dagger(i, a) = x(i, z(a))` at random rational points.
pub fn z_check(bv: &BranchVector, samples: usize, seed: u64) -> Result<SampleCheck> {
    let w = &bv.weight;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SampleCheck::run(samples, |_| {
        let i = random_mg(&mut rng, w.n, w.d, w.tau0);
        let a: Vec<Q> = (0..2 * w.n - 1).map(|_| rint(&mut rng, 6)).collect();
        let lhs = bv.delta_dagger(&i, &a)?;
        let rhs = bv.x_eval(&i, &z_point(w, &a))?;
        Ok((lhs != rhs).then(|| format!("{} != {}", format_q(&lhs), format_q(&rhs))))
    })
}

/// Branching vectors of all cone generators for the given shape.
pub fn generator_vectors(n: usize, d: usize, tau0: usize, cap: u64) -> Result<Vec<(Generator, BranchVector)>> {
    let zero = WeightData::zero(n, d, tau0);
    let coeffs = cone_decompose(&zero)?;
    coeffs
        .terms()
        .into_iter()
        .map(|(g, _)| {
            let w = WeightData::generator(n, d, tau0, &g);
            Ok((g, BranchVector::solve(&w, cap)?))
        })
        .collect()
}

/// Check `delta^dagger_{kappa,j} = prod_gen (delta^dagger_gen)^{a_gen}` at
/// random points of the Iwahori times `U°`.
pub fn multiplicativity_check(
    bv: &BranchVector,
    gens: &[(Generator, BranchVector)],
    p: u64,
    beta: u32,
    samples: usize,
    seed: u64,
) -> Result<SampleCheck> {
    let w = &bv.weight;
    let coeffs = cone_decompose(w)?;
    let terms = coeffs.terms();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SampleCheck::run(samples, |_| {
        let i = random_iwahori(&mut rng, w.n, w.d, w.tau0, p, beta);
        let a = random_box_unit(&mut rng, w.n, p);
        let lhs = bv.delta_dagger(&i, &a)?;
        let mut rhs = Q::one();
        for (g, c) in &terms {
            if *c == 0 {
                continue;
            }
            let gv = &gens.iter().find(|(h, _)| h == g).expect("generator present").1;
            rhs *= qpow(&gv.delta_dagger(&i, &a)?, *c);
        }
        Ok((lhs != rhs).then(|| format!("{} != {}", format_q(&lhs), format_q(&rhs))))
    })
}

/// Check `chi(delta^dagger_{mu_n,1} / delta^dagger_{mu_n,0}) = chi(a_{n+1})`
/// for all characters of conductor dividing `p^beta`, on the lower congruence
/// subgroup times `U°`.
pub fn twist_character_check(
    n: usize,
    p: u64,
    beta: u32,
    samples: usize,
    seed: u64,
    cap: u64,
) -> Result<SampleCheck> {
    let g0 = WeightData::generator(n, 1, 0, &Generator::Mu(n, 0));
    let g1 = WeightData::generator(n, 1, 0, &Generator::MuJ(0));
    let b0 = BranchVector::solve(&g0, cap)?;
    let b1 = BranchVector::solve(&g1, cap)?;
    let chars = PCharacter::all(p, beta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SampleCheck::run(samples, |_| {
        let a = random_box_unit(&mut rng, n, p);
        let i = random_nbar(&mut rng, n, 1, 0, p, beta);
        let ratio = b1.delta_dagger(&i, &a)? / b0.delta_dagger(&i, &a)?;
        for chi in &chars {
            if chi.value_q(&ratio)? != chi.value_q(&a[n - 1])? {
                return Ok(Some(format!("character of conductor p^{} separates ratio {}", chi.conductor(), format_q(&ratio))));
            }
        }
        Ok(None)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glrep::model::DEFAULT_DIM_CAP;

    fn wd(kappa: Vec<i64>, j: i64) -> WeightData {
        WeightData { n: kappa.len() / 2, d: 1, tau0: 0, kappa0: 0, kappa: vec![kappa], j: vec![j] }
    }

    #[test]
    fn trivial_vector() {
        let bv = BranchVector::solve(&WeightData::zero(2, 1, 0), DEFAULT_DIM_CAP).unwrap();
        let g = MgPoint::identity(2, 1, 0);
        assert_eq!(bv.delta_dagger(&g, &[q(3), q(1), q(5)]).unwrap(), Q::one());
    }

    fn q(x: i64) -> Q {
        Q::from_integer(x.into())
    }

    #[test]
    fn examples_have_multiplicity_one() {
        for (k, j) in [(vec![2, 1, -2, -2], 0), (vec![3, 2, -2, -3], 1)] {
            let w = wd(k, j);
            let bv = BranchVector::solve(&w, DEFAULT_DIM_CAP).unwrap();
            assert_eq!(bv.components[0].eigenspace_dim, 1);
            let one = bv.x_eval(&MgPoint::identity(2, 1, 0), &MhPoint::open_orbit_point(2, 1, 0)).unwrap();
            assert_eq!(one, Q::one());
            assert!(eigen_check(&bv, 4, 1).unwrap().pass);
            assert!(z_check(&bv, 4, 2).unwrap().pass);
            assert!(unit_check(&bv, 3, 1, 4, 3).unwrap().pass);
        }
    }

    #[test]
    fn products_and_twists() {
        let w = WeightData { n: 2, d: 2, tau0: 0, kappa0: 1, kappa: vec![vec![3, 2, -2, -3], vec![2, 1, -1, -2]], j: vec![1, 1] };
        let bv = BranchVector::solve(&w, DEFAULT_DIM_CAP).unwrap();
        assert!(eigen_check(&bv, 3, 5).unwrap().pass);
        let gens = generator_vectors(2, 2, 0, DEFAULT_DIM_CAP).unwrap();
        let r = multiplicativity_check(&bv, &gens, 3, 1, 3, 7).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(twist_character_check(2, 3, 1, 4, 9, DEFAULT_DIM_CAP).unwrap().pass);
    }

    #[test]
    fn rank_six_instance() {
        let w = wd(vec![1, 1, 0, -1, -1, -2], 0);
        let bv = BranchVector::solve(&w, DEFAULT_DIM_CAP).unwrap();
        assert!(eigen_check(&bv, 2, 11).unwrap().pass);
        assert!(unit_check(&bv, 3, 1, 2, 12).unwrap().pass);
    }
}
