//! Universal enveloping algebra calculus: PBW normal forms, determinant-type
//! operators built from commuting elementary matrices, their action on the
//! function models, and the evaluation of such actions at the open-orbit
//! point through multi-dual numbers.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::glrep::branch::{eigen_solve, BranchVector, EigenSpec};
use crate::glrep::model::{BorelSide, IrrepModel};
use crate::glrep::weights::{perm_sign, permutations, WeightData};
use crate::padic::rational::{format_q, qpow};
use crate::padic::{Artinian, Mat, Poly, Ring, Q};

/// An elementary matrix `E_{i,j}` in component `tau` (1-based `i`, `j`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Gen {
    /// Component.
    pub tau: usize,
    /// Row (1-based).
    pub i: usize,
    /// Column (1-based).
    pub j: usize,
}

impl Gen {
    /// Construct `E_{i,j,tau}`.
    pub fn new(tau: usize, i: usize, j: usize) -> Self {
        Gen { tau, i, j }
    }

    /// PBW sort key: upper and diagonal generators first, lexicographic in
    /// `(tau, i, j)`; lower-triangular generators last.
    pub fn key(&self) -> (bool, usize, usize, usize) {
        (self.i > self.j, self.tau, self.i, self.j)
    }
}

impl PartialOrd for Gen {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Gen {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.key().cmp(&o.key())
    }
}

/// `[E_ab, E_cd] = delta_bc E_ad - delta_da E_cb` (zero across components).
pub fn bracket(x: Gen, y: Gen) -> Vec<(Gen, Q)> {
    let mut out = Vec::new();
    if x.tau != y.tau {
        return out;
    }
    if x.j == y.i {
        out.push((Gen::new(x.tau, x.i, y.j), Q::one()));
    }
    if y.j == x.i {
        out.push((Gen::new(x.tau, y.i, x.j), -Q::one()));
    }
    // E_aa - E_aa style cancellations
    if out.len() == 2 && out[0].0 == out[1].0 {
        out.clear();
    }
    out
}

/// An element of the enveloping algebra in PBW normal form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UEAElement {
    /// Normal-ordered words with nonzero coefficients.
    pub terms: BTreeMap<Vec<Gen>, Q>,
}

impl UEAElement {
    /// Zero.
    pub fn zero() -> Self {
        UEAElement::default()
    }

    /// One.
    pub fn one() -> Self {
        Self::scalar(Q::one())
    }

    /// A scalar.
    pub fn scalar(c: Q) -> Self {
        let mut e = Self::zero();
        if !c.is_zero() {
            e.terms.insert(vec![], c);
        }
        e
    }

    /// A single generator.
    pub fn gen(g: Gen) -> Self {
        Self::word(&[g])
    }

    /// A single word, normalised.
    pub fn word(w: &[Gen]) -> Self {
        Self::normalize(vec![(w.to_vec(), Q::one())])
    }

    /// Normal form of a formal sum of words.
    pub fn normalize(words: Vec<(Vec<Gen>, Q)>) -> Self {
        let mut out = UEAElement::zero();
        let mut work = words;
        while let Some((w, c)) = work.pop() {
            if c.is_zero() {
                continue;
            }
            match (1..w.len()).find(|&k| w[k - 1] > w[k]) {
                None => out.add_term(w, c),
                Some(k) => {
                    let mut sw = w.clone();
                    sw.swap(k - 1, k);
                    work.push((sw, c.clone()));
                    for (g, bc) in bracket(w[k - 1], w[k]) {
                        let mut nw = Vec::with_capacity(w.len() - 1);
                        nw.extend_from_slice(&w[..k - 1]);
                        nw.push(g);
                        nw.extend_from_slice(&w[k + 1..]);
                        work.push((nw, &c * &bc));
                    }
                }
            }
        }
        out
    }

    fn add_term(&mut self, w: Vec<Gen>, c: Q) {
        let e = self.terms.entry(w).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    /// Whether this is zero.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum.
    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (w, c) in &o.terms {
            r.add_term(w.clone(), c.clone());
        }
        r
    }

    /// Difference.
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-Q::one()))
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        UEAElement { terms: self.terms.iter().map(|(w, v)| (w.clone(), v * c)).collect() }
    }

    /// Product (normalised).
    pub fn mul(&self, o: &Self) -> Self {
        let mut words = Vec::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                let mut w = a.clone();
                w.extend_from_slice(b);
                words.push((w, ca * cb));
            }
        }
        Self::normalize(words)
    }

    /// Power.
    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Commutator `[x, y]`.
    pub fn commutator(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }

    /// Serialise as `[{coeff, word: [[i, j, tau], ...]}, ...]` in normal order.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(w, c)| {
                    json!({
                        "coeff": format_q(c),
                        "word": w.iter().map(|g| vec![g.i, g.j, g.tau]).collect::<Vec<_>>(),
                    })
                })
                .collect(),
        )
    }
}

/// Whether all entries of a matrix of generators commute pairwise.
pub fn entries_commute(m: &[Vec<Gen>]) -> bool {
    let flat: Vec<Gen> = m.iter().flatten().copied().collect();
    flat.iter().enumerate().all(|(a, x)| flat[a + 1..].iter().all(|y| bracket(*x, *y).is_empty()))
}

/// Determinant of a square matrix of pairwise commuting generators.
pub fn commuting_det(m: &[Vec<Gen>]) -> Result<UEAElement> {
    let k = m.len();
    if m.iter().any(|r| r.len() != k) {
        return Err(Error::InvalidInput("determinant of a non-square array".into()));
    }
    if !entries_commute(m) {
        return Err(Error::InvalidInput("determinant entries do not commute".into()));
    }
    let words = permutations(k)
        .into_iter()
        .map(|p| {
            let w: Vec<Gen> = (0..k).map(|i| m[i][p[i]]).collect();
            (w, Q::from_integer(perm_sign(&p).into()))
        })
        .collect();
    Ok(UEAElement::normalize(words))
}

/// The `n x n` array `(E_{i, j+n, tau})`.
pub fn det_tau_array(n: usize, tau: usize) -> Vec<Vec<Gen>> {
    (1..=n).map(|i| (1..=n).map(|j| Gen::new(tau, i, j + n)).collect()).collect()
}

/// `det_tau`: determinant of `(E_{i, j+n, tau})_{i,j <= n}`.
pub fn det_tau(n: usize, tau: usize) -> Result<UEAElement> {
    commuting_det(&det_tau_array(n, tau))
}

/// The `(n-1) x (n-1)` array defining `det_{k, tau0}` (columns `n+1..2n`
/// with column `k` removed, rows `2..n`).
pub fn det_k_array(n: usize, k: usize, tau0: usize) -> Result<Vec<Vec<Gen>>> {
    if n < 2 || k < n + 1 || k > 2 * n {
        return Err(Error::InvalidInput(format!("det_k needs n >= 2 and n+1 <= k <= 2n (n = {n}, k = {k})")));
    }
    Ok((1..n)
        .map(|i| (1..n).map(|j| Gen::new(tau0, i + 1, if j < k - n { j + n } else { j + n + 1 })).collect())
        .collect())
}

/// `det_{k, tau0}` including the sign `(-1)^{k-(n+1)}`.
pub fn det_k(n: usize, k: usize, tau0: usize) -> Result<UEAElement> {
    let d = commuting_det(&det_k_array(n, k, tau0)?)?;
    Ok(if (k - n - 1) % 2 == 0 { d } else { d.scale(&-Q::one()) })
}

/// Apply a normal-ordered element to a polynomial of a model, mapping the
/// generator indices to local model indices through `local` (which must
/// return `None` for generators not acting on the model).
pub fn act_on_poly(
    model: &IrrepModel,
    x: &UEAElement,
    p: &Poly,
    local: impl Fn(&Gen) -> Option<(usize, usize)>,
) -> Result<Poly> {
    let mut out = Poly::zero(p.nvars);
    for (w, c) in &x.terms {
        let mut v = p.clone();
        for g in w.iter().rev() {
            let (a, b) = local(g).ok_or_else(|| Error::InvalidInput(format!("generator {g:?} does not act on the model")))?;
            v = model.act_poly(a, b, &v);
            if v.is_zero() {
                break;
            }
        }
        out.axpy(c, &v);
    }
    Ok(out)
}

/// A function on `GL_{a+b}` that is an eigenfunction of `GL_a x GL_b` on the
/// left and transforms by a character of the lower Borel on the right.
#[derive(Clone, Debug)]
pub struct EquivariantFunction {
    /// Size of the first block.
    pub a: usize,
    /// Size of the second block.
    pub b: usize,
    /// Exponent on the first block: `f(h^{-1} g) = det(h_1)^{-nu1} det(h_2)^{-nu2} f(g)`.
    pub nu1: i64,
    /// Exponent on the second block.
    pub nu2: i64,
    /// Right character (dominant).
    pub kappa: Vec<i64>,
    /// Lower-Borel function model.
    pub model: IrrepModel,
    /// Coordinates of `f` in the model.
    pub coeffs: Vec<(usize, Q)>,
}

impl EquivariantFunction {
    /// Solve for the eigenfunction; `Ok(None)` if the eigenline is zero.
    /// `nu2` is forced by the central character.
    pub fn solve(a: usize, b: usize, nu1: i64, kappa: &[i64], cap: u64) -> Result<Option<Self>> {
        if kappa.len() != a + b || a == 0 || b == 0 {
            return Err(Error::InvalidInput("kappa must have a + b entries with a, b >= 1".into()));
        }
        let total: i64 = kappa.iter().sum();
        let rest = -total - a as i64 * nu1;
        if rest % b as i64 != 0 {
            return Ok(None);
        }
        let nu2 = rest / b as i64;
        let model = IrrepModel::build(kappa, BorelSide::Lower, cap)?;
        let spec = EigenSpec { blocks: vec![0..a, a..a + b], targets: vec![-nu1, -nu2], s_block: None, j: 0 };
        let sols = eigen_solve(&model, &spec)?;
        match sols.len() {
            0 => Ok(None),
            1 => {
                let coeffs = sols[0].iter().map(|t| (t.index, t.coeff.clone())).collect();
                Ok(Some(EquivariantFunction { a, b, nu1, nu2, kappa: kappa.to_vec(), model, coeffs }))
            }
            k => Err(Error::Falsified(format!("eigenline for {kappa:?} has dimension {k}"))),
        }
    }

    /// Evaluate at a matrix over any ring.
    pub fn eval<R: Ring>(&self, g: &Mat<R>) -> Result<R> {
        let idx: Vec<usize> = self.coeffs.iter().map(|(i, _)| *i).collect();
        let vals = self.model.eval_selected(g, &idx)?;
        let mut acc = g.template().zero_like();
        for ((_, c), v) in self.coeffs.iter().zip(vals) {
            let cr = v.from_q_like(c).expect("rational coefficient");
            acc = acc.add(&cr.mul(&v));
        }
        Ok(acc)
    }

    /// Verify both transformation laws at random rational points.
    pub fn check_equivariance(&self, samples: usize, seed: u64) -> Result<bool> {
        let m = self.a + self.b;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let g = random_invertible(&mut rng, m);
            let fg = self.eval(&g)?;
            let jitter: Vec<i64> = (0..m * m).map(|_| rng.gen_range(0..2i64)).collect();
            let lower = Mat::from_fn(m, m, |r, s| {
                if r == s {
                    Q::from_integer([1i64, 2, -1, 3][(r + s) % 4].into())
                } else if r > s {
                    Q::from_integer((((r * 7 + s * 3) % 5) as i64 - 2 + jitter[r * m + s]).into())
                } else {
                    Q::zero()
                }
            });
            let chi: Q = (0..m).map(|i| qpow(lower.at(i, i), -self.kappa[i])).product();
            if self.eval(&g.mul(&lower))? != fg.clone() * chi {
                return Ok(false);
            }
            let h1 = random_invertible(&mut rng, self.a);
            let h2 = random_invertible(&mut rng, self.b);
            let h = Mat::block_diag(&h1, &h2);
            let lhs = self.eval(&h.inverse()?.mul(&g))?;
            let rhs = fg * qpow(&h1.det(), -self.nu1) * qpow(&h2.det(), -self.nu2);
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn random_invertible(rng: &mut impl Rng, m: usize) -> Mat<Q> {
    loop {
        let g = Mat::from_fn(m, m, |_, _| Q::zero());
        let entries: Vec<Q> = (0..m * m).map(|_| Q::from_integer(rng.gen_range(-3..=3i64).into())).collect();
        let g = Mat::from_fn(g.rows, g.cols, |r, s| entries[r * m + s].clone());
        if !g.det().is_zero() {
            return g;
        }
    }
}

/// The open-orbit point `u = [[1, u'], [0, 1]]` with `u'_{ij} = delta_{b+1-i, j}`.
pub fn u_point(a: usize, b: usize) -> Mat<Q> {
    Mat::from_fn(a + b, a + b, |r, s| {
        if r == s || (r < a && s >= a && (s - a) + 1 == b - r) {
            Q::one()
        } else {
            Q::zero()
        }
    })
}

/// `(xi * f)(g)`, computed word by word as
/// `d/dT_1 ... d/dT_k f((1 - T_k X_k) ... (1 - T_1 X_1) g)` over
/// `Q[T_1..T_k]/(T_i^2)`.
pub fn uea_act_at(xi: &UEAElement, f: &EquivariantFunction, g: &Mat<Q>) -> Result<Q> {
    let m = f.a + f.b;
    if g.rows != m || g.cols != m {
        return Err(Error::InvalidInput(format!("expected a {m}x{m} point")));
    }
    for k in 1..=m {
        let idx: Vec<usize> = (m - k..m).collect();
        if g.submatrix(&idx, &idx).det().is_zero() {
            return Err(Error::InvalidInput("point outside big cell: a trailing minor vanishes".into()));
        }
    }
    let mut acc = Q::zero();
    for (w, c) in &xi.terms {
        let k = w.len() as u32;
        let lift = g.map(|x| Artinian::constant(k, x.clone()));
        let one = Artinian::constant(k, Q::one());
        let mut cur = lift;
        for (t, gen) in w.iter().enumerate() {
            if gen.i == 0 || gen.j == 0 || gen.i > m || gen.j > m {
                return Err(Error::InvalidInput(format!("generator {gen:?} out of range")));
            }
            let mut x = Mat::identity(m, &one);
            let entry = x.at(gen.i - 1, gen.j - 1).add(&Artinian::var(k, t as u32, -Q::one()));
            x.set(gen.i - 1, gen.j - 1, entry);
            cur = x.mul(&cur);
        }
        let val = f.eval(&cur)?;
        acc += c * val.top_coeff();
    }
    Ok(acc)
}

/// `mu_sigma = prod_{i=1}^a E_{i, a+b+1-sigma(i)}` for an injective `sigma`
/// given by its 1-based values.
pub fn mu_sigma(a: usize, b: usize, sigma: &[usize]) -> Result<UEAElement> {
    if sigma.len() != a || sigma.iter().any(|s| *s == 0 || *s > b) {
        return Err(Error::InvalidInput("sigma must map {1..a} into {1..b}".into()));
    }
    let mut seen = sigma.to_vec();
    seen.sort();
    seen.dedup();
    if seen.len() != a {
        return Err(Error::InvalidInput("sigma must be injective".into()));
    }
    let w: Vec<Gen> = (0..a).map(|i| Gen::new(0, i + 1, a + b + 1 - sigma[i])).collect();
    Ok(UEAElement::word(&w))
}

/// Cycles of a permutation of `{1..a}` (1-based values).
pub fn cycles(sigma: &[usize]) -> Vec<Vec<usize>> {
    let a = sigma.len();
    let mut seen = vec![false; a];
    let mut out = Vec::new();
    for s in 0..a {
        if seen[s] {
            continue;
        }
        let mut c = Vec::new();
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            c.push(x + 1);
            x = sigma[x] - 1;
        }
        out.push(c);
    }
    out
}

/// Closed form of `(mu_sigma * f)(u) / f(u)`: zero unless `sigma` permutes
/// `{1..a}`, else `(-1)^a sgn(sigma) prod_cycles (nu1 + kappa_{max cycle})`.
pub fn nonvanishing_closed_form(a: usize, sigma: &[usize], nu1: i64, kappa: &[i64]) -> Q {
    if sigma.iter().any(|s| *s > a) {
        return Q::zero();
    }
    let p: Vec<usize> = sigma.iter().map(|s| s - 1).collect();
    let sign = if a % 2 == 0 { 1 } else { -1 } * perm_sign(&p);
    let prod: i64 = cycles(sigma).iter().map(|c| nu1 + kappa[c.iter().max().expect("nonempty") - 1]).product();
    Q::from_integer((sign * prod).into())
}

/// All injective maps `{1..a} -> {1..b}` (1-based values).
pub fn injections(a: usize, b: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(a: usize, b: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == a {
            out.push(cur.clone());
            return;
        }
        for v in 1..=b {
            if !cur.contains(&v) {
                cur.push(v);
                rec(a, b, cur, out);
                cur.pop();
            }
        }
    }
    rec(a, b, &mut cur, &mut out);
    out
}

/// Comparison of the dual-number evaluation with the closed form.
#[derive(Clone, Debug, Serialize)]
pub struct NonvanishingRow {
    /// Block sizes.
    pub a: usize,
    /// Second block size.
    pub b: usize,
    /// Left exponent.
    pub nu1: i64,
    /// Right character.
    pub kappa: Vec<i64>,
    /// The injection.
    pub sigma: Vec<usize>,
    /// Dual-number value of `(mu_sigma * f)(u)`.
    #[serde(with = "crate::padic::rational::qstr")]
    pub computed: Q,
    /// Closed form times `f(u)`.
    #[serde(with = "crate::padic::rational::qstr")]
    pub expected: Q,
}

/// Compare for every injection `sigma`.
pub fn nonvanishing_rows(f: &EquivariantFunction) -> Result<Vec<NonvanishingRow>> {
    let u = u_point(f.a, f.b);
    let fu = f.eval(&u)?;
    injections(f.a, f.b)
        .into_iter()
        .map(|s| {
            let computed = uea_act_at(&mu_sigma(f.a, f.b, &s)?, f, &u)?;
            let expected = nonvanishing_closed_form(f.a, &s, f.nu1, &f.kappa) * &fu;
            Ok(NonvanishingRow { a: f.a, b: f.b, nu1: f.nu1, kappa: f.kappa.clone(), sigma: s, computed, expected })
        })
        .collect()
}

/// Search for equivariant functions with small weights: dominant `kappa`
/// with entries in `[-bound, bound]` whose first `a` entries are pairwise
/// distinct (so that different cycle types give different closed forms),
/// and every `nu1` admitting a nonzero eigenline; deterministic order.
pub fn equivariant_instances(a: usize, b: usize, bound: i64, limit: usize, cap: u64) -> Result<Vec<EquivariantFunction>> {
    let m = a + b;
    let mut out = Vec::new();
    for kappa in dominant_tuples(m, bound) {
        if kappa[..a].windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        if crate::glrep::weights::weyl_dimension(&kappa) > cap {
            continue;
        }
        for nu1 in -3 * bound..=3 * bound {
            if let Some(f) = EquivariantFunction::solve(a, b, nu1, &kappa, cap)? {
                out.push(f);
                if out.len() >= limit {
                    return Ok(out);
                }
            }
        }
    }
    Ok(out)
}

/// Dominant tuples of length `m` with entries in `[-bound, bound]`, in
/// decreasing lexicographic order.
pub fn dominant_tuples(m: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(m);
    fn rec(m: usize, hi: i64, bound: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for v in (-bound..=hi).rev() {
            cur.push(v);
            rec(m, v, bound, cur, out);
            cur.pop();
        }
    }
    rec(m, bound, bound, &mut cur, &mut out);
    out
}

/// The operator `Delta` with its constant computed two ways.
#[derive(Clone, Debug)]
pub struct DeltaOperator {
    /// The weight.
    pub weight: WeightData,
    /// Constant from coefficient-wise proportionality.
    pub c_proportional: Q,
    /// Constant from evaluation at the normalisation point.
    pub c_evaluated: Q,
    /// The closed-form constant from the induction on `j` (compared up to sign).
    pub proof_constant: Q,
    /// `C * prod_tau det_tau^{j_tau}`.
    pub delta: UEAElement,
}

/// Multisets of size `j` from `{lo..=hi}` as exponent vectors of length `hi - lo + 1`.
pub fn multisets(len: usize, j: u32) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = vec![0u8; len];
    fn rec(i: usize, left: u32, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if i + 1 == cur.len() {
            cur[i] = left as u8;
            out.push(cur.clone());
            return;
        }
        for e in (0..=left).rev() {
            cur[i] = e as u8;
            rec(i + 1, left - e, cur, out);
        }
    }
    if len == 0 {
        return if j == 0 { vec![vec![]] } else { vec![] };
    }
    rec(0, j, &mut cur, &mut out);
    out
}

/// Multinomial coefficient `|J|! / prod_k J_k!` of an exponent vector: the
/// scale of `e_J` relative to `x_J` when `e_J` is the product of the
/// degree-one basis vectors in the symmetric power.
pub fn multinomial(jexp: &[u8]) -> Q {
    let total: u64 = jexp.iter().map(|x| *x as u64).sum();
    let mut r = Q::from_integer(crate::padic::rational::factorial(total));
    for e in jexp {
        r /= Q::from_integer(crate::padic::rational::factorial(*e as u64));
    }
    r
}

/// Sum over `S_k` of products over cycles of `f(max cycle)`.
fn cycle_sum(k: usize, f: impl Fn(usize) -> i64) -> i64 {
    permutations(k)
        .into_iter()
        .map(|p| {
            let s: Vec<usize> = p.iter().map(|x| x + 1).collect();
            cycles(&s).iter().map(|c| f(*c.iter().max().expect("nonempty"))).product::<i64>()
        })
        .sum()
}

/// The closed-form constant obtained by iterating the nonvanishing formula.
pub fn proof_constant(w: &WeightData) -> Q {
    let n = w.n;
    let t0 = w.tau0;
    let mut acc = 1i64;
    for jj in 0..w.j[t0] {
        acc *= cycle_sum(n - 1, |m| w.k(t0, n + 1) - w.k(t0, 2 * n + 1 - m) - jj);
    }
    for t in (0..w.d).filter(|t| *t != t0) {
        for nu in 0..w.j[t] {
            acc *= cycle_sum(n, |m| w.k(t, m) - nu);
        }
    }
    Q::from_integer(acc.into())
}

/// Compute `C_{kappa, j}` by proportionality of
/// `sum_J det_J^{[j]} v^{[0]} (x) x_J` with `v^{[j]}`, and again by
/// evaluation at the normalisation point.
pub fn delta_operator(w: &WeightData, cap: u64) -> Result<DeltaOperator> {
    w.check_cone()?;
    let n = w.n;
    let t0 = w.tau0;
    let mut w0 = w.clone();
    w0.j = vec![0; w.d];
    let v0 = BranchVector::solve(&w0, cap)?;
    let vj = BranchVector::solve(w, cap)?;
    let mut lam_prop = Q::one();
    let mut lam_eval = Q::one();
    for (c0, cj) in v0.components.iter().zip(&vj.components) {
        let model = &cj.model;
        let f0 = c0.terms.iter().fold(Poly::zero(model.m * model.m), |mut acc, t| {
            acc.axpy(&t.coeff, &c0.model.basis[t.index]);
            acc
        });
        // image as (basis index, J) -> coefficient
        let mut image: BTreeMap<(usize, Vec<u8>), Q> = BTreeMap::new();
        if c0.tau == t0 {
            let local = |g: &Gen| (g.i >= 2 && g.j >= 2).then(|| (g.i - 2, g.j - 2));
            for jexp in multisets(n, w.j[t0] as u32) {
                let mut op = UEAElement::one();
                for (k, e) in jexp.iter().enumerate() {
                    op = op.mul(&det_k(n, n + 1 + k, t0)?.pow(*e as u32));
                }
                let weight = multinomial(&jexp);
                let p = act_on_poly(model, &op, &f0, local)?;
                for (l, c) in model.coords(&p)? {
                    image.insert((l, jexp.clone()), c * &weight);
                }
            }
        } else {
            let local = |g: &Gen| Some((g.i - 1, g.j - 1));
            let op = det_tau(n, c0.tau)?.pow(w.j[c0.tau] as u32);
            let p = act_on_poly(model, &op, &f0, local)?;
            for (l, c) in model.coords(&p)? {
                image.insert((l, vec![]), c);
            }
        }
        let target: BTreeMap<(usize, Vec<u8>), Q> =
            cj.terms.iter().map(|t| ((t.index, t.s_exp.clone()), t.coeff.clone())).collect();
        let Some(((k0, c_img), c_tgt)) = image.iter().next().and_then(|(k, v)| target.get(k).map(|t| ((k, v), t))) else {
            return Err(Error::Falsified(format!("operator image on component {} is zero or misplaced", c0.tau)));
        };
        let _ = k0;
        let lam = c_img / c_tgt;
        let keys: std::collections::BTreeSet<_> = image.keys().chain(target.keys()).cloned().collect();
        for k in keys {
            let a = image.get(&k).cloned().unwrap_or_else(Q::zero);
            let b = target.get(&k).cloned().unwrap_or_else(Q::zero);
            if a != &lam * &b {
                return Err(Error::Falsified(format!("operator image is not parallel to the branching vector on component {}", c0.tau)));
            }
        }
        lam_prop *= &lam;
        // evaluation path: v^{[j]}(u, v) = 1 on this component
        let mut ev = Q::zero();
        let vals = model.eval_all(&cj.u)?;
        for ((l, jexp), c) in &image {
            let _ = jexp; // the S coordinates are all 1 at the normalisation point
            ev += c * &vals[*l];
        }
        lam_eval *= ev;
    }
    if lam_prop.is_zero() {
        return Err(Error::Falsified("constant would be infinite".into()));
    }
    let c_prop = lam_prop.recip();
    let c_eval = if lam_eval.is_zero() { Q::zero() } else { lam_eval.recip() };
    let mut delta = UEAElement::scalar(c_prop.clone());
    for t in 0..w.d {
        delta = delta.mul(&det_tau(n, t)?.pow(w.j[t] as u32));
    }
    Ok(DeltaOperator { weight: w.clone(), c_proportional: c_prop, c_evaluated: c_eval, proof_constant: proof_constant(w), delta })
}

/// Check `E_{i,1} q = q E_{i,1} + sum_k (dq/dx_k) E_{i,k}` where `x_k = E_{1,k}`
/// (`k = n+1..2n`), both in the enveloping algebra and applied to every
/// basis function of a sample model of `GL_{2n}`.
pub fn commutator_leibniz_check(n: usize, i: usize, q: &Poly, sample: &IrrepModel) -> Result<bool> {
    if i < 2 || i > n || q.nvars != n || sample.m != 2 * n {
        return Err(Error::InvalidInput("need 2 <= i <= n, q in n variables and a GL_{2n} model".into()));
    }
    let subst = |p: &Poly| -> UEAElement {
        let mut acc = UEAElement::zero();
        for (mono, c) in &p.terms {
            let mut t = UEAElement::scalar(c.clone());
            for (k, e) in mono.iter().enumerate() {
                t = t.mul(&UEAElement::gen(Gen::new(0, 1, n + 1 + k)).pow(*e as u32));
            }
            acc = acc.add(&t);
        }
        acc
    };
    let qe = subst(q);
    let ei1 = UEAElement::gen(Gen::new(0, i, 1));
    let lhs = ei1.mul(&qe);
    let mut rhs = qe.mul(&ei1);
    for k in 0..n {
        rhs = rhs.add(&subst(&q.derivative(k)).mul(&UEAElement::gen(Gen::new(0, i, n + 1 + k))));
    }
    if lhs != rhs {
        return Ok(false);
    }
    let local = |g: &Gen| Some((g.i - 1, g.j - 1));
    for f in &sample.basis {
        let lhs_v = act_on_poly(sample, &ei1, &act_on_poly(sample, &qe, f, local)?, local)?;
        let mut rhs_v = act_on_poly(sample, &qe, &act_on_poly(sample, &ei1, f, local)?, local)?;
        for k in 0..n {
            let inner = act_on_poly(sample, &UEAElement::gen(Gen::new(0, i, n + 1 + k)), f, local)?;
            rhs_v = rhs_v.add(&act_on_poly(sample, &subst(&q.derivative(k)), &inner, local)?);
        }
        if lhs_v != rhs_v {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glrep::model::DEFAULT_DIM_CAP;

    fn e(i: usize, j: usize) -> Gen {
        Gen::new(0, i, j)
    }

    #[test]
    fn pbw_examples() {
        let x = UEAElement::word(&[e(2, 1), e(1, 2)]);
        let expect = UEAElement::word(&[e(1, 2), e(2, 1)]).add(&UEAElement::gen(e(2, 2))).sub(&UEAElement::gen(e(1, 1)));
        assert_eq!(x, expect);
        let y = UEAElement::word(&[e(1, 3), e(2, 4)]);
        assert_eq!(y.terms.len(), 1);
        for i in 2..=3 {
            for k in 4..=6 {
                let c = UEAElement::gen(e(i, 1)).commutator(&UEAElement::gen(e(1, k)));
                assert_eq!(c, UEAElement::gen(e(i, k)));
            }
        }
    }

    #[test]
    fn determinants() {
        let d = det_tau(2, 0).unwrap();
        let expect = UEAElement::word(&[e(1, 3), e(2, 4)]).sub(&UEAElement::word(&[e(1, 4), e(2, 3)]));
        assert_eq!(d, expect);
        assert_eq!(det_k(2, 3, 0).unwrap(), UEAElement::gen(e(2, 4)));
        assert!(det_k(2, 5, 0).is_err());
        // Laplace expansion along the first row.
        for n in 2..=3 {
            let mut s = UEAElement::zero();
            for k in n + 1..=2 * n {
                s = s.add(&UEAElement::gen(e(1, k)).mul(&det_k(n, k, 0).unwrap()));
            }
            assert_eq!(s, det_tau(n, 0).unwrap());
        }
    }

    #[test]
    fn gl2_single_root() {
        let f = EquivariantFunction::solve(1, 1, -1, &[1, 0], DEFAULT_DIM_CAP).unwrap().expect("eigenfunction");
        assert!(f.check_equivariance(3, 1).unwrap());
        let u = u_point(1, 1);
        let lhs = uea_act_at(&UEAElement::gen(e(1, 2)), &f, &u).unwrap();
        assert_eq!(lhs, -Q::from_integer((f.nu1 + 1).into()) * f.eval(&u).unwrap());
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(nonvanishing_closed_form(2, &[2, 1], 1, &[3, 5]), Q::from_integer((-6).into()));
        assert_eq!(nonvanishing_closed_form(2, &[1, 2], 1, &[3, 5]), Q::from_integer(24.into()));
        assert_eq!(nonvanishing_closed_form(1, &[2], 0, &[3, 5]), Q::zero());
    }

    fn wd(kappa: Vec<i64>, j: i64) -> WeightData {
        WeightData { n: kappa.len() / 2, d: 1, tau0: 0, kappa0: 0, kappa: vec![kappa], j: vec![j] }
    }

    #[test]
    fn delta_constants() {
        let d0 = delta_operator(&wd(vec![3, 2, -2, -3], 0), DEFAULT_DIM_CAP).unwrap();
        assert_eq!(d0.c_proportional, Q::one());
        assert_eq!(d0.delta, UEAElement::one());
        for (k, j, c) in [(vec![3, 2, -2, -3], 1, -1), (vec![4, 3, -2, -5], 2, 6), (vec![4, 3, -2, -5], 3, -6)] {
            let d = delta_operator(&wd(k, j), DEFAULT_DIM_CAP).unwrap();
            assert_eq!(d.c_proportional, d.c_evaluated);
            assert_eq!(d.c_proportional, Q::from_integer(c.into()).recip());
            assert_eq!(crate::padic::rational::qabs(&(d.c_proportional.clone() * &d.proof_constant)), Q::one());
        }
    }

    #[test]
    fn leibniz_identity() {
        let sample = IrrepModel::build(&[1, 0, 0, -1], BorelSide::Lower, DEFAULT_DIM_CAP).unwrap();
        let x0 = Poly::var(2, 0);
        let q = x0.mul(&Poly::var(2, 1));
        for p in [Poly::constant(2, Q::one()), x0, q] {
            assert!(commutator_leibniz_check(2, 2, &p, &sample).unwrap());
        }
    }

    #[test]
    fn nonvanishing_small() {
        for f in equivariant_instances(2, 2, 2, 3, DEFAULT_DIM_CAP).unwrap() {
            assert!(f.check_equivariance(2, 4).unwrap());
            for r in nonvanishing_rows(&f).unwrap() {
                assert_eq!(r.computed, r.expected, "{r:?}");
            }
        }
    }
}
