//! Operator calculus on truncated two-variable Tate algebras `S<X, Y>`.
//!
//! The base ring `S` is a square-zero Artinian algebra `Q[e_1..e_a]/(e_i^2)`
//! with a linear endomorphism `D`. The operator `T_D` acts on `s X^a Y^b` by
//!
//! ```text
//! T_D(s X^a Y^b) = D(s) X^a Y^b + lambda * a * s X^(a-1) Y^(b+1),
//! ```
//!
//! which is the derivation with `T_D(X) = lambda Y`, `T_D(Y) = 0` extending
//! `D` whenever `D` itself is a derivation. The binomial operators
//! `f_k(T) = T(T-1)...(T-k+1)/k!` are computed both by direct iteration and
//! by an explicit closed form indexed by subsets of `{0, ..., k-1}`.
//!
//! The module also contains the `epsilon`-analytic action bounds for
//! operators on finite-rank lattices and a finite model of the
//! overconvergent norm chain `||.||_r`, `||.||_s`, `||.||_oo`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{ensure, Error, Result};
use crate::padic::artinian::Artinian;
use crate::padic::matrix::Mat;
use crate::padic::rational::{binomial, factorial, format_q, ppow, q, qi, valuation, Q};
use crate::padic::ring::Ring;

/// Default total-degree truncation of the Tate algebra.
pub const DEFAULT_DMAX: u32 = 12;

/// Elements of the base ring `S`.
pub type Base = Artinian<Q>;

fn base_zero(nvars: u32) -> Base {
    Artinian::constant(nvars, Q::zero())
}

/// A linear endomorphism of `S`, stored by its values on the monomial basis.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseMap {
    /// Number of nilpotent generators of `S`.
    pub nvars: u32,
    images: Vec<Base>,
}

impl BaseMap {
    /// The zero map.
    pub fn zero(nvars: u32) -> Self {
        BaseMap { nvars, images: vec![base_zero(nvars); 1 << nvars] }
    }

    /// A linear map given by its values on all `2^a` monomials (ordered by mask).
    pub fn from_monomial_images(nvars: u32, images: Vec<Base>) -> Result<Self> {
        ensure(images.len() == 1 << nvars, || format!("need {} monomial images", 1u64 << nvars))?;
        ensure(images.iter().all(|b| b.nvars == nvars), || "image in the wrong ring".into())?;
        Ok(BaseMap { nvars, images })
    }

    /// Extend generator images `D(e_i)` to all monomials by the product rule,
    /// `D(prod_{i in S} e_i) = sum_{i in S} D(e_i) prod_{j in S, j != i} e_j`.
    ///
    /// The result is a genuine derivation exactly when every `D(e_i)` lies in
    /// `e_i S` (see [`BaseMap::is_derivation`]); otherwise it is only linear.
    pub fn from_generators(nvars: u32, gens: &[Base]) -> Result<Self> {
        ensure(gens.len() == nvars as usize, || format!("need {nvars} generator images"))?;
        let mut images = Vec::with_capacity(1 << nvars);
        for mask in 0u64..(1 << nvars) {
            let mut acc = base_zero(nvars);
            for i in 0..nvars {
                if mask >> i & 1 == 1 {
                    let rest = Artinian::from_terms(nvars, &Q::zero(), [(mask & !(1 << i), Q::one())]);
                    acc = acc.add(&gens[i as usize].mul(&rest));
                }
            }
            images.push(acc);
        }
        Ok(BaseMap { nvars, images })
    }

    /// `d/de` on `Q[e]/(e^2)`: `1 -> 0`, `e -> 1` (linear, not a derivation).
    pub fn d_de() -> Self {
        BaseMap { nvars: 1, images: vec![base_zero(1), Artinian::constant(1, Q::one())] }
    }

    /// Apply to an element of `S`.
    pub fn apply(&self, s: &Base) -> Base {
        let mut acc = base_zero(self.nvars);
        for (m, c) in s.terms() {
            acc = acc.add(&self.images[*m as usize].scale(c));
        }
        acc
    }

    /// Whether `D(xy) = D(x) y + x D(y)` on all pairs of monomials.
    pub fn is_derivation(&self) -> bool {
        let n = self.nvars;
        let mono = |m: u64| Artinian::from_terms(n, &Q::zero(), [(m, Q::one())]);
        (0u64..(1 << n)).all(|x| {
            (0u64..(1 << n)).all(|y| {
                let lhs = self.apply(&mono(x).mul(&mono(y)));
                let rhs = self.images[x as usize].mul(&mono(y)).add(&mono(x).mul(&self.images[y as usize]));
                lhs == rhs
            })
        })
    }

    /// Whether `D` maps the integral lattice of `S` into itself.
    pub fn preserves_unit_ball(&self, p: u64) -> bool {
        self.images.iter().all(|b| b.terms().all(|(_, c)| valuation(c, p).map_or(true, |v| v >= 0)))
    }
}

/// `T_D` with `T_D(X) = lambda Y`, `T_D(Y) = 0`, `T_D|_S = D`.
#[derive(Clone, Debug, PartialEq)]
pub struct NilpotentDerivation {
    /// Action on the base ring.
    pub d: BaseMap,
    /// Scale `lambda`.
    pub lambda: Q,
}

/// An element `sum s_{a,b} X^a Y^b` of `S<X,Y>` truncated at total degree `dmax`.
#[derive(Clone, Debug, PartialEq)]
pub struct TateElement {
    /// Number of generators of `S`.
    pub nvars: u32,
    /// Total-degree truncation.
    pub dmax: u32,
    terms: BTreeMap<(u32, u32), Base>,
}

impl TateElement {
    /// JSON rendering: nonzero terms as `{x, y, coeff}` in `(a, b)` order.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .filter(|(_, c)| !c.eq_zero())
            .map(|((a, b), c)| serde_json::json!({ "x": a, "y": b, "coeff": c.to_json() }))
            .collect();
        serde_json::json!({ "dmax": self.dmax, "terms": terms })
    }

    /// The zero element.
    pub fn zero(nvars: u32, dmax: u32) -> Self {
        TateElement { nvars, dmax, terms: BTreeMap::new() }
    }

    /// `s X^a Y^b`; errors if `a + b > dmax`.
    pub fn monomial(s: Base, a: u32, b: u32, dmax: u32) -> Result<Self> {
        if a + b > dmax {
            return Err(Error::DegreeOverflow(format!("X^{a} Y^{b} exceeds total degree {dmax}")));
        }
        let mut e = Self::zero(s.nvars, dmax);
        e.add_term(a, b, s);
        Ok(e)
    }

    fn add_term(&mut self, a: u32, b: u32, s: Base) {
        if s.eq_zero() || a + b > self.dmax {
            return;
        }
        let entry = self.terms.entry((a, b)).or_insert_with(|| base_zero(s.nvars));
        *entry = entry.add(&s);
        if entry.eq_zero() {
            self.terms.remove(&(a, b));
        }
    }

    /// Coefficient of `X^a Y^b`.
    pub fn coeff(&self, a: u32, b: u32) -> Base {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(|| base_zero(self.nvars))
    }

    /// Nonzero terms.
    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Base)> {
        self.terms.iter()
    }

    /// Whether the element vanishes.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum.
    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for ((a, b), s) in &o.terms {
            r.add_term(*a, *b, s.clone());
        }
        r
    }

    /// Difference.
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&q(-1)))
    }

    /// Scale by a rational.
    pub fn scale(&self, c: &Q) -> Self {
        let mut r = Self::zero(self.nvars, self.dmax);
        for ((a, b), s) in &self.terms {
            r.add_term(*a, *b, s.scale(c));
        }
        r
    }

    /// Product, truncated at total degree `dmax`.
    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero(self.nvars, self.dmax.min(o.dmax));
        for ((a1, b1), s1) in &self.terms {
            for ((a2, b2), s2) in &o.terms {
                r.add_term(a1 + a2, b1 + b2, s1.mul(s2));
            }
        }
        r
    }

    /// Highest total degree present.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|(a, b)| a + b).max()
    }

    /// Sup-norm exponent `max(-v_p(c))` over all rational coefficients; `None` for zero.
    pub fn norm_exponent(&self, p: u64) -> Option<i64> {
        self.terms.values().flat_map(|s| s.terms().map(|(_, c)| c.clone()).collect::<Vec<_>>()).filter_map(|c| valuation(&c, p)).map(|v| -v).max()
    }
}

impl NilpotentDerivation {
    /// Apply `T_D` once.
    pub fn apply(&self, f: &TateElement) -> TateElement {
        let mut r = TateElement::zero(f.nvars, f.dmax);
        for ((a, b), s) in f.terms() {
            r.add_term(*a, *b, self.d.apply(s));
            if *a > 0 {
                r.add_term(a - 1, b + 1, s.scale(&(&self.lambda * q(*a as i64))));
            }
        }
        r
    }

    /// Matrix of `T_D` on the monomial basis `e_S X^a Y^b` (`a + b <= dmax`),
    /// ordered by `((a, b), mask)`.
    pub fn matrix(&self, dmax: u32) -> (Vec<(u32, u32, u64)>, Mat<Q>) {
        let n = self.d.nvars;
        let basis: Vec<(u32, u32, u64)> = (0..=dmax)
            .flat_map(|a| (0..=dmax - a).flat_map(move |b| (0u64..(1 << n)).map(move |m| (a, b, m))))
            .collect();
        let index: BTreeMap<(u32, u32, u64), usize> = basis.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        let mut m = Mat::zeros(basis.len(), basis.len(), &Q::zero());
        for (col, &(a, b, mask)) in basis.iter().enumerate() {
            let s = Artinian::from_terms(n, &Q::zero(), [(mask, Q::one())]);
            let img = self.apply(&TateElement::monomial(s, a, b, dmax).expect("basis monomial fits"));
            for ((a2, b2), s2) in img.terms() {
                for (m2, c) in s2.terms() {
                    m.set(index[&(*a2, *b2, *m2)], col, c.clone());
                }
            }
        }
        (basis, m)
    }
}

/// A subset `I` of `{0, ..., k-1}` with its decomposition into maximal runs
/// of consecutive integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubsetPattern {
    /// Ambient size.
    pub k: usize,
    /// Sorted elements.
    pub set: Vec<usize>,
}

impl SubsetPattern {
    /// Validate and sort.
    pub fn new(k: usize, mut set: Vec<usize>) -> Result<Self> {
        set.sort_unstable();
        set.dedup();
        ensure(set.iter().all(|i| *i < k), || format!("subset must lie in 0..{k}"))?;
        Ok(SubsetPattern { k, set })
    }

    /// Maximal runs `I_1, ..., I_l` of consecutive elements.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        for &i in &self.set {
            match out.last_mut() {
                Some(run) if *run.last().expect("runs are nonempty") + 1 == i => run.push(i),
                _ => out.push(vec![i]),
            }
        }
        out
    }

    /// Block lengths `k_1, ..., k_l`.
    pub fn block_lengths(&self) -> Vec<usize> {
        self.blocks().iter().map(Vec::len).collect()
    }

    /// All subsets of `{0..k-1}` of size `r`, in lexicographic order.
    pub fn all_of_size(k: usize, r: usize) -> Vec<SubsetPattern> {
        let mut out = Vec::new();
        for mask in 0u32..(1 << k) {
            if mask.count_ones() as usize == r {
                out.push(SubsetPattern { k, set: (0..k).filter(|i| mask >> i & 1 == 1).collect() });
            }
        }
        out.sort_by(|a, b| a.set.cmp(&b.set));
        out
    }

    fn block_factorial_inverse(&self) -> Q {
        let d: BigInt = self.block_lengths().iter().map(|l| factorial(*l as u64)).product();
        Q::one() / qi(d)
    }
}

/// `f_I(x) = prod_j (1/k_j!) prod_{i in I_j} (x - i)`.
pub fn f_i_eval(pattern: &SubsetPattern, x: &Q) -> Q {
    let prod: Q = pattern.set.iter().map(|i| x - q(*i as i64)).product();
    prod * pattern.block_factorial_inverse()
}

/// `f_I(D)(s) = prod_j (1/k_j!) prod_{i in I} (D - i) s`.
pub fn f_i_operator(pattern: &SubsetPattern, d: &BaseMap, s: &Base) -> Base {
    let mut acc = s.clone();
    for i in &pattern.set {
        acc = d.apply(&acc).sub(&acc.scale(&q(*i as i64)));
    }
    acc.scale(&pattern.block_factorial_inverse())
}

fn multinomial(total: usize, parts: &[usize]) -> BigInt {
    let denom: BigInt = parts.iter().map(|k| factorial(*k as u64)).product();
    factorial(total as u64) / denom
}

/// Closed form of `f_k(T_D)(s X^a Y^b)`:
///
/// `sum_{r <= min(k,a)} sum_{|I| = k-r} multinom(k-r; k_1..k_l)^{-1} binom(k,r)^{-1} binom(a,r) f_I(D)(s) lambda^r X^{a-r} Y^{b+r}`.
pub fn fk_td_closed(k: usize, s: &Base, a: u32, b: u32, td: &NilpotentDerivation, dmax: u32) -> Result<TateElement> {
    if a + b + k as u32 > dmax {
        return Err(Error::DegreeOverflow(format!("a + b + k = {} exceeds dmax = {dmax}", a + b + k as u32)));
    }
    let mut out = TateElement::zero(s.nvars, dmax);
    for r in 0..=k.min(a as usize) {
        let outer = qi(binomial(a as u64, r as u64)) / qi(binomial(k as u64, r as u64))
            * crate::padic::rational::qpow(&td.lambda, r as i64);
        if outer.is_zero() {
            continue;
        }
        let mut inner = base_zero(s.nvars);
        for pat in SubsetPattern::all_of_size(k, k - r) {
            let w = Q::one() / qi(multinomial(k - r, &pat.block_lengths()));
            inner = inner.add(&f_i_operator(&pat, &td.d, s).scale(&w));
        }
        out.add_term(a - r as u32, b + r as u32, inner.scale(&outer));
    }
    Ok(out)
}

/// `f_k(T_D)(f)` by applying `(T_D - i)` for `i = 0..k-1` and dividing by `k!`.
pub fn fk_td_direct(k: usize, f: &TateElement, td: &NilpotentDerivation) -> Result<TateElement> {
    if let Some(deg) = f.degree() {
        if deg + k as u32 > f.dmax {
            return Err(Error::DegreeOverflow(format!("degree {deg} + k = {k} exceeds dmax = {}", f.dmax)));
        }
    }
    let mut acc = f.clone();
    for i in 0..k {
        acc = td.apply(&acc).sub(&acc.scale(&q(i as i64)));
    }
    Ok(acc.scale(&(Q::one() / qi(factorial(k as u64)))))
}

/// Check `f_k(T)((T - k) f) = (k+1) f_{k+1}(T) f`.
pub fn recursion_holds(k: usize, f: &TateElement, td: &NilpotentDerivation) -> Result<bool> {
    let shifted = td.apply(f).sub(&f.scale(&q(k as i64)));
    let lhs = fk_td_direct(k, &shifted, td)?;
    let rhs = fk_td_direct(k + 1, f, td)?.scale(&q(k as i64 + 1));
    Ok(lhs == rhs)
}

/// Check the Leibniz rule `T(fg) = T(f) g + f T(g)` (meaningful when `D` is a derivation).
pub fn leibniz_holds(f: &TateElement, g: &TateElement, td: &NilpotentDerivation) -> bool {
    td.apply(&f.mul(g)) == td.apply(f).mul(g).add(&f.mul(&td.apply(g)))
}

/// A fixed-seed family of genuine derivations of `Q[e_1..e_a]/(e_i^2)` with
/// integral coefficients: `D(e_i) = e_i * s_i` for random integral `s_i`.
pub fn derivation_family(nvars: u32, count: usize, seed: u64) -> Vec<BaseMap> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let gens: Vec<Base> = (0..nvars)
                .map(|i| {
                    let s = random_base(&mut rng, nvars, 3);
                    Artinian::var(nvars, i, Q::one()).mul(&s)
                })
                .collect();
            BaseMap::from_generators(nvars, &gens).expect("generator count matches")
        })
        .collect()
}

/// A random element of `S` with integer coefficients in `[-bound, bound]`.
pub fn random_base(rng: &mut impl Rng, nvars: u32, bound: i64) -> Base {
    Artinian::from_terms(nvars, &Q::zero(), (0u64..(1 << nvars)).map(|m| (m, q(rng.gen_range(-bound..=bound)))))
}

/// Exponent table for `p^{-k eps} ||f_k(T)||` and its decay verdict.
#[derive(Clone, Debug, Serialize)]
pub struct ActionBound {
    /// Prime.
    pub p: u64,
    /// `eps`, rendered.
    pub eps: String,
    /// `log_p ||f_k(T)||` for `k = 0..=K` (`None` is `-infinity`).
    pub norm_exponents: Vec<Option<i64>>,
    /// `-k eps + log_p ||f_k(T)||`, rendered (`"-inf"` for the zero operator).
    pub weighted: Vec<String>,
    /// Tail envelope `E_k = max_{k <= k' <= K} w_{k'}`, rendered.
    pub envelope: Vec<String>,
    /// Least `k` with `E_k < E_0` (the envelope has left its starting level).
    pub decay_from: Option<usize>,
    /// `E_{ceil(K/2)} <= E_0 - eps ceil(K/2) / 2` and `E_{ceil(K/2)} < target`.
    pub pass: bool,
}

/// `f_k(T)` for `k = 0..=kmax` via `f_{k+1} = f_k (T - k)/(k+1)`.
pub fn binomial_operators(t: &Mat<Q>, kmax: usize) -> Vec<Mat<Q>> {
    let n = t.rows;
    let id = Mat::identity(n, &Q::zero());
    let mut out = vec![id.clone()];
    for k in 0..kmax {
        let shifted = t.sub(&id.scale(&q(k as i64)));
        let next = out[k].mul(&shifted).scale(&(Q::one() / q(k as i64 + 1)));
        out.push(next);
    }
    out
}

fn mat_norm_exponent(m: &Mat<Q>, p: u64) -> Option<i64> {
    m.min_valuation(p).map(|v| -v)
}

/// Compute the weighted exponent table of `f_k(T)` for `k <= kmax` and test
/// for eventual decay of the tail envelope (see [`ActionBound::pass`]).
pub fn epsilon_action_bound(t: &Mat<Q>, p: u64, eps: &Q, kmax: usize, target: &Q) -> Result<ActionBound> {
    ensure(t.rows == t.cols, || "operator must be square".into())?;
    ensure(!eps.is_negative(), || "eps must be >= 0".into())?;
    let ops = binomial_operators(t, kmax);
    let norms: Vec<Option<i64>> = ops.iter().map(|m| mat_norm_exponent(m, p)).collect();
    let weighted: Vec<Option<Q>> =
        norms.iter().enumerate().map(|(k, e)| e.map(|e| q(e) - q(k as i64) * eps)).collect();
    // The valuations of k! make the sequence oscillate, so decay is certified
    // on the tail envelope E_k = max_{k <= k' <= K} w_{k'}: over the first
    // half of the table it must fall at least at half the weight rate.
    let mut envelope: Vec<Option<Q>> = vec![None; kmax + 1];
    let mut running: Option<Q> = None;
    for k in (0..=kmax).rev() {
        running = match (running, &weighted[k]) {
            (None, w) => w.clone(),
            (Some(r), None) => Some(r),
            (Some(r), Some(w)) => Some(if *w > r { w.clone() } else { r }),
        };
        envelope[k] = running.clone();
    }
    let half = kmax.div_ceil(2);
    let required = envelope[0].as_ref().map(|e0| e0 - eps * q(half as i64) / q(2));
    let falls = match (&envelope[half], &required) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(e), Some(r)) => e <= r,
    };
    let under_target = envelope[half].as_ref().map_or(true, |w| w < target);
    let decay_from = (0..=kmax).find(|k| match (&envelope[*k], &envelope[0]) {
        (None, _) => true,
        (Some(e), Some(e0)) => e < e0,
        (Some(_), None) => false,
    });
    Ok(ActionBound {
        p,
        eps: format_q(eps),
        pass: falls && under_target,
        envelope: envelope.iter().map(|w| w.as_ref().map_or("-inf".to_string(), format_q)).collect(),
        weighted: weighted.iter().map(|w| w.as_ref().map_or("-inf".to_string(), format_q)).collect(),
        norm_exponents: norms,
        decay_from,
    })
}

/// Least `m` in `0..=mmax` such that `T1 + p^m T2` passes [`epsilon_action_bound`]
/// for every `m' >= m` in range.
pub fn perturbation_threshold(
    t1: &Mat<Q>,
    t2: &Mat<Q>,
    p: u64,
    eps: &Q,
    kmax: usize,
    mmax: u32,
    target: &Q,
) -> Result<Option<u32>> {
    let mut threshold = None;
    for m in (0..=mmax).rev() {
        let t = t1.add(&t2.scale(&ppow(p, m as i64)));
        if epsilon_action_bound(&t, p, eps, kmax, target)?.pass {
            threshold = Some(m);
        } else {
            break;
        }
    }
    Ok(threshold)
}

/// The rank-`n` nilpotent shift `e_i -> e_{i+1}`.
pub fn nilpotent_shift(n: usize) -> Mat<Q> {
    Mat::from_fn(n, n, |i, j| if i == j + 1 { Q::one() } else { Q::zero() })
}

/// The rank-`n` cyclic (unit) shift `e_i -> e_{i+1 mod n}`.
pub fn cyclic_shift(n: usize) -> Mat<Q> {
    Mat::from_fn(n, n, |i, j| if i == (j + 1) % n { Q::one() } else { Q::zero() })
}

/// A Laurent polynomial in `h` with rational coefficients, modelling an
/// element of the overconvergent chain `B_r^+ = Z_p[h]<p / h^{p^{r+1}}>`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct LaurentH {
    /// Exponent -> coefficient.
    pub terms: BTreeMap<i64, Q>,
}

impl LaurentH {
    /// `c h^k`.
    pub fn monomial(c: Q, k: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        LaurentH { terms }
    }

    /// Product.
    pub fn mul(&self, o: &Self) -> Self {
        let mut terms: BTreeMap<i64, Q> = BTreeMap::new();
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                *terms.entry(a + b).or_insert_with(Q::zero) += x * y;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        LaurentH { terms }
    }

    /// Sum.
    pub fn add(&self, o: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (k, c) in &o.terms {
            *terms.entry(*k).or_insert_with(Q::zero) += c;
        }
        terms.retain(|_, c| !c.is_zero());
        LaurentH { terms }
    }

    /// Integer power.
    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(LaurentH::monomial(Q::one(), 0), |acc, _| acc.mul(self))
    }

    /// `log_p ||v||_r = max_k (-v_p(c_k) + max(0, -k / p^{r+1}))`; `None` for zero.
    pub fn norm_r(&self, p: u64, r: u32) -> Option<Q> {
        let n = q(p.pow(r + 1) as i64);
        self.terms
            .iter()
            .map(|(k, c)| {
                let v = valuation(c, p).expect("nonzero coefficient");
                let pole = if *k < 0 { q(-k) / &n } else { Q::zero() };
                pole - q(v)
            })
            .max()
    }

    /// `log_p ||v||_oo = max_k -v_p(c_k)`; `None` for zero.
    pub fn norm_inf(&self, p: u64) -> Option<Q> {
        self.terms.values().map(|c| -q(valuation(c, p).expect("nonzero coefficient"))).max()
    }
}

/// Data and verdict of the norm-chain bound.
#[derive(Clone, Debug, Serialize)]
pub struct ChainBound {
    /// Prime.
    pub p: u64,
    /// Base radius index.
    pub r: u32,
    /// `delta`, rendered.
    pub delta: String,
    /// Truncation degree in `h`.
    pub trunc: u32,
    /// Annihilation exponent `M` of the kernel of `B_r^+/p -> B_oo^+/p`.
    pub annihilator: u32,
    /// Smallest `s >= r` with `log_p ||h^{-1}||_s <= (1 - delta)/M`.
    pub s: u32,
    /// Number of implication instances checked.
    pub samples: usize,
    /// First failing instance, if any.
    pub counterexample: Option<String>,
    /// All instances satisfied the implication.
    pub pass: bool,
}

/// Annihilation exponent of `ker(B_r^+/p -> B_oo^+/p)` on the truncation
/// `h^i w^j` (`i <= trunc`, `1 <= j <= 2`) of `F_p[h, w]/(h^N w)`, `w = p/h^N`.
///
/// The kernel is spanned by the surviving monomials with `j >= 1`; the
/// exponent is the least `M` with `h^M` killing each of them.
fn annihilator_exponent(n: u64, trunc: u32) -> Result<u32> {
    let survives = |i: u64, j: u32| j == 0 || i < n;
    let kernel: Vec<(u64, u32)> =
        (0..=trunc as u64).flat_map(|i| (1..=2).map(move |j| (i, j))).filter(|(i, j)| survives(*i, *j)).collect();
    for m in 0..=trunc as u64 {
        if kernel.iter().all(|(i, j)| !survives(i + m, *j)) {
            return Ok(m as u32);
        }
    }
    Err(Error::Precision(format!("truncation degree {trunc} does not certify the annihilator")))
}

/// Compute `s(delta)` and verify
/// `||v||_r <= p^c and ||v||_oo <= p^{c-m}  =>  ||v||_s <= p^{c - delta m}`
/// on `samples` fixed-seed elements (including `(p h^{-M})^m w`).
pub fn overconvergence_chain_bound(p: u64, r: u32, delta: &Q, trunc: u32, samples: usize, seed: u64) -> Result<ChainBound> {
    ensure(delta.is_positive() && delta < &Q::one(), || "delta must lie in (0, 1)".into())?;
    let n = p.pow(r + 1);
    if (trunc as u64) < 2 * n {
        return Err(Error::Precision(format!(
            "truncation degree {trunc} too small; at least {} is required to certify the annihilator",
            2 * n
        )));
    }
    let m_ann = annihilator_exponent(n, trunc)?;
    let target = (Q::one() - delta) / q(m_ann as i64);
    let mut s = r;
    while Q::one() / q(p.pow(s + 1) as i64) > target {
        s += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counterexample = None;
    for idx in 0..samples {
        let v = if idx % 2 == 0 {
            let m = rng.gen_range(0..4u32);
            let w = random_laurent(&mut rng, p, n as i64, trunc as i64, true);
            LaurentH::monomial(q(p as i64), -(m_ann as i64)).pow(m).mul(&w)
        } else {
            random_laurent(&mut rng, p, 3 * n as i64, trunc as i64, false)
        };
        let (Some(c), Some(inf)) = (v.norm_r(p, r), v.norm_inf(p)) else { continue };
        let m = &c - &inf;
        let lhs = v.norm_r(p, s).expect("nonzero");
        let bound = &c - delta * &m;
        if lhs > bound {
            counterexample = Some(format!("sample {idx}: ||v||_s exponent {} > {}", format_q(&lhs), format_q(&bound)));
            break;
        }
    }
    Ok(ChainBound {
        p,
        r,
        delta: format_q(delta),
        trunc,
        annihilator: m_ann,
        s,
        samples,
        pass: counterexample.is_none(),
        counterexample,
    })
}

/// Random Laurent polynomial with exponents in `[-pole, deg]`; when
/// `unit_ball` the result satisfies `||.||_r <= 1` for `N_r = pole`.
fn random_laurent(rng: &mut impl Rng, p: u64, pole: i64, deg: i64, unit_ball: bool) -> LaurentH {
    let mut v = LaurentH::default();
    let terms = rng.gen_range(1..6);
    for _ in 0..terms {
        let k = rng.gen_range(-pole..=deg);
        let unit = q(rng.gen_range(1..p as i64)) + q(p as i64 * rng.gen_range(0..3));
        let min_v = if unit_ball && k < 0 { (-k + pole - 1) / pole } else { 0 };
        let e = min_v + rng.gen_range(0..3);
        v = v.add(&LaurentH::monomial(unit * ppow(p, e), k));
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::rational::qf;

    fn eps1() -> Base {
        Artinian::var(1, 0, Q::one())
    }

    #[test]
    fn f_i_examples() {
        assert_eq!(f_i_eval(&SubsetPattern::new(3, vec![]).unwrap(), &q(7)), q(1));
        let full = SubsetPattern::new(4, vec![0, 1, 2, 3]).unwrap();
        assert_eq!(f_i_eval(&full, &q(9)), qi(binomial(9, 4)));
        let two = SubsetPattern::new(3, vec![0, 2]).unwrap();
        assert_eq!(two.block_lengths(), vec![1, 1]);
        assert_eq!(f_i_eval(&two, &q(5)), q(15));
    }

    #[test]
    fn closed_form_examples() {
        let td = NilpotentDerivation { d: BaseMap::d_de(), lambda: q(1) };
        let s = eps1();
        let c0 = fk_td_closed(0, &s, 1, 0, &td, 12).unwrap();
        assert_eq!(c0, TateElement::monomial(s.clone(), 1, 0, 12).unwrap());
        let c2 = fk_td_closed(2, &s, 1, 0, &td, 12).unwrap();
        assert_eq!(c2.coeff(1, 0), Artinian::constant(1, qf(-1, 2)));
        assert_eq!(c2.coeff(0, 1), Artinian::constant(1, q(1)).add(&s.scale(&qf(-1, 2))));
        let d2 = fk_td_direct(2, &TateElement::monomial(s.clone(), 1, 0, 12).unwrap(), &td).unwrap();
        assert_eq!(c2, d2);
        assert!(fk_td_closed(3, &s, 5, 5, &td, 12).is_err());
    }

    #[test]
    fn one_step() {
        let d = derivation_family(1, 1, 3).remove(0);
        let td = NilpotentDerivation { d: d.clone(), lambda: q(3) };
        let s = Artinian::constant(1, q(2)).add(&eps1());
        let c1 = fk_td_closed(1, &s, 1, 1, &td, 12).unwrap();
        assert_eq!(c1.coeff(1, 1), d.apply(&s));
        assert_eq!(c1.coeff(0, 2), s.scale(&q(3)));
    }

    #[test]
    fn derivation_checks() {
        assert!(!BaseMap::d_de().is_derivation());
        for d in derivation_family(2, 4, 11) {
            assert!(d.is_derivation());
        }
    }

    #[test]
    fn action_bound_trivial_cases() {
        let z = Mat::zeros(3, 3, &Q::zero());
        let b = epsilon_action_bound(&z, 3, &qf(1, 4), 6, &Q::zero()).unwrap();
        assert!(b.pass);
        assert_eq!(b.norm_exponents[1], None);
        let m = Mat::identity(2, &Q::zero()).scale(&q(4));
        let b = epsilon_action_bound(&m, 3, &qf(1, 2), 8, &Q::zero()).unwrap();
        assert!(b.norm_exponents[5..].iter().all(Option::is_none));
        assert_eq!(b.norm_exponents[4], Some(0));
    }

    #[test]
    fn perturbed_shift_threshold() {
        let t1 = nilpotent_shift(4).scale(&q(3));
        let t2 = cyclic_shift(4);
        assert_eq!(perturbation_threshold(&t1, &t2, 3, &qf(1, 2), 12, 4, &Q::zero()).unwrap(), Some(1));
        let b = epsilon_action_bound(&t1.add(&t2.scale(&q(27))), 3, &qf(1, 2), 12, &Q::zero()).unwrap();
        assert!(b.pass);
        assert_eq!(b.weighted[12], "-5");
    }

    #[test]
    fn chain_bound_small() {
        let b = overconvergence_chain_bound(3, 1, &qf(1, 2), 20, 50, 1).unwrap();
        assert_eq!(b.annihilator, 9);
        assert_eq!(b.s, 2);
        assert!(b.pass);
        assert!(overconvergence_chain_bound(3, 1, &qf(1, 2), 10, 5, 1).is_err());
    }
}
