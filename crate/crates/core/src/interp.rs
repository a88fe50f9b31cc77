//! Gauss sums, epsilon factors, the modulus character and the `p`-local
//! interpolation factor, with exact arithmetic in Laurent polynomials over
//! cyclotomic fields times formal half-integral powers of `p`.
//!
//! Values are [`HalfPowerValue`]s `c * p^{k/2}`: the coefficient `c` lives in
//! `Q(zeta)[x_1^{+-1}, ..]` for named symbols `x_i` (formal Satake parameters,
//! formal character values at `p`), and `p^{1/2}` is a formal symbol that is
//! never resolved into the cyclotomic part. The canonical form moves the
//! `p`-part of the coefficient's content into the exponent, so two values
//! are equal exactly when their canonical forms agree.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::padic::character::gauss_sum as table_gauss_sum;
use crate::padic::rational::{format_q, ppow, q, qf};
use crate::padic::{Cyclotomic, Mat, PCharacter, Ring, Q};

/// A monomial in named symbols with nonzero integer exponents.
pub type Monomial = BTreeMap<String, i32>;

/// A Laurent polynomial in named symbols with cyclotomic coefficients.
#[derive(Clone, Debug, Default)]
pub struct Laurent {
    terms: BTreeMap<Monomial, Cyclotomic>,
}

impl PartialEq for Laurent {
    fn eq(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }
}

impl Laurent {
    /// The zero polynomial.
    pub fn zero() -> Self {
        Laurent::default()
    }

    /// A constant.
    pub fn constant(c: Cyclotomic) -> Self {
        let mut l = Laurent::zero();
        l.push(Monomial::new(), c);
        l
    }

    /// A rational constant.
    pub fn from_q(x: Q) -> Self {
        Self::constant(Cyclotomic::from_q(1, x))
    }

    /// The symbol `name` to the power `e`.
    pub fn symbol(name: &str, e: i32) -> Self {
        let mut m = Monomial::new();
        if e != 0 {
            m.insert(name.to_string(), e);
        }
        let mut l = Laurent::zero();
        l.push(m, Cyclotomic::one(1));
        l
    }

    fn push(&mut self, m: Monomial, c: Cyclotomic) {
        let sum = match self.terms.remove(&m) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !sum.eq_zero() {
            self.terms.insert(m, sum);
        }
    }

    /// Whether the polynomial vanishes.
    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| c.eq_zero())
    }

    /// Sum.
    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.push(m.clone(), c.clone());
        }
        out
    }

    /// Difference.
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    /// Negation.
    pub fn neg(&self) -> Self {
        Laurent { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect() }
    }

    /// Product.
    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Laurent::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let mut m = m1.clone();
                for (s, e) in m2 {
                    let v = m.get(s).copied().unwrap_or(0) + e;
                    if v == 0 {
                        m.remove(s);
                    } else {
                        m.insert(s.clone(), v);
                    }
                }
                out.push(m, c1.mul(c2));
            }
        }
        out
    }

    /// Scale by a rational.
    pub fn scale(&self, x: &Q) -> Self {
        let mut out = Laurent::zero();
        for (m, c) in &self.terms {
            out.push(m.clone(), c.scale(x));
        }
        out
    }

    /// Inverse of a single-term polynomial.
    pub fn inv(&self) -> Result<Self> {
        if self.terms.len() != 1 {
            return Err(Error::NotUnit("only monomial Laurent polynomials are inverted".into()));
        }
        let (m, c) = self.terms.iter().next().expect("one term");
        let ci = c.inv().ok_or_else(|| Error::NotUnit("zero coefficient".into()))?;
        let mi = m.iter().map(|(s, e)| (s.clone(), -e)).collect();
        let mut out = Laurent::zero();
        out.push(mi, ci);
        Ok(out)
    }

    /// Integer power (negative powers need a monomial).
    pub fn powi(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Laurent::from_q(Q::one());
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Minimum `p`-adic valuation over all coefficient coordinates.
    pub fn content_valuation(&self, p: u64) -> Option<i64> {
        self.terms.values().filter_map(|c| c.content_valuation(p)).min()
    }

    /// Evaluate by substituting cyclotomic units for some symbols.
    pub fn substitute(&self, values: &BTreeMap<String, Cyclotomic>) -> Result<Self> {
        let mut out = Laurent::zero();
        for (m, c) in &self.terms {
            let mut term = Laurent::constant(c.clone());
            for (s, e) in m {
                let factor = match values.get(s) {
                    Some(v) => Laurent::constant(v.clone()).powi(*e as i64)?,
                    None => Laurent::symbol(s, *e),
                };
                term = term.mul(&factor);
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    /// JSON rendering: a list of `{monomial, value}`.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(m, c)| json!({ "monomial": m, "value": c.render(), "field": c.m }))
                .collect(),
        )
    }
}

/// `c * p^{half_exp / 2}` in canonical form.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfPowerValue {
    /// The prime.
    pub p: u64,
    /// Coefficient, with `p`-content valuation zero (or zero).
    pub coeff: Laurent,
    /// Twice the exponent of `p`.
    pub half_exp: i64,
}

impl HalfPowerValue {
    /// Build and canonicalise.
    pub fn new(p: u64, coeff: Laurent, half_exp: i64) -> Self {
        match coeff.content_valuation(p) {
            None => HalfPowerValue { p, coeff: Laurent::zero(), half_exp: 0 },
            Some(v) => HalfPowerValue { p, coeff: coeff.scale(&ppow(p, -v)), half_exp: half_exp + 2 * v },
        }
    }

    /// The value `1`.
    pub fn one(p: u64) -> Self {
        Self::new(p, Laurent::from_q(Q::one()), 0)
    }

    /// A rational number.
    pub fn from_q(p: u64, x: Q) -> Self {
        Self::new(p, Laurent::from_q(x), 0)
    }

    /// A cyclotomic number.
    pub fn from_cyclotomic(p: u64, c: Cyclotomic) -> Self {
        Self::new(p, Laurent::constant(c), 0)
    }

    /// A formal symbol.
    pub fn symbol(p: u64, name: &str) -> Self {
        Self::new(p, Laurent::symbol(name, 1), 0)
    }

    /// `p^{k/2}`.
    pub fn p_half_power(p: u64, k: i64) -> Self {
        Self::new(p, Laurent::from_q(Q::one()), k)
    }

    /// Whether the value is zero.
    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    /// Product: coefficients multiply, exponents add.
    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.p, self.coeff.mul(&o.coeff), self.half_exp + o.half_exp)
    }

    /// Inverse (the coefficient must be a single term).
    pub fn inv(&self) -> Result<Self> {
        Ok(Self::new(self.p, self.coeff.inv()?, -self.half_exp))
    }

    /// Quotient.
    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    /// Integer power.
    pub fn powi(&self, e: i64) -> Result<Self> {
        Ok(Self::new(self.p, self.coeff.powi(e)?, self.half_exp * e))
    }

    /// Sum of two values whose exponents have the same parity.
    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.is_zero() {
            return Ok(o.clone());
        }
        if o.is_zero() {
            return Ok(self.clone());
        }
        if (self.half_exp - o.half_exp) % 2 != 0 {
            return Err(Error::InvalidInput("cannot add values with p^{1/2} parts of different parity".into()));
        }
        let k = self.half_exp.min(o.half_exp);
        let a = self.coeff.scale(&ppow(self.p, (self.half_exp - k) / 2));
        let b = o.coeff.scale(&ppow(self.p, (o.half_exp - k) / 2));
        Ok(Self::new(self.p, a.add(&b), k))
    }

    /// The exponent of `p` as a rational (`half_exp / 2`).
    pub fn p_exponent(&self) -> Q {
        qf(self.half_exp, 2)
    }

    /// JSON rendering.
    pub fn to_json(&self) -> Value {
        json!({ "coeffs": self.coeff.to_json(), "half_exp": self.half_exp })
    }
}

/// A finite-order character of `Q_p^x`: its restriction to `Z_p^x` and its
/// value at `p` (possibly a formal symbol).
#[derive(Clone, Debug)]
pub struct LocalCharacter {
    /// Restriction to the units.
    pub fin: PCharacter,
    /// Value at `p`.
    pub at_p: Laurent,
}

impl LocalCharacter {
    /// Build from the unit part and the value at `p`.
    pub fn new(fin: PCharacter, at_p: Laurent) -> Self {
        LocalCharacter { fin, at_p }
    }

    /// Conductor exponent.
    pub fn conductor(&self) -> u32 {
        self.fin.conductor()
    }

    /// Inverse character.
    pub fn inverse(&self) -> Result<Self> {
        Ok(LocalCharacter { fin: self.fin.inverse(), at_p: self.at_p.inv()? })
    }

    /// Twist by an unramified character with value `theta` at `p`.
    pub fn twist(&self, theta: &Laurent) -> Self {
        LocalCharacter { fin: self.fin.clone(), at_p: self.at_p.mul(theta) }
    }

    /// `chi_fin(-1)` as `+-1`.
    pub fn sign(&self) -> i64 {
        self.fin.sign()
    }
}

/// `G(chi) = p^{-(h - f)} sum_{a in (Z/p^h)^x} chi(a) zeta_{p^f}^a`, `f` the
/// exact conductor exponent; independent of `h >= f`.
pub fn gauss_sum(chi: &PCharacter, h: u32) -> Result<Cyclotomic> {
    let f = chi.conductor();
    if f == 0 {
        return Err(Error::InvalidInput("conductor must be >= p for a Gauss sum".into()));
    }
    if h < f {
        return Err(Error::InvalidInput(format!("summation level h = {h} is below the conductor exponent {f}")));
    }
    let table = if h > chi.conductor_exp {
        chi.inflate(h)?
    } else if h < chi.conductor_exp {
        restrict_level(chi, h)?
    } else {
        chi.clone()
    };
    Ok(table_gauss_sum(&table))
}

fn restrict_level(chi: &PCharacter, h: u32) -> Result<PCharacter> {
    let units = crate::padic::character::units_mod(chi.p, h);
    let values = units
        .iter()
        .map(|a| chi.exponent(*a as i64).ok_or_else(|| Error::InvalidInput("non-unit".into())))
        .collect::<Result<Vec<_>>>()?;
    Ok(PCharacter { conductor_exp: h, values, ..chi.clone() })
}

/// `delta_B(t) = prod_tau prod_i |t_{i,tau}|^{2n+1-2i}` for diagonal `t` with
/// entries that are powers of `p`.
pub fn modulus_delta_b(p: u64, n: usize, t: &[Mat<Q>]) -> Result<HalfPowerValue> {
    let mut exp = 0i64;
    for comp in t {
        if comp.rows != 2 * n || comp.cols != 2 * n {
            return Err(Error::InvalidInput(format!("expected {0}x{0} diagonal matrices", 2 * n)));
        }
        for i in 0..2 * n {
            for j in 0..2 * n {
                if i != j && !comp.at(i, j).is_zero() {
                    return Err(Error::InvalidInput("delta_B needs diagonal matrices".into()));
                }
            }
            let k = p_power_exponent(comp.at(i, i), p)
                .ok_or_else(|| Error::InvalidInput(format!("entry {} is not a power of p", format_q(comp.at(i, i)))))?;
            // |p^k| = p^{-k}
            exp -= k * (2 * n as i64 + 1 - 2 * (i as i64 + 1));
        }
    }
    Ok(HalfPowerValue::p_half_power(p, 2 * exp))
}

fn p_power_exponent(x: &Q, p: u64) -> Option<i64> {
    let v = crate::padic::rational::valuation(x, p)?;
    (*x == ppow(p, v)).then_some(v)
}

/// `eps(eta, 1/2) = G(eta^{-1}) eta(-p^c) p^{-c/2}` with
/// `eta(-p^c) = eta(p)^c eta_fin(-1)`.
pub fn epsilon_factor(eta: &LocalCharacter) -> Result<HalfPowerValue> {
    let p = eta.fin.p;
    let c = eta.conductor();
    if c == 0 {
        return Err(Error::InvalidInput("epsilon factors are only taken for ramified characters".into()));
    }
    let g = gauss_sum(&eta.fin.inverse(), c)?;
    let coeff = Laurent::constant(g).mul(&eta.at_p.powi(c as i64)?).scale(&q(eta.sign()));
    Ok(HalfPowerValue::new(p, coeff, -(c as i64)))
}

/// Satake data: the values `theta_{i,tau}(p)` for `i = 1..2n`, one list per component.
#[derive(Clone, Debug)]
pub struct SatakeData {
    /// The prime.
    pub p: u64,
    /// Rank parameter.
    pub n: usize,
    /// `theta[tau][i-1] = theta_{i,tau}(p)`.
    pub theta: Vec<Vec<Laurent>>,
    /// Whether `theta_i = theta_{2n+1-i}^{-1}` holds by construction.
    pub self_dual: bool,
}

impl SatakeData {
    /// Formal self-dual parameters: symbols `theta_{i}_{tau}` for `i <= n`,
    /// inverses for `i > n`.
    pub fn formal(p: u64, n: usize, d: usize) -> Self {
        let theta = (0..d)
            .map(|t| {
                (1..=2 * n)
                    .map(|i| {
                        let (k, e) = if i <= n { (i, 1) } else { (2 * n + 1 - i, -1) };
                        Laurent::symbol(&format!("theta_{k}_{t}"), e)
                    })
                    .collect()
            })
            .collect();
        SatakeData { p, n, theta, self_dual: true }
    }

    /// Self-dual parameters from values for `i = 1..n` on every component.
    pub fn from_values(p: u64, n: usize, first_half: Vec<Vec<Laurent>>) -> Result<Self> {
        let mut theta = Vec::new();
        for row in first_half {
            if row.len() != n {
                return Err(Error::InvalidInput(format!("expected {n} Satake values per component")));
            }
            let mut full = row.clone();
            for i in (0..n).rev() {
                full.push(row[i].inv()?);
            }
            theta.push(full);
        }
        Ok(SatakeData { p, n, theta, self_dual: true })
    }

    /// Number of components.
    pub fn d(&self) -> usize {
        self.theta.len()
    }

    /// Check `theta_i theta_{2n+1-i} = 1` on every component.
    pub fn check_self_dual(&self) -> bool {
        let one = Laurent::from_q(Q::one());
        self.theta
            .iter()
            .all(|row| (0..self.n).all(|i| row[i].mul(&row[2 * self.n - 1 - i]) == one))
    }

    /// `alpha_{i,tau} = prod_{j <= i} p^{n - j + 1/2} theta_{j,tau}(p)`.
    pub fn alpha(&self, i: usize, tau: usize) -> HalfPowerValue {
        let mut acc = HalfPowerValue::one(self.p);
        for j in 1..=i {
            let f = HalfPowerValue::new(self.p, self.theta[tau][j - 1].clone(), 2 * (self.n as i64 - j as i64) + 1);
            acc = acc.mul(&f);
        }
        acc
    }

    /// `alpha_p^e = prod_tau prod_{i=1}^{2n-1} alpha_{i,tau}^{e_tau}`.
    pub fn alpha_p(&self, e: &[u32]) -> Result<HalfPowerValue> {
        let mut acc = HalfPowerValue::one(self.p);
        for (tau, &et) in e.iter().enumerate() {
            for i in 1..2 * self.n {
                acc = acc.mul(&self.alpha(i, tau).powi(et as i64)?);
            }
        }
        Ok(acc)
    }
}

fn t_p_components(p: u64, n: usize, e: &[u32]) -> Vec<Mat<Q>> {
    e.iter().map(|&et| crate::iwahori::t_p(n, p, et)).collect()
}

fn check_shapes(data: &SatakeData, chi: &[LocalCharacter], e: &[u32]) -> Result<()> {
    let d = data.d();
    if chi.len() != d || e.len() != d || d == 0 {
        return Err(Error::InvalidInput(format!(
            "need one character and one exponent per component ({d}), got {} and {}",
            chi.len(),
            e.len()
        )));
    }
    if e.iter().any(|&x| x == 0) {
        return Err(Error::InvalidInput("exponents e_tau must be at least 1".into()));
    }
    if chi.iter().any(|c| c.fin.p != data.p) {
        return Err(Error::InvalidInput("characters for a different prime".into()));
    }
    Ok(())
}

/// `alpha_p^e delta_B(t_p^e)`.
pub fn hecke_normaliser(data: &SatakeData, e: &[u32]) -> Result<HalfPowerValue> {
    let delta = modulus_delta_b(data.p, data.n, &t_p_components(data.p, data.n, e))?;
    Ok(data.alpha_p(e)?.mul(&delta))
}

/// `prod_tau chi_tau(-1)^n`.
fn parity_product(chi: &[LocalCharacter], n: usize) -> i64 {
    chi.iter().map(|c| c.sign().pow(n as u32)).product()
}

/// The interpolation factor
/// `p^{-e_0} (alpha_{n,0}/alpha_{n-1,0})^{e_0} chi_0(-1) chi_0(p)^{-e_0} G(chi_0)
///  prod_tau chi_tau(-1)^n (alpha_p^e delta_B(t_p^e))^{-1}`,
/// component 0 being the distinguished one.
pub fn interpolation_factor(data: &SatakeData, chi: &[LocalCharacter], e: &[u32]) -> Result<HalfPowerValue> {
    check_shapes(data, chi, e)?;
    let p = data.p;
    let n = data.n;
    let chi0 = &chi[0];
    if chi0.conductor() == 0 {
        return Err(Error::InvalidInput(
            "interpolation requires the distinguished place to divide the conductor".into(),
        ));
    }
    let e0 = e[0] as i64;
    let ratio = data.alpha(n, 0).div(&data.alpha(n - 1, 0))?;
    let g = gauss_sum(&chi0.fin, chi0.conductor())?;
    let mut v = HalfPowerValue::p_half_power(p, -2 * e0)
        .mul(&ratio.powi(e0)?)
        .mul(&HalfPowerValue::from_q(p, q(chi0.sign() * parity_product(chi, n))))
        .mul(&HalfPowerValue::new(p, chi0.at_p.powi(-e0)?, 0))
        .mul(&HalfPowerValue::from_cyclotomic(p, g));
    v = v.div(&hecke_normaliser(data, e)?)?;
    Ok(v)
}

/// Both sides of the two displayed epsilon-factor expressions for the
/// interpolation factor.
#[derive(Clone, Debug)]
pub struct EpsilonExpressionCheck {
    /// The interpolation factor.
    pub factor: HalfPowerValue,
    /// `eps(theta_n chi_0^{-1}, 1/2) prod chi(-1)^n (alpha_p^e delta_B)^{-1}`.
    pub first: HalfPowerValue,
    /// `chi_0(-1) eps(theta_{n+1} chi_0, 1/2)^{-1} prod chi(-1)^n (alpha_p^e delta_B)^{-1}`.
    pub second: HalfPowerValue,
}

impl EpsilonExpressionCheck {
    /// Whether both expressions agree with the factor.
    pub fn pass(&self) -> bool {
        self.factor == self.first && self.factor == self.second
    }

    /// JSON rendering.
    pub fn to_json(&self) -> Value {
        json!({
            "factor": self.factor.to_json(),
            "first_expression": self.first.to_json(),
            "second_expression": self.second.to_json(),
            "pass": self.pass(),
        })
    }
}

/// Compare the interpolation factor with its two epsilon-factor expressions.
/// Needs self-dual parameters and `e_0` equal to the conductor exponent at the
/// distinguished place.
pub fn epsilon_expression_check(data: &SatakeData, chi: &[LocalCharacter], e: &[u32]) -> Result<EpsilonExpressionCheck> {
    check_shapes(data, chi, e)?;
    if !data.check_self_dual() {
        return Err(Error::InvalidInput("Satake parameters are not self-dual".into()));
    }
    let c0 = chi[0].conductor();
    if c0 as u32 != e[0] {
        return Err(Error::InvalidInput(format!(
            "the epsilon-factor expressions need e_0 = conductor exponent, got e_0 = {}, c_0 = {c0}",
            e[0]
        )));
    }
    let p = data.p;
    let n = data.n;
    let factor = interpolation_factor(data, chi, e)?;
    let tail = HalfPowerValue::from_q(p, q(parity_product(chi, n))).div(&hecke_normaliser(data, e)?)?;
    let eta1 = chi[0].inverse()?.twist(&data.theta[0][n - 1]);
    let first = epsilon_factor(&eta1)?.mul(&tail);
    let eta2 = chi[0].twist(&data.theta[0][n]);
    let second = HalfPowerValue::from_q(p, q(chi[0].sign())).mul(&epsilon_factor(&eta2)?.inv()?).mul(&tail);
    Ok(EpsilonExpressionCheck { factor, first, second })
}

/// `(alpha_0/alpha_1)^{beta'} p^{beta' kappa} (1 - p^{-1}) chi(p)^{-beta'} chi_fin(-1) G(chi_fin)`.
pub fn step3_eigen_factor(
    alpha0: &HalfPowerValue,
    alpha1: &HalfPowerValue,
    beta_prime: u32,
    kappa: i64,
    chi: &LocalCharacter,
) -> Result<HalfPowerValue> {
    if beta_prime == 0 {
        return Err(Error::InvalidInput("beta' must be at least 1".into()));
    }
    if alpha1.is_zero() {
        return Err(Error::InvalidInput("alpha_1 must be nonzero".into()));
    }
    let p = alpha0.p;
    let b = beta_prime as i64;
    let g = gauss_sum(&chi.fin, chi.conductor())?;
    Ok(alpha0
        .div(alpha1)?
        .powi(b)?
        .mul(&HalfPowerValue::p_half_power(p, 2 * b * kappa))
        .mul(&HalfPowerValue::from_q(p, Q::one() - ppow(p, -1)))
        .mul(&HalfPowerValue::new(p, chi.at_p.powi(-b)?, 0))
        .mul(&HalfPowerValue::from_q(p, q(chi.sign())))
        .mul(&HalfPowerValue::from_cyclotomic(p, g)))
}

// ---------------------------------------------------------------------------
// Configuration and identity suites
// ---------------------------------------------------------------------------

/// A root of unity `zeta_order^exponent`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RootSpec {
    /// Order of the ambient root of unity.
    pub order: u64,
    /// Exponent.
    pub exponent: i64,
}

impl RootSpec {
    fn value(&self) -> Result<Laurent> {
        if self.order == 0 {
            return Err(Error::InvalidInput("root of unity order must be positive".into()));
        }
        Ok(Laurent::constant(Cyclotomic::zeta_pow(self.order, self.exponent)))
    }
}

/// A character of `Q_p^x` given by a generator exponent on `(Z/p^c)^x`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CharacterSpec {
    /// Table level `c`.
    pub level: u32,
    /// Value order `N` (must divide `phi(p^c)`).
    pub order: u64,
    /// `chi(g) = zeta_N^k` on the least primitive root `g`.
    pub k: u64,
    /// Value at `p`; formal when absent.
    #[serde(default)]
    pub at_p: Option<RootSpec>,
}

/// Input for an interpolation-factor computation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InterpConfig {
    /// The prime.
    pub p: u64,
    /// Rank parameter.
    pub n: usize,
    /// Number of components.
    pub d: usize,
    /// Exponents `e_tau`.
    pub e: Vec<u32>,
    /// One character per component, distinguished component first.
    pub characters: Vec<CharacterSpec>,
    /// Satake values `theta_{i,tau}(p)` for `i <= n`; formal when absent.
    #[serde(default)]
    pub theta: Option<Vec<Vec<RootSpec>>>,
}

impl InterpConfig {
    /// Build the characters and Satake data.
    pub fn build(&self) -> Result<(SatakeData, Vec<LocalCharacter>)> {
        crate::padic::check_prime(self.p)?;
        if self.n < 2 {
            return Err(Error::InvalidInput("n must be at least 2".into()));
        }
        if self.characters.len() != self.d || self.e.len() != self.d {
            return Err(Error::InvalidInput("need one character and one exponent per component".into()));
        }
        let chars = self
            .characters
            .iter()
            .enumerate()
            .map(|(t, cs)| {
                let fin = if cs.level == 0 {
                    PCharacter::trivial(self.p, 0)
                } else {
                    PCharacter::from_generator(self.p, cs.level, cs.order, cs.k)?
                };
                let at_p = match &cs.at_p {
                    Some(r) => r.value()?,
                    None => Laurent::symbol(&format!("chi_p_{t}"), 1),
                };
                Ok(LocalCharacter::new(fin, at_p))
            })
            .collect::<Result<Vec<_>>>()?;
        let data = match &self.theta {
            None => SatakeData::formal(self.p, self.n, self.d),
            Some(rows) => {
                let vals = rows
                    .iter()
                    .map(|r| r.iter().map(RootSpec::value).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                if vals.len() != self.d {
                    return Err(Error::InvalidInput("need Satake values for every component".into()));
                }
                SatakeData::from_values(self.p, self.n, vals)?
            }
        };
        Ok((data, chars))
    }

    /// Compute the factor and its identity checks as a JSON report.
    pub fn run(&self) -> Result<Value> {
        let (data, chars) = self.build()?;
        let value = interpolation_factor(&data, &chars, &self.e)?;
        let mut checks = vec![json!({
            "check": "satake self-duality",
            "pass": data.check_self_dual(),
        })];
        if chars[0].conductor() == self.e[0] {
            let c = epsilon_expression_check(&data, &chars, &self.e)?;
            checks.push(json!({ "check": "epsilon-factor expressions of the interpolation factor", "pass": c.pass() }));
        }
        Ok(json!({
            "value": value.to_json(),
            "p_exponent": format_q(&value.p_exponent()),
            "checks": checks,
        }))
    }
}

/// Aggregate outcome of an identity suite.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityTally {
    /// Identity name.
    pub name: String,
    /// Number of instances checked.
    pub instances: usize,
    /// Whether all instances passed.
    pub pass: bool,
    /// First failing instance.
    pub counterexample: Option<String>,
}

impl IdentityTally {
    fn new(name: &str) -> Self {
        IdentityTally { name: name.into(), instances: 0, pass: true, counterexample: None }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok && self.pass {
            self.pass = false;
            self.counterexample = Some(what());
        }
    }
}

/// All characters of conductor exactly `p^c` whose values live in `mu_{phi(p^c)}`.
pub fn primitive_characters(p: u64, c: u32) -> Result<Vec<PCharacter>> {
    Ok(PCharacter::all(p, c)?.into_iter().filter(|x| x.conductor() == c).collect())
}

/// `G(chi) G(chi^{-1}) = chi(-1) p^{c}` and `h`-independence for every primitive
/// character of conductor `p^c`, `c <= c_max`.
pub fn gauss_identities(p: u64, c_max: u32) -> Result<(IdentityTally, IdentityTally)> {
    let mut norm = IdentityTally::new("Gauss sum norm relation");
    let mut level = IdentityTally::new("Gauss sum independent of summation level");
    for c in 1..=c_max {
        for chi in primitive_characters(p, c)? {
            let g = gauss_sum(&chi, c)?;
            let gi = gauss_sum(&chi.inverse(), c)?;
            let want = Cyclotomic::from_q(g.m, q(chi.sign()) * ppow(p, c as i64));
            norm.record(g.mul(&gi) == want && !g.eq_zero(), || format!("p = {p}, c = {c}, chi = {:?}", chi.values));
            for h in c + 1..=c + 2 {
                let gh = gauss_sum(&chi, h)?;
                level.record(gh == g, || format!("p = {p}, c = {c}, h = {h}"));
            }
        }
    }
    Ok((norm, level))
}

/// `eps(eta, 1/2) eps(eta^{-1}, 1/2) = eta_fin(-1)` on fixed-seed characters.
pub fn epsilon_identities(p: u64, samples: usize, seed: u64) -> Result<IdentityTally> {
    let mut tally = IdentityTally::new("epsilon factor reciprocity");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool = primitive_characters(p, 1)?;
    pool.extend(primitive_characters(p, 2)?);
    for s in 0..samples {
        let fin = pool[rng.gen_range(0..pool.len())].clone();
        let at_p = if s % 3 == 0 {
            Laurent::symbol("eta_p", 1)
        } else {
            Laurent::constant(Cyclotomic::zeta_pow(12, rng.gen_range(0..12)))
        };
        let eta = LocalCharacter::new(fin, at_p);
        let lhs = epsilon_factor(&eta)?.mul(&epsilon_factor(&eta.inverse()?)?);
        let rhs = HalfPowerValue::from_q(p, q(eta.sign()));
        tally.record(lhs == rhs, || format!("sample {s}: character {:?}", eta.fin.values));
    }
    Ok(tally)
}

/// `delta_B(t t') = delta_B(t) delta_B(t')` on products of the `t_{p,i}`.
pub fn modulus_multiplicativity(p: u64, n: usize, samples: usize, seed: u64) -> Result<IdentityTally> {
    let mut tally = IdentityTally::new("modulus character multiplicativity");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_t = |rng: &mut ChaCha8Rng| {
        let d: Vec<Q> = (0..2 * n).map(|_| ppow(p, rng.gen_range(-3..=3))).collect();
        Mat::diag(&d)
    };
    for s in 0..samples {
        let a = random_t(&mut rng);
        let b = random_t(&mut rng);
        let lhs = modulus_delta_b(p, n, &[a.mul(&b)])?;
        let rhs = modulus_delta_b(p, n, &[a])?.mul(&modulus_delta_b(p, n, &[b])?);
        tally.record(lhs == rhs, || format!("sample {s}"));
    }
    Ok(tally)
}

/// One instance of the identity grid.
#[derive(Clone, Debug, Serialize)]
pub struct GridInstance {
    /// The prime.
    pub p: u64,
    /// Rank parameter.
    pub n: usize,
    /// Number of components.
    pub d: usize,
    /// Conductor exponents per component.
    pub conductors: Vec<u32>,
    /// Whether the Satake parameters were formal.
    pub formal: bool,
    /// Outcome.
    pub pass: bool,
}

/// Fixed-seed grid over primes, ranks, component counts, character orders and
/// Satake specialisations (formal, `+-1`, roots of unity, the central case
/// `theta_n(p) = 1`).
pub fn epsilon_expression_grid(instances: usize, seed: u64) -> Result<Vec<GridInstance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(instances);
    for s in 0..instances {
        let p = [3u64, 5, 7][s % 3];
        let n = 2 + (s / 3) % 2;
        let d = 1 + (s / 6) % 2;
        let mut chars = Vec::new();
        let mut conductors = Vec::new();
        for t in 0..d {
            let c = if t == 0 { 1 + rng.gen_range(0..2) } else { rng.gen_range(0..3) };
            let fin = if c == 0 {
                PCharacter::trivial(p, 0)
            } else {
                let pool = primitive_characters(p, c)?;
                pool[rng.gen_range(0..pool.len())].clone()
            };
            conductors.push(fin.conductor());
            let at_p = if rng.gen_bool(0.5) {
                Laurent::symbol(&format!("chi_p_{t}"), 1)
            } else {
                Laurent::constant(Cyclotomic::zeta_pow(4, rng.gen_range(0..4)))
            };
            chars.push(LocalCharacter::new(fin, at_p));
        }
        let mode = s % 4;
        let data = if mode == 0 {
            SatakeData::formal(p, n, d)
        } else {
            let rows = (0..d)
                .map(|_| {
                    (0..n)
                        .map(|i| match mode {
                            1 => Laurent::from_q(q(if rng.gen_bool(0.5) { 1 } else { -1 })),
                            2 => Laurent::constant(Cyclotomic::zeta_pow(6, rng.gen_range(0..6))),
                            _ if i == n - 1 => Laurent::from_q(Q::one()),
                            _ => Laurent::symbol(&format!("theta_{}", i + 1), 1),
                        })
                        .collect()
                })
                .collect();
            SatakeData::from_values(p, n, rows)?
        };
        let e: Vec<u32> = conductors.iter().map(|&c| c.max(1)).collect();
        let check = epsilon_expression_check(&data, &chars, &e)?;
        out.push(GridInstance { p, n, d, conductors, formal: mode == 0, pass: check.pass() });
    }
    Ok(out)
}
