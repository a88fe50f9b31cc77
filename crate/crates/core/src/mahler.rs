//! Mahler expansions of functions on `Z/p^M`, weighted Mahler norms,
//! locally constant test functions and their finite Fourier expansions.
//!
//! Continuous functions are represented by value tables on finite quotients;
//! every identity is checked pointwise on such a quotient.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{ensure, Error, Result};
use crate::padic::character::{gauss_sum, PCharacter};
use crate::padic::cyclotomic::{euler_phi, Cyclotomic};
use crate::padic::rational::{binomial, format_q, q, qi, valuation, Q};
use crate::padic::ring::Ring;

/// A function on `{0, ..., p^M - 1}` given by its value table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoxFunction {
    /// The prime.
    pub p: u64,
    /// Depth `M`.
    pub depth: u32,
    /// Values `f(0), ..., f(p^M - 1)`.
    #[serde(with = "crate::padic::rational::qvec")]
    pub values: Vec<Q>,
}

impl BoxFunction {
    /// Build a table; its length must be `p^M`.
    pub fn new(p: u64, depth: u32, values: Vec<Q>) -> Result<Self> {
        ensure(values.len() as u64 == p.pow(depth), || {
            format!("table has {} entries, expected {}^{}", values.len(), p, depth)
        })?;
        Ok(BoxFunction { p, depth, values })
    }

    /// Tabulate a function of the residue.
    pub fn tabulate(p: u64, depth: u32, f: impl Fn(u64) -> Q) -> Self {
        BoxFunction { p, depth, values: (0..p.pow(depth)).map(f).collect() }
    }
}

/// Mahler coefficients `a_0, ..., a_{K-1}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MahlerSeries {
    /// The prime used for norms.
    pub p: u64,
    /// Domain scale: the series represents `x -> sum a_k binom(p^scale x, k)` on `p^{-scale} Z_p`.
    pub scale: u32,
    /// Coefficients.
    #[serde(with = "crate::padic::rational::qvec")]
    pub coeffs: Vec<Q>,
}

/// `a_k = Delta^k f(0)` for `k < K`.
pub fn mahler_coefficients(f: &BoxFunction, k: usize) -> Result<MahlerSeries> {
    if k > f.values.len() {
        return Err(Error::Precision(format!("K = {k} exceeds the table size {}", f.values.len())));
    }
    let mut row: Vec<Q> = f.values[..k].to_vec();
    let mut coeffs = Vec::with_capacity(k);
    for _ in 0..k {
        coeffs.push(row[0].clone());
        row = row.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    Ok(MahlerSeries { p: f.p, scale: 0, coeffs })
}

/// `binom(x, k)` for a nonnegative integer `x`.
fn binom_q(x: u64, k: usize) -> Q {
    qi(binomial(x, k as u64))
}

impl MahlerSeries {
    /// Evaluate `sum_k a_k binom(x, k)` at a nonnegative integer.
    pub fn eval(&self, x: u64) -> Q {
        self.coeffs.iter().enumerate().map(|(k, a)| a * binom_q(x, k)).sum()
    }

    /// Evaluate at a point of `p^{-scale} Z`, i.e. at `p^scale x` in the unscaled variable.
    pub fn eval_scaled(&self, x: &Q) -> Result<Q> {
        let y = x * crate::padic::rational::ppow(self.p, self.scale as i64);
        ensure(y.is_integer() && y >= Q::zero(), || {
            format!("{} is not a nonnegative point of p^-{} Z", format_q(x), self.scale)
        })?;
        let y: u64 = y.to_integer().try_into().map_err(|_| Error::InvalidInput("point too large".into()))?;
        Ok(self.eval(y))
    }
}

/// Weighted norm exponent `sup_k (k eps - v_p(a_k))`; `None` encodes `-infinity`
/// (all coefficients vanish).
pub fn epsilon_norm(series: &MahlerSeries, eps: &Q) -> Option<Q> {
    series
        .coeffs
        .iter()
        .enumerate()
        .filter_map(|(k, a)| valuation(a, series.p).map(|v| q(k as i64) * eps - q(v)))
        .max()
}

/// Mahler coefficients of the product of two finite Mahler series, via
/// `binom(x,i) binom(x,j) = sum_k binom(k,i) binom(i,k-j) binom(x,k)`.
pub fn mahler_product(a: &MahlerSeries, b: &MahlerSeries) -> MahlerSeries {
    let len = (a.coeffs.len() + b.coeffs.len()).saturating_sub(1);
    let mut c = vec![Q::zero(); len];
    for (i, ai) in a.coeffs.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.coeffs.iter().enumerate() {
            if bj.is_zero() {
                continue;
            }
            for (k, ck) in c.iter_mut().enumerate().take(i + j + 1).skip(i.max(j)) {
                let coeff = binomial(k as u64, i as u64) * binomial(i as u64, (k - j) as u64);
                if coeff != BigInt::zero() {
                    *ck += ai * bj * qi(coeff);
                }
            }
        }
    }
    MahlerSeries { p: a.p, scale: a.scale, coeffs: c }
}

/// `1_{U°, chi}` at a point `(a_2, ..., a_{2n})` of
/// `U_{G,beta} = (p^{-beta} Z_p)^n + Z_p^{n-1}`, known modulo `p^M`.
///
/// Returns `chi(a_{n+1})` on `U° = Z_p^{n-1} + Z_p^x + (p Z_p)^{n-1}` and 0
/// elsewhere.
pub fn weighted_indicator(n: usize, beta: u32, chi: &PCharacter, point: &[Q], depth: u32) -> Result<Cyclotomic> {
    ensure(n >= 1 && point.len() == 2 * n - 1, || format!("point must have {} coordinates", 2 * n - 1))?;
    let p = chi.p;
    let c = chi.conductor();
    ensure(c <= beta, || format!("character conductor p^{c} does not divide p^{beta}"))?;
    if depth < c.max(1) {
        return Err(Error::Precision(format!("depth {depth} cannot resolve a character of conductor p^{c}")));
    }
    for (i, x) in point.iter().enumerate() {
        let v = valuation(x, p).unwrap_or(i64::MAX);
        let floor = if i < n { -(beta as i64) } else { 0 };
        if v < floor {
            return Err(Error::InvalidInput(format!(
                "coordinate a_{} = {} is not in the lattice of U_(G,{beta})",
                i + 2,
                format_q(x)
            )));
        }
    }
    let zero = Cyclotomic::zero(chi.order);
    let integral = |x: &Q| valuation(x, p).map_or(true, |v| v >= 0);
    let head_ok = point[..n - 1].iter().all(integral);
    let mid = &point[n - 1];
    let mid_ok = valuation(mid, p) == Some(0);
    let tail_ok = point[n..].iter().all(|x| valuation(x, p).map_or(true, |v| v >= 1));
    if head_ok && mid_ok && tail_ok {
        chi.value_q(mid)
    } else {
        Ok(zero)
    }
}

/// Outcome of a pointwise identity check on a finite quotient.
#[derive(Clone, Debug, Serialize)]
pub struct PointwiseReport {
    /// Number of points checked.
    pub points: u64,
    /// Whether both sides agreed everywhere.
    pub pass: bool,
    /// First disagreement, rendered.
    pub counterexample: Option<String>,
}

/// `f_chi(x) = chi(p^{beta'} x)` if `x in p^{-beta'} Z_p^x`, else 0, for `x = A / p^beta`.
pub fn fchi_value(beta: u32, beta_prime: u32, chi: &PCharacter, a: u64) -> Cyclotomic {
    let p = chi.p;
    let m = p.pow(2 * beta);
    let a = a % m;
    if a == 0 {
        return Cyclotomic::zero(chi.order);
    }
    let v = crate::padic::rational::int_valuation(&BigInt::from(a), p) as u32;
    if v != beta - beta_prime {
        return Cyclotomic::zero(chi.order);
    }
    chi.value((a / p.pow(beta - beta_prime)) as i64)
}

/// Verify `f_chi = (p^{beta-beta'} G(chi^{-1}))^{-1} sum_{c in (Z/p^beta)^x} chi(c)^{-1} zeta_{p^beta}^{c p^beta x}`
/// pointwise on `p^{-beta} Z / p^beta Z`.
pub fn fourier_expand_fchi(beta: u32, beta_prime: u32, chi: &PCharacter) -> Result<PointwiseReport> {
    ensure(1 <= beta_prime && beta_prime <= beta, || "need 1 <= beta' <= beta".into())?;
    if chi.conductor() != beta_prime {
        return Err(Error::InvalidInput(format!(
            "character has conductor p^{} but p^{beta_prime} was requested",
            chi.conductor()
        )));
    }
    let p = chi.p;
    let pb = p.pow(beta);
    let field = num_integer::lcm(chi.order, pb);
    let inv = chi.inverse();
    let norm = gauss_sum(&inv)
        .scale(&qi(BigInt::from(p.pow(beta - beta_prime))))
        .inv()
        .ok_or_else(|| Error::Falsified("Gauss sum vanished".into()))?;
    let units: Vec<u64> = (1..pb).filter(|c| c % p != 0).collect();
    let total = p.pow(2 * beta);
    for a in 0..total {
        let lhs = fchi_value(beta, beta_prime, chi, a).lift(field);
        let mut sum = Cyclotomic::zero(field);
        for &c in &units {
            let e = inv.exponent(c as i64).expect("unit") as i64 * (field / chi.order) as i64;
            let t = (c * a % pb) as i64 * (field / pb) as i64;
            sum = sum.add(&Cyclotomic::zeta_pow(field, e + t));
        }
        let rhs = sum.mul(&norm);
        if lhs != rhs {
            return Ok(PointwiseReport {
                points: a + 1,
                pass: false,
                counterexample: Some(format!("x = {a}/{pb}: lhs {} rhs {}", lhs.render(), rhs.render())),
            });
        }
    }
    Ok(PointwiseReport { points: total, pass: true, counterexample: None })
}

/// Reduce exponent counts of `zeta_{p^k}` to the power basis of `Q(zeta_{p^k})`
/// using `Phi_{p^k}(X) = sum_{i<p} X^{i p^{k-1}}`.
fn reduce_prime_power_counts(p: u64, k: u32, counts: &[i64]) -> Vec<i64> {
    let step = p.pow(k - 1) as usize;
    let phi = euler_phi(p.pow(k)) as usize;
    let mut out = counts[..phi].to_vec();
    for r in 0..step {
        let top = counts[(p as usize - 1) * step + r];
        if top != 0 {
            for i in 0..(p as usize - 1) {
                out[i * step + r] -= top;
            }
        }
    }
    out
}

/// Verify `1_{U_{H,beta'}} = p^{-(n-1)(beta-beta')} sum_{d in (p^{beta'} Z/p^beta)^{n-1}} zeta_{p^beta}^{sum_i d_i p^beta x_i}`
/// pointwise on `(p^{-beta} Z / Z)^{n-1}`.
pub fn fourier_expand_unit_indicator(p: u64, beta: u32, beta_prime: u32, n: usize) -> Result<PointwiseReport> {
    ensure(beta_prime <= beta, || "need beta' <= beta".into())?;
    ensure(n >= 2, || "need n >= 2".into())?;
    let pb = p.pow(beta) as usize;
    let dim = n - 1;
    let total = (pb as u64).pow(dim as u32);
    if beta == 0 {
        return Ok(PointwiseReport { points: total, pass: true, counterexample: None });
    }
    let ds: Vec<usize> = (0..pb).filter(|d| d % p.pow(beta_prime) as usize == 0).collect();
    let scale = (ds.len() as i64).pow(dim as u32);
    let mask = p.pow(beta - beta_prime) as usize;
    let mut counts = vec![0i64; pb];
    let mut next = vec![0i64; pb];
    let mut xs = vec![0usize; dim];
    for idx in 0..total {
        let mut t = idx;
        for x in xs.iter_mut() {
            *x = (t % pb as u64) as usize;
            t /= pb as u64;
        }
        counts.iter_mut().for_each(|c| *c = 0);
        counts[0] = 1;
        for &x in &xs {
            next.iter_mut().for_each(|c| *c = 0);
            for (e, c) in counts.iter().enumerate() {
                if *c != 0 {
                    for d in &ds {
                        next[(e + d * x) % pb] += c;
                    }
                }
            }
            std::mem::swap(&mut counts, &mut next);
        }
        let rhs = reduce_prime_power_counts(p, beta, &counts);
        let inside = xs.iter().all(|x| x % mask == 0);
        let lhs0 = if inside { scale } else { 0 };
        let ok = rhs[0] == lhs0 && rhs[1..].iter().all(|c| *c == 0);
        if !ok {
            return Ok(PointwiseReport {
                points: idx + 1,
                pass: false,
                counterexample: Some(format!("x = {xs:?}/{pb}: rhs numerator {rhs:?}, expected {lhs0}")),
            });
        }
    }
    Ok(PointwiseReport { points: total, pass: true, counterexample: None })
}

/// Convenience: Mahler series from integer coefficients.
pub fn series_from_ints(p: u64, a: &[i64]) -> MahlerSeries {
    MahlerSeries { p, scale: 0, coeffs: a.iter().map(|x| q(*x)).collect() }
}

/// A locally algebraic character `x -> x^k chi(x)` of `Z_p^x`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocallyAlgebraicCharacter {
    /// Algebraic exponent.
    pub k: i64,
    /// Finite-order part.
    pub finite: PCharacter,
}

impl LocallyAlgebraicCharacter {
    /// Evaluate at a rational `p`-adic unit.
    pub fn eval(&self, x: &Q) -> Result<Cyclotomic> {
        let fin = self.finite.value_q(x)?;
        ensure(!fin.eq_zero(), || format!("{} is not a p-adic unit", format_q(x)))?;
        Ok(fin.scale(&crate::padic::rational::qpow(x, self.k)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::rational::{ppow, qf};

    #[test]
    fn odd_indicator_mod4() {
        let f = BoxFunction::tabulate(2, 2, |x| q((x % 2) as i64));
        let s = mahler_coefficients(&f, 4).unwrap();
        assert_eq!(s.coeffs, vec![q(0), q(1), q(-2), q(4)]);
        assert!(mahler_coefficients(&f, 5).is_err());
    }

    #[test]
    fn trivial_series() {
        let c = BoxFunction::tabulate(3, 1, |_| q(7));
        assert_eq!(mahler_coefficients(&c, 3).unwrap().coeffs, vec![q(7), q(0), q(0)]);
        let id = BoxFunction::tabulate(3, 2, |x| q(x as i64));
        let s = mahler_coefficients(&id, 9).unwrap();
        assert_eq!(s.coeffs[1], q(1));
        assert!(s.coeffs.iter().enumerate().all(|(k, a)| k == 1 || a.is_zero()));
    }

    #[test]
    fn norms() {
        let s = MahlerSeries { p: 3, scale: 0, coeffs: (0..5).map(|k| ppow(3, k)).collect() };
        assert_eq!(epsilon_norm(&s, &q(1)), Some(q(0)));
        let s = MahlerSeries { p: 3, scale: 0, coeffs: vec![q(1), ppow(3, -1), ppow(3, -2)] };
        assert_eq!(epsilon_norm(&s, &qf(1, 2)), Some(q(3)));
        let z = series_from_ints(3, &[0, 0]);
        assert_eq!(epsilon_norm(&z, &q(1)), None);
    }

    #[test]
    fn product_matches_pointwise_product() {
        let f = BoxFunction::tabulate(3, 2, |x| q((x * x % 7) as i64));
        let g = BoxFunction::tabulate(3, 2, |x| q(x as i64 % 3 - 1));
        let fg = BoxFunction::tabulate(3, 2, |x| &f.values[x as usize] * &g.values[x as usize]);
        let a = mahler_coefficients(&f, 9).unwrap();
        let b = mahler_coefficients(&g, 9).unwrap();
        let c = mahler_product(&a, &b);
        let direct = mahler_coefficients(&fg, 9).unwrap();
        assert_eq!(&c.coeffs[..9], &direct.coeffs[..]);
    }

    #[test]
    fn indicator_values() {
        let chi = PCharacter::quadratic(3).unwrap();
        let triv = PCharacter::trivial(3, 1);
        let pt = |v: [i64; 3]| v.iter().map(|x| q(*x)).collect::<Vec<_>>();
        assert_eq!(weighted_indicator(2, 1, &triv, &pt([5, 1, 3]), 2).unwrap(), Cyclotomic::one(1));
        assert!(weighted_indicator(2, 1, &chi, &pt([5, 3, 3]), 2).unwrap().eq_zero());
        assert_eq!(weighted_indicator(2, 1, &chi, &pt([0, 2, 0]), 2).unwrap(), Cyclotomic::from_q(2, q(-1)));
        let frac = vec![qf(1, 3), q(1), q(0)];
        assert!(weighted_indicator(2, 1, &chi, &frac, 2).unwrap().eq_zero());
        let bad = vec![qf(1, 9), q(1), q(0)];
        assert!(weighted_indicator(2, 1, &chi, &bad, 2).is_err());
    }

    #[test]
    fn fourier_small() {
        let chi = PCharacter::quadratic(3).unwrap();
        let r = fourier_expand_fchi(1, 1, &chi).unwrap();
        assert!(r.pass && r.points == 9);
        let r = fourier_expand_fchi(2, 1, &chi).unwrap();
        assert!(r.pass && r.points == 81);
        assert!(fourier_expand_fchi(1, 1, &PCharacter::trivial(3, 1)).is_err());
        let r = fourier_expand_unit_indicator(3, 2, 1, 2).unwrap();
        assert!(r.pass && r.points == 9);
        assert!(fourier_expand_unit_indicator(3, 2, 2, 3).unwrap().pass);
    }

    #[test]
    fn scaled_and_algebraic() {
        let s = MahlerSeries { p: 3, scale: 1, coeffs: vec![q(0), q(1)] };
        assert_eq!(s.eval_scaled(&qf(2, 3)).unwrap(), q(2));
        assert!(s.eval_scaled(&qf(1, 9)).is_err());
        let chi = LocallyAlgebraicCharacter { k: 2, finite: PCharacter::quadratic(3).unwrap() };
        assert_eq!(chi.eval(&q(2)).unwrap(), Cyclotomic::from_q(2, q(-4)));
        assert!(chi.eval(&q(3)).is_err());
    }
}
