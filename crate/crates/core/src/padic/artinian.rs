//! Square-zero Artinian algebras `R[T_1, ..., T_a]/(T_1^2, ..., T_a^2)`.
//!
//! Every element is a sum of square-free monomials `c_S * prod_{i in S} T_i`;
//! a monomial is encoded by the bitmask of `S`. The coefficient ring is any
//! [`Ring`] (typically `Q` or `Z/p^N`).

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use super::rational::{format_q, parse_q, Q};
use super::ring::Ring;
use crate::error::{Error, Result};

/// Maximum number of nilpotent generators (bitmask width).
pub const MAX_VARS: u32 = 63;

/// An element of `R[T_1..T_a]/(T_i^2)`.
#[derive(Clone, Debug)]
pub struct Artinian<R: Ring> {
    /// Number of nilpotent generators `a`.
    pub nvars: u32,
    zero: R,
    terms: BTreeMap<u64, R>,
}

impl<R: Ring> PartialEq for Artinian<R> {
    fn eq(&self, o: &Self) -> bool {
        self.nvars == o.nvars && self.terms == o.terms
    }
}

impl<R: Ring> Artinian<R> {
    /// The constant `c`.
    pub fn constant(nvars: u32, c: R) -> Self {
        assert!(nvars <= MAX_VARS);
        let zero = c.zero_like();
        let mut terms = BTreeMap::new();
        if !c.eq_zero() {
            terms.insert(0, c);
        }
        Artinian { nvars, zero, terms }
    }

    /// The generator `T_i` (0-based), scaled by `c`.
    pub fn var(nvars: u32, i: u32, c: R) -> Self {
        assert!(i < nvars);
        let zero = c.zero_like();
        let mut terms = BTreeMap::new();
        if !c.eq_zero() {
            terms.insert(1u64 << i, c);
        }
        Artinian { nvars, zero, terms }
    }

    /// Build from explicit `(mask, coefficient)` pairs.
    pub fn from_terms(nvars: u32, template: &R, pairs: impl IntoIterator<Item = (u64, R)>) -> Self {
        let mut out = Artinian { nvars, zero: template.zero_like(), terms: BTreeMap::new() };
        for (m, c) in pairs {
            assert!(m >> nvars == 0, "monomial mask uses an undeclared generator");
            out.add_term(m, c);
        }
        out
    }

    fn add_term(&mut self, mask: u64, c: R) {
        if c.eq_zero() {
            return;
        }
        match self.terms.get_mut(&mask) {
            Some(v) => {
                *v = v.add(&c);
                if v.eq_zero() {
                    self.terms.remove(&mask);
                }
            }
            None => {
                self.terms.insert(mask, c);
            }
        }
    }

    /// Coefficient of the monomial with the given mask.
    pub fn coeff(&self, mask: u64) -> R {
        self.terms.get(&mask).cloned().unwrap_or_else(|| self.zero.clone())
    }

    /// Constant term (image in the residue ring).
    pub fn residue(&self) -> R {
        self.coeff(0)
    }

    /// Coefficient of `T_1 T_2 ... T_a` (the full product).
    pub fn top_coeff(&self) -> R {
        self.coeff(if self.nvars == 0 { 0 } else { (1u64 << self.nvars) - 1 })
    }

    /// Nonzero terms, ordered by mask.
    pub fn terms(&self) -> impl Iterator<Item = (&u64, &R)> {
        self.terms.iter()
    }

    /// Scale by a coefficient.
    pub fn scale(&self, c: &R) -> Self {
        Self::from_terms(self.nvars, &self.zero, self.terms.iter().map(|(m, v)| (*m, v.mul(c))))
    }

    /// Map coefficients through a ring homomorphism.
    pub fn map<S: Ring>(&self, template: &S, f: impl Fn(&R) -> S) -> Artinian<S> {
        Artinian::from_terms(self.nvars, template, self.terms.iter().map(|(m, v)| (*m, f(v))))
    }
}

impl<R: Ring> Ring for Artinian<R> {
    fn zero_like(&self) -> Self {
        Artinian { nvars: self.nvars, zero: self.zero.clone(), terms: BTreeMap::new() }
    }
    fn one_like(&self) -> Self {
        Self::constant(self.nvars, self.zero.one_like())
    }
    fn from_q_like(&self, x: &Q) -> Option<Self> {
        Some(Self::constant(self.nvars, self.zero.from_q_like(x)?))
    }
    fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(*m, c.clone());
        }
        r
    }
    fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(*m, c.neg());
        }
        r
    }
    fn mul(&self, o: &Self) -> Self {
        let mut r = self.zero_like();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                if ma & mb == 0 {
                    r.add_term(ma | mb, ca.mul(cb));
                }
            }
        }
        r
    }
    fn neg(&self) -> Self {
        self.scale(&self.zero.one_like().neg())
    }
    fn eq_zero(&self) -> bool {
        self.terms.is_empty()
    }
    /// Inverse via the terminating geometric series `(c(1+n))^{-1} = c^{-1} sum (-n)^k`.
    fn inv(&self) -> Option<Self> {
        let c0 = self.residue().inv()?;
        let one = self.one_like();
        let n = self.scale(&c0).sub(&one);
        let mut acc = one.clone();
        let mut pw = one;
        for _ in 0..self.nvars {
            pw = pw.mul(&n.neg());
            if pw.eq_zero() {
                break;
            }
            acc = acc.add(&pw);
        }
        Some(acc.scale(&c0))
    }
    fn is_unit(&self) -> bool {
        self.residue().is_unit()
    }
}

fn mask_key(mask: u64) -> String {
    let idx: Vec<String> = (0..64).filter(|i| mask >> i & 1 == 1).map(|i: u32| i.to_string()).collect();
    format!("[{}]", idx.join(","))
}

fn parse_mask_key(s: &str) -> Result<u64> {
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("bad monomial key {s:?}")))?;
    let mut mask = 0u64;
    for part in inner.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let i: u32 = part.parse().map_err(|_| Error::Parse(format!("bad index {part:?}")))?;
        if i >= MAX_VARS || mask >> i & 1 == 1 {
            return Err(Error::Parse(format!("invalid or repeated generator {i} in {s:?}")));
        }
        mask |= 1 << i;
    }
    Ok(mask)
}

impl Artinian<Q> {
    /// JSON encoding: `{"nvars": a, "terms": {"[0,2]": "3/4", ...}}` with
    /// variable lists sorted increasingly.
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (mask, c) in &self.terms {
            m.insert(mask_key(*mask), Value::String(format_q(c)));
        }
        json!({"nvars": self.nvars, "terms": Value::Object(m)})
    }

    /// Inverse of [`Artinian::to_json`].
    pub fn from_json(v: &Value) -> Result<Self> {
        let nvars = v["nvars"].as_u64().ok_or_else(|| Error::Parse("missing nvars".into()))? as u32;
        if nvars > MAX_VARS {
            return Err(Error::InvalidInput(format!("at most {MAX_VARS} generators")));
        }
        let terms = v["terms"].as_object().ok_or_else(|| Error::Parse("missing terms".into()))?;
        let mut pairs = Vec::new();
        for (k, c) in terms {
            let mask = parse_mask_key(k)?;
            if mask >> nvars != 0 {
                return Err(Error::InvalidInput(format!("generator out of range in {k}")));
            }
            let c = parse_q(c.as_str().ok_or_else(|| Error::Parse("coefficient must be a string".into()))?)?;
            pairs.push((mask, c));
        }
        Ok(Artinian::from_terms(nvars, &Q::from_integer(0.into()), pairs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::rational::q;
    use crate::padic::zmod::Zmod;

    fn t(n: u32, i: u32) -> Artinian<Q> {
        Artinian::var(n, i, q(1))
    }

    #[test]
    fn nilpotency() {
        let a = t(2, 0);
        assert!(a.mul(&a).eq_zero());
        let b = t(2, 0).mul(&t(2, 1));
        assert_eq!(b.top_coeff(), q(1));
    }

    #[test]
    fn inverse() {
        let x = Artinian::constant(3, q(2)).add(&t(3, 0)).sub(&t(3, 1).mul(&t(3, 2)).scale(&q(5)));
        let y = x.inv().unwrap();
        assert_eq!(x.mul(&y), x.one_like());
        assert!(t(3, 0).inv().is_none());
    }

    #[test]
    fn modular_coefficients() {
        let one = Zmod::new(3, 2, 1).unwrap();
        let x = Artinian::constant(2, Zmod::new(3, 2, 4).unwrap()).add(&Artinian::var(2, 1, one));
        let y = x.inv().unwrap();
        assert_eq!(x.mul(&y), x.one_like());
    }

    #[test]
    fn json_roundtrip() {
        let x = Artinian::constant(3, q(1)).add(&t(3, 0).mul(&t(3, 2)).scale(&q(-2)));
        let v = x.to_json();
        assert_eq!(v["terms"]["[0,2]"], "-2");
        assert_eq!(Artinian::from_json(&v).unwrap(), x);
        assert!(parse_mask_key("[1,1]").is_err());
    }
}
