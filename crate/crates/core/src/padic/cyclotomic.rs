//! Exact arithmetic in cyclotomic fields `Q(zeta_m) = Q[X]/Phi_m(X)`.
//!
//! Elements are stored in the power basis `1, X, ..., X^{phi(m)-1}` and are
//! always fully reduced modulo `Phi_m`, so structural equality of the
//! coefficient vectors is equality in the field (after lifting both operands
//! to a common conductor).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::linalg;
use super::rational::{format_q, q, qvec, valuation, Q};
use super::ring::Ring;
use crate::error::{Error, Result};

/// Euler's totient.
pub fn euler_phi(m: u64) -> u64 {
    let mut n = m;
    let mut r = m;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            while n % d == 0 {
                n /= d;
            }
            r -= r / d;
        }
        d += 1;
    }
    if n > 1 {
        r -= r / n;
    }
    r
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    // Both monic integer polynomials, `den` divides `num`.
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quo = vec![0i64; num.len() - dd];
    for i in (0..quo.len()).rev() {
        let c = rem[i + dd];
        quo[i] = c;
        if c != 0 {
            for (j, dj) in den.iter().enumerate() {
                rem[i + j] -= c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|x| *x == 0));
    quo
}

type Cache<T> = OnceLock<Mutex<HashMap<u64, Arc<T>>>>;

static PHI_CACHE: Cache<Vec<i64>> = OnceLock::new();
static TABLE_CACHE: Cache<Vec<Vec<i64>>> = OnceLock::new();

/// The cyclotomic polynomial `Phi_m`, coefficients from low to high degree.
pub fn cyclotomic_poly(m: u64) -> Arc<Vec<i64>> {
    assert!(m >= 1);
    let cache = PHI_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&m) {
        return v.clone();
    }
    // X^m - 1 divided by Phi_d for all proper divisors d.
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in 1..m {
        if m % d == 0 {
            num = poly_div_exact(&num, &cyclotomic_poly(d));
        }
    }
    let arc = Arc::new(num);
    cache.lock().unwrap().insert(m, arc.clone());
    arc
}

/// Reduced power-basis coordinates of `X^k` for `k = 0..m`.
pub fn power_table(m: u64) -> Arc<Vec<Vec<i64>>> {
    let cache = TABLE_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&m) {
        return v.clone();
    }
    let phi = cyclotomic_poly(m);
    let d = phi.len() - 1;
    let mut table = Vec::with_capacity(m as usize);
    let mut cur = vec![0i64; d];
    cur[0] = 1;
    for _ in 0..m {
        table.push(cur.clone());
        // multiply by X and reduce
        let top = cur[d - 1];
        for i in (1..d).rev() {
            cur[i] = cur[i - 1];
        }
        cur[0] = 0;
        if top != 0 {
            for i in 0..d {
                cur[i] -= top * phi[i];
            }
        }
    }
    let arc = Arc::new(table);
    cache.lock().unwrap().insert(m, arc.clone());
    arc
}

/// Reduce an integer vector indexed by exponents of `zeta_m` (any length;
/// exponents are taken mod `m`) to power-basis coordinates.
pub fn reduce_exponent_counts(m: u64, counts: &[i64]) -> Vec<i64> {
    let table = power_table(m);
    let d = euler_phi(m) as usize;
    let mut out = vec![0i64; d];
    for (k, c) in counts.iter().enumerate() {
        if *c != 0 {
            for (o, t) in out.iter_mut().zip(&table[k % m as usize]) {
                *o += c * t;
            }
        }
    }
    out
}

/// An element of `Q(zeta_m)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Cyclotomic {
    /// Conductor of the ambient field.
    pub m: u64,
    /// Power-basis coordinates (length `phi(m)`).
    #[serde(rename = "coeffs", with = "qvec")]
    pub c: Vec<Q>,
}

impl PartialEq for Cyclotomic {
    fn eq(&self, o: &Self) -> bool {
        if self.m == o.m {
            return self.c == o.c;
        }
        let l = self.m.lcm(&o.m);
        self.lift(l).c == o.lift(l).c
    }
}

impl Cyclotomic {
    /// Zero of `Q(zeta_m)`.
    pub fn zero(m: u64) -> Self {
        Cyclotomic { m, c: vec![Q::zero(); euler_phi(m) as usize] }
    }

    /// Embedding of a rational.
    pub fn from_q(m: u64, x: Q) -> Self {
        let mut z = Self::zero(m);
        z.c[0] = x;
        z
    }

    /// One of `Q(zeta_m)`.
    pub fn one(m: u64) -> Self {
        Self::from_q(m, Q::one())
    }

    /// `zeta_m^k` for any integer `k`.
    pub fn zeta_pow(m: u64, k: i64) -> Self {
        let t = power_table(m);
        let row = &t[k.rem_euclid(m as i64) as usize];
        Cyclotomic { m, c: row.iter().map(|x| q(*x)).collect() }
    }

    /// Build from integer power-basis coordinates.
    pub fn from_ints(m: u64, coords: &[i64]) -> Self {
        Cyclotomic { m, c: coords.iter().map(|x| q(*x)).collect() }
    }

    /// Build from raw (unreduced) polynomial coefficients in `zeta_m`.
    pub fn from_poly(m: u64, poly: &[Q]) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("conductor must be positive".into()));
        }
        let t = power_table(m);
        let mut z = Self::zero(m);
        for (k, a) in poly.iter().enumerate() {
            if !a.is_zero() {
                for (o, tv) in z.c.iter_mut().zip(&t[k % m as usize]) {
                    if *tv != 0 {
                        *o += a * q(*tv);
                    }
                }
            }
        }
        Ok(z)
    }

    /// View inside `Q(zeta_{m2})`; requires `m | m2`.
    pub fn lift(&self, m2: u64) -> Self {
        assert!(m2 % self.m == 0, "cannot lift conductor {} to {}", self.m, m2);
        if m2 == self.m {
            return self.clone();
        }
        let step = (m2 / self.m) as usize;
        let poly: Vec<Q> = {
            let mut v = vec![Q::zero(); step * self.c.len()];
            for (i, a) in self.c.iter().enumerate() {
                v[i * step] = a.clone();
            }
            v
        };
        Self::from_poly(m2, &poly).expect("positive conductor")
    }

    fn aligned(&self, o: &Self) -> (Self, Self) {
        if self.m == o.m {
            (self.clone(), o.clone())
        } else {
            let l = self.m.lcm(&o.m);
            (self.lift(l), o.lift(l))
        }
    }

    /// Scalar multiple.
    pub fn scale(&self, x: &Q) -> Self {
        Cyclotomic { m: self.m, c: self.c.iter().map(|a| a * x).collect() }
    }

    /// Rational value if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<Q> {
        if self.c.iter().skip(1).all(|a| a.is_zero()) {
            Some(self.c[0].clone())
        } else {
            None
        }
    }

    /// Minimum `p`-adic valuation of the coordinates (`None` for zero).
    pub fn content_valuation(&self, p: u64) -> Option<i64> {
        self.c.iter().filter_map(|a| valuation(a, p)).min()
    }

    /// Image under the Galois automorphism `zeta_m -> zeta_m^k`, `gcd(k, m) = 1`.
    pub fn galois(&self, k: i64) -> Self {
        let t = power_table(self.m);
        let mut z = Self::zero(self.m);
        for (i, a) in self.c.iter().enumerate() {
            if !a.is_zero() {
                let e = (i as i64 * k).rem_euclid(self.m as i64) as usize;
                for (o, tv) in z.c.iter_mut().zip(&t[e]) {
                    if *tv != 0 {
                        *o += a * q(*tv);
                    }
                }
            }
        }
        z
    }

    /// Human-readable rendering, e.g. `1 + 2*z - z^3` (with `z = zeta_m`).
    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "z".into(),
                _ => format!("z^{i}"),
            };
            parts.push(if mono.is_empty() {
                format_q(a)
            } else if a.is_one() {
                mono
            } else {
                format!("{}*{}", format_q(a), mono)
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    fn mul_same(&self, o: &Self) -> Self {
        let d = self.c.len();
        let mut raw = vec![Q::zero(); 2 * d];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if !b.is_zero() {
                    raw[i + j] += a * b;
                }
            }
        }
        Self::from_poly(self.m, &raw).expect("positive conductor")
    }
}

impl Ring for Cyclotomic {
    fn zero_like(&self) -> Self {
        Self::zero(self.m)
    }
    fn one_like(&self) -> Self {
        Self::one(self.m)
    }
    fn from_q_like(&self, x: &Q) -> Option<Self> {
        Some(Self::from_q(self.m, x.clone()))
    }
    fn add(&self, o: &Self) -> Self {
        let (a, b) = self.aligned(o);
        Cyclotomic { m: a.m, c: a.c.iter().zip(&b.c).map(|(x, y)| x + y).collect() }
    }
    fn sub(&self, o: &Self) -> Self {
        let (a, b) = self.aligned(o);
        Cyclotomic { m: a.m, c: a.c.iter().zip(&b.c).map(|(x, y)| x - y).collect() }
    }
    fn mul(&self, o: &Self) -> Self {
        let (a, b) = self.aligned(o);
        a.mul_same(&b)
    }
    fn neg(&self) -> Self {
        Cyclotomic { m: self.m, c: self.c.iter().map(|x| -x).collect() }
    }
    fn eq_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }
    fn inv(&self) -> Option<Self> {
        if Ring::eq_zero(self) {
            return None;
        }
        let d = self.c.len();
        // Columns of the multiplication-by-self matrix.
        let mut cols = Vec::with_capacity(d);
        for i in 0..d {
            let mut e = Self::zero(self.m);
            e.c[i] = Q::one();
            cols.push(self.mul_same(&e).c);
        }
        let mat: Vec<Vec<Q>> = (0..d).map(|r| (0..d).map(|c| cols[c][r].clone()).collect()).collect();
        let mut rhs = vec![Q::zero(); d];
        rhs[0] = Q::one();
        linalg::solve(&mat, &rhs).map(|c| Cyclotomic { m: self.m, c })
    }
    fn is_unit(&self) -> bool {
        !Ring::eq_zero(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(*cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_poly(3), vec![1, 1, 1]);
        assert_eq!(*cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_poly(9), vec![1, 0, 0, 1, 0, 0, 1]);
        assert_eq!(*cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(euler_phi(20), 8);
    }

    #[test]
    fn roots_of_unity() {
        let z = Cyclotomic::zeta_pow(9, 1);
        assert_eq!(z.pow(9), Cyclotomic::one(9));
        assert_ne!(z.pow(3), Cyclotomic::one(9));
        // sum of all 5th roots of unity vanishes
        let s = (0..5).fold(Cyclotomic::zero(5), |acc, k| acc.add(&Cyclotomic::zeta_pow(5, k)));
        assert!(Ring::eq_zero(&s));
    }

    #[test]
    fn quadratic_gauss_sum_mod3() {
        let g = Cyclotomic::zeta_pow(3, 1).sub(&Cyclotomic::zeta_pow(3, 2));
        assert_eq!(g.mul(&g), Cyclotomic::from_q(3, q(-3)));
    }

    #[test]
    fn lifting_and_inverse() {
        let z3 = Cyclotomic::zeta_pow(3, 1);
        assert_eq!(z3.lift(12), Cyclotomic::zeta_pow(12, 4));
        assert_eq!(z3, Cyclotomic::zeta_pow(12, 4));
        let a = Cyclotomic::from_ints(5, &[2, -1, 0, 3]);
        let ai = a.inv().unwrap();
        assert_eq!(a.mul(&ai), Cyclotomic::one(5));
    }

    #[test]
    fn json_roundtrip() {
        let a = Cyclotomic::from_poly(4, &[q(1), Q::new(1.into(), 2.into())]).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"m":4,"coeffs":["1","1/2"]}"#);
        let b: Cyclotomic = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }
}
