//! Sparse multivariate polynomials over `Q` with dense exponent vectors.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::rational::{q, Q};
use super::ring::Ring;

/// Exponent vector of a monomial.
pub type Mono = Box<[u8]>;

/// A polynomial in `nvars` commuting variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    /// Number of variables.
    pub nvars: usize,
    /// Nonzero terms keyed by exponent vector.
    pub terms: BTreeMap<Mono, Q>,
}

impl Poly {
    /// The zero polynomial.
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    /// A constant.
    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0u8; nvars].into_boxed_slice(), c);
        p
    }

    /// The variable `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0u8; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e.into_boxed_slice(), Q::one());
        p
    }

    /// Add `c * mono` in place.
    pub fn add_term(&mut self, mono: Mono, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&mono) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&mono);
                }
            }
            None => {
                self.terms.insert(mono, c);
            }
        }
    }

    /// Whether the polynomial is zero.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of a monomial.
    pub fn coeff(&self, mono: &[u8]) -> Q {
        self.terms.get(mono).cloned().unwrap_or_else(Q::zero)
    }

    /// `self + c * other`, in place.
    pub fn axpy(&mut self, c: &Q, other: &Poly) {
        if c.is_zero() {
            return;
        }
        for (m, v) in &other.terms {
            self.add_term(m.clone(), c * v);
        }
    }

    /// Sum.
    pub fn add(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        r.axpy(&Q::one(), o);
        r
    }

    /// Difference.
    pub fn sub(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        r.axpy(&-Q::one(), o);
        r
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    /// Product.
    pub fn mul(&self, o: &Poly) -> Poly {
        let mut r = Poly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let m: Mono = ma.iter().zip(mb.iter()).map(|(a, b)| a + b).collect();
                r.add_term(m, ca * cb);
            }
        }
        r
    }

    /// Nonnegative power.
    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::constant(self.nvars, Q::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Partial derivative in `x_i`.
    pub fn derivative(&self, i: usize) -> Poly {
        let mut r = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            if m[i] > 0 {
                let mut e = m.clone();
                e[i] -= 1;
                r.add_term(e, c * q(m[i] as i64));
            }
        }
        r
    }

    /// Total degree (`None` for zero).
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.iter().map(|x| *x as u32).sum()).max()
    }

    /// Leading (largest) monomial in the map order.
    pub fn leading(&self) -> Option<(&Mono, &Q)> {
        self.terms.iter().next_back()
    }

    /// Evaluate at a point of any ring.
    pub fn eval<R: Ring>(&self, point: &[R]) -> R {
        assert_eq!(point.len(), self.nvars);
        let template = point.first().map(|x| x.zero_like());
        let Some(z) = template else {
            panic!("cannot evaluate a polynomial in zero variables without a ring");
        };
        let mut cache: Vec<Vec<R>> = vec![vec![]; self.nvars];
        let mut acc = z.clone();
        for (m, c) in &self.terms {
            let mut t = z.from_q_like(c).expect("coefficient must map into the evaluation ring");
            for (i, e) in m.iter().enumerate() {
                if *e == 0 {
                    continue;
                }
                let pw = &mut cache[i];
                if pw.is_empty() {
                    pw.push(z.one_like());
                }
                while pw.len() <= *e as usize {
                    let nxt = pw.last().unwrap().mul(&point[i]);
                    pw.push(nxt);
                }
                t = t.mul(&pw[*e as usize]);
            }
            acc = acc.add(&t);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_derivative() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = x.add(&y).pow(2);
        assert_eq!(p.terms.len(), 3);
        let dx = p.derivative(0);
        assert_eq!(dx, x.scale(&q(2)).add(&y.scale(&q(2))));
        assert_eq!(p.eval(&[q(1), q(2)]), q(9));
        assert_eq!(p.degree(), Some(2));
    }
}
