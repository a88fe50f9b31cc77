//! Explicit function models of irreducible representations of `GL_m`.
//!
//! A vector of the model is a function `g -> det(g)^e P(g)` with `P` a
//! polynomial in the matrix entries `x_{ac}` (variable index `a * m + c`).
//! The group acts by left translation, `(h f)(g) = f(h^{-1} g)`, so the
//! elementary matrix `E_ab` acts by
//! `det^e (-e delta_ab P - sum_c x_{bc} dP/dx_{ac})`.

use std::collections::{BTreeMap, VecDeque};

use num_traits::{One, Zero};
use serde::Serialize;

use super::weights::{is_dominant, perm_sign, permutations, weyl_dimension};
use crate::error::{Error, Result};
use crate::padic::poly::Mono;
use crate::padic::{Mat, Poly, Ring, Q};

/// Default cap on model dimensions.
pub const DEFAULT_DIM_CAP: u64 = 500;

/// Which Borel subgroup the functions are equivariant for on the right.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BorelSide {
    /// `f(gb) = (w^max lambda)(b^{-1}) f(g)` for upper-triangular `b`;
    /// generated by the lowest-weight product of leading minors.
    Upper,
    /// `f(gb) = lambda(b^{-1}) f(g)` for lower-triangular `b`; generated by
    /// the highest-weight product of trailing principal minors.
    Lower,
}

/// An irreducible representation of `GL_m` realised as functions on the group.
#[derive(Clone, Debug)]
pub struct IrrepModel {
    /// Matrix size.
    pub m: usize,
    /// Highest weight.
    pub lambda: Vec<i64>,
    /// Determinant exponent `e = -lambda_1`.
    pub det_exp: i64,
    /// Right equivariance convention.
    pub side: BorelSide,
    /// Basis polynomials `P_l` (the functions are `det^e P_l`).
    pub basis: Vec<Poly>,
    /// Pivot monomial of each basis polynomial (coefficient 1 there, 0 in
    /// all other basis polynomials of the same weight).
    pub pivots: Vec<Mono>,
    /// Torus weight of each basis vector.
    pub weights: Vec<Vec<i64>>,
    by_weight: BTreeMap<Vec<i64>, Vec<usize>>,
}

/// The minor with the given rows and columns as a polynomial in `m * m` variables.
pub fn minor_poly(m: usize, rows: &[usize], cols: &[usize]) -> Poly {
    let k = rows.len();
    let mut out = Poly::zero(m * m);
    for perm in permutations(k) {
        let mut e = vec![0u8; m * m];
        for (i, &pi) in perm.iter().enumerate() {
            e[rows[i] * m + cols[pi]] += 1;
        }
        out.add_term(e.into_boxed_slice(), Q::from_integer(perm_sign(&perm).into()));
    }
    out
}

impl IrrepModel {
    /// Build the model of highest weight `lambda` by closure of the extremal
    /// minor monomial under the root operators.
    pub fn build(lambda: &[i64], side: BorelSide, cap: u64) -> Result<Self> {
        let m = lambda.len();
        if m == 0 {
            return Err(Error::InvalidInput("empty weight".into()));
        }
        if !is_dominant(lambda) {
            return Err(Error::InvalidInput(format!("weight {lambda:?} is not dominant")));
        }
        let expected = weyl_dimension(lambda);
        if expected > cap {
            return Err(Error::Budget(format!("model dimension {expected} exceeds the cap {cap}")));
        }
        let mut f0 = Poly::constant(m * m, Q::one());
        for k in 1..m {
            let c = lambda[m - k - 1] - lambda[m - k];
            if c == 0 {
                continue;
            }
            let idx: Vec<usize> = match side {
                BorelSide::Upper => (0..k).collect(),
                BorelSide::Lower => (m - k..m).collect(),
            };
            f0 = f0.mul(&minor_poly(m, &idx, &idx).pow(c as u32));
        }
        let mut model = IrrepModel {
            m,
            lambda: lambda.to_vec(),
            det_exp: -lambda[0],
            side,
            basis: vec![],
            pivots: vec![],
            weights: vec![],
            by_weight: BTreeMap::new(),
        };
        let mut queue = VecDeque::new();
        model.insert(f0.clone());
        queue.push_back(f0);
        while let Some(v) = queue.pop_front() {
            for a in 0..m.saturating_sub(1) {
                for (r, s) in [(a, a + 1), (a + 1, a)] {
                    let mut img = model.act_poly(r, s, &v);
                    if img.is_zero() {
                        continue;
                    }
                    model.reduce(&mut img);
                    if !img.is_zero() {
                        if model.basis.len() as u64 >= cap {
                            return Err(Error::Budget(format!("model closure exceeded the cap {cap}")));
                        }
                        model.insert(img.clone());
                        queue.push_back(img);
                    }
                }
            }
        }
        if model.basis.len() as u64 != expected {
            return Err(Error::Falsified(format!(
                "model of {lambda:?} closed at dimension {} but the Weyl dimension is {expected}",
                model.basis.len()
            )));
        }
        Ok(model)
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Torus weight of a monomial.
    pub fn mono_weight(&self, mono: &[u8]) -> Vec<i64> {
        (0..self.m)
            .map(|a| -self.det_exp - mono[a * self.m..(a + 1) * self.m].iter().map(|x| *x as i64).sum::<i64>())
            .collect()
    }

    /// Weight of a (weight-homogeneous) polynomial.
    fn poly_weight(&self, p: &Poly) -> Vec<i64> {
        let (mono, _) = p.terms.iter().next().expect("nonzero polynomial");
        self.mono_weight(mono)
    }

    /// Action of `E_ab` on the polynomial part.
    pub fn act_poly(&self, a: usize, b: usize, p: &Poly) -> Poly {
        let m = self.m;
        let mut out = Poly::zero(m * m);
        if a == b && self.det_exp != 0 {
            out.axpy(&Q::from_integer((-self.det_exp).into()), p);
        }
        for (mono, c) in &p.terms {
            for col in 0..m {
                let e = mono[a * m + col];
                if e == 0 {
                    continue;
                }
                let mut nm = mono.clone();
                nm[a * m + col] -= 1;
                nm[b * m + col] += 1;
                out.add_term(nm, -(c * Q::from_integer((e as i64).into())));
            }
        }
        out
    }

    fn reduce(&self, v: &mut Poly) {
        if v.is_zero() {
            return;
        }
        let w = self.poly_weight(v);
        if let Some(ids) = self.by_weight.get(&w) {
            for &i in ids {
                let c = v.coeff(&self.pivots[i]);
                if !c.is_zero() {
                    v.axpy(&-c, &self.basis[i]);
                }
            }
        }
    }

    fn insert(&mut self, v: Poly) {
        let w = self.poly_weight(&v);
        let (pivot, lead) = v.leading().map(|(m, c)| (m.clone(), c.clone())).expect("nonzero vector");
        let v = v.scale(&lead.recip());
        let ids = self.by_weight.entry(w.clone()).or_default();
        for &i in ids.iter() {
            let c = self.basis[i].coeff(&pivot);
            if !c.is_zero() {
                self.basis[i].axpy(&-c, &v);
            }
        }
        ids.push(self.basis.len());
        self.basis.push(v);
        self.pivots.push(pivot);
        self.weights.push(w);
    }

    /// Coordinates of a polynomial in the basis (sparse); errors if it is
    /// not in the span.
    pub fn coords(&self, p: &Poly) -> Result<Vec<(usize, Q)>> {
        if p.is_zero() {
            return Ok(vec![]);
        }
        let w = self.poly_weight(p);
        let ids = self.by_weight.get(&w).cloned().unwrap_or_default();
        let out: Vec<(usize, Q)> =
            ids.iter().map(|&i| (i, p.coeff(&self.pivots[i]))).filter(|(_, c)| !c.is_zero()).collect();
        let mut r = p.clone();
        for (i, c) in &out {
            r.axpy(&-c.clone(), &self.basis[*i]);
        }
        if !r.is_zero() {
            return Err(Error::Falsified(format!("vector of weight {w:?} lies outside the model span")));
        }
        Ok(out)
    }

    /// Coordinates of `E_ab` applied to basis vector `l`.
    pub fn act_coords(&self, a: usize, b: usize, l: usize) -> Result<Vec<(usize, Q)>> {
        self.coords(&self.act_poly(a, b, &self.basis[l]))
    }

    /// Basis vector indices of a given weight.
    pub fn weight_space(&self, w: &[i64]) -> Vec<usize> {
        self.by_weight.get(w).cloned().unwrap_or_default()
    }

    /// All weights occurring, with multiplicities.
    pub fn weight_multiplicities(&self) -> Vec<(Vec<i64>, usize)> {
        self.by_weight.iter().map(|(w, v)| (w.clone(), v.len())).collect()
    }

    /// Evaluate every basis function at a group element.
    pub fn eval_all<R: Ring>(&self, g: &Mat<R>) -> Result<Vec<R>> {
        if g.rows != self.m || g.cols != self.m {
            return Err(Error::InvalidInput(format!("expected a {0}x{0} matrix", self.m)));
        }
        let entries: Vec<R> = (0..self.m * self.m).map(|i| g.at(i / self.m, i % self.m).clone()).collect();
        let dfac = det_power(g, self.det_exp)?;
        Ok(self.basis.iter().map(|p| p.eval(&entries).mul(&dfac)).collect())
    }

    /// Evaluate selected basis functions at a group element.
    pub fn eval_selected<R: Ring>(&self, g: &Mat<R>, idx: &[usize]) -> Result<Vec<R>> {
        if g.rows != self.m || g.cols != self.m {
            return Err(Error::InvalidInput(format!("expected a {0}x{0} matrix", self.m)));
        }
        let entries: Vec<R> = (0..self.m * self.m).map(|i| g.at(i / self.m, i % self.m).clone()).collect();
        let dfac = det_power(g, self.det_exp)?;
        Ok(idx.iter().map(|&l| self.basis[l].eval(&entries).mul(&dfac)).collect())
    }

    /// Closure certificate: every root operator maps the basis into the span.
    pub fn verify_closure(&self) -> Result<()> {
        for l in 0..self.dim() {
            for a in 0..self.m {
                for b in 0..self.m {
                    self.act_coords(a, b, l)?;
                }
            }
        }
        Ok(())
    }
}

/// `det(g)^e` for any integer `e`; negative exponents require a unit determinant.
pub fn det_power<R: Ring>(g: &Mat<R>, e: i64) -> Result<R> {
    let d = g.det();
    if e >= 0 {
        return Ok(d.pow(e as u64));
    }
    let inv = d.inv().ok_or_else(|| Error::NotUnit("determinant is not invertible".into()))?;
    Ok(inv.pow((-e) as u64))
}
