//! Dense matrices over any [`Ring`].

use serde_json::Value;

use super::artinian::Artinian;
use super::rational::{format_q, parse_q, q, valuation, Q};
use super::ring::Ring;
use crate::error::{Error, Result};

/// A dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<R: Ring> {
    /// Number of rows.
    pub rows: usize,
    /// Number of columns.
    pub cols: usize,
    /// Entries in row-major order.
    pub data: Vec<R>,
}

impl<R: Ring> Mat<R> {
    /// Build from a generating function.
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> R) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Zero matrix with entries in the ring of `template`.
    pub fn zeros(rows: usize, cols: usize, template: &R) -> Self {
        let z = template.zero_like();
        Self::from_fn(rows, cols, |_, _| z.clone())
    }

    /// Identity matrix.
    pub fn identity(n: usize, template: &R) -> Self {
        let (z, o) = (template.zero_like(), template.one_like());
        Self::from_fn(n, n, |i, j| if i == j { o.clone() } else { z.clone() })
    }

    /// Diagonal matrix.
    pub fn diag(d: &[R]) -> Self {
        let z = d[0].zero_like();
        Self::from_fn(d.len(), d.len(), |i, j| if i == j { d[i].clone() } else { z.clone() })
    }

    /// Entry `(i, j)` (0-based).
    pub fn at(&self, i: usize, j: usize) -> &R {
        &self.data[i * self.cols + j]
    }

    /// Mutable entry `(i, j)`.
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut R {
        &mut self.data[i * self.cols + j]
    }

    /// Set entry `(i, j)`.
    pub fn set(&mut self, i: usize, j: usize, v: R) {
        self.data[i * self.cols + j] = v;
    }

    /// A template element (the zero of the entry ring).
    pub fn template(&self) -> R {
        self.data[0].zero_like()
    }

    /// Matrix product.
    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "dimension mismatch in product");
        let z = self.template();
        let mut out = Self::zeros(self.rows, o.cols, &z);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.eq_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.at(k, j);
                    if !b.eq_zero() {
                        let v = out.at(i, j).add(&a.mul(b));
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    /// Entrywise sum.
    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect() }
    }

    /// Entrywise difference.
    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect() }
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &R) -> Self {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a.mul(c)).collect() }
    }

    /// Transpose.
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    /// Submatrix on the given rows and columns.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.at(rows[i], cols[j]).clone())
    }

    /// Apply a map to every entry.
    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Mat<S> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Whether every entry is zero.
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.eq_zero())
    }

    /// Inverse by Gauss-Jordan elimination with unit pivots.
    ///
    /// Over a local ring (fields, `Z/p^N`, square-zero algebras over those)
    /// a matrix is invertible iff such pivots always exist, so failure means
    /// the matrix is not a unit.
    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::InvalidInput("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n, &self.template());
        for c in 0..n {
            let pr = (c..n)
                .find(|&r| a.at(r, c).is_unit())
                .ok_or_else(|| Error::NotUnit(format!("no unit pivot in column {c}")))?;
            if pr != c {
                for j in 0..n {
                    a.data.swap(pr * n + j, c * n + j);
                    inv.data.swap(pr * n + j, c * n + j);
                }
            }
            let pinv = a.at(c, c).inv().expect("unit pivot");
            for j in 0..n {
                let v = a.at(c, j).mul(&pinv);
                a.set(c, j, v);
                let w = inv.at(c, j).mul(&pinv);
                inv.set(c, j, w);
            }
            for r in 0..n {
                if r == c || a.at(r, c).eq_zero() {
                    continue;
                }
                let f = a.at(r, c).clone();
                for j in 0..n {
                    let v = a.at(r, j).sub(&f.mul(a.at(c, j)));
                    a.set(r, j, v);
                    let w = inv.at(r, j).sub(&f.mul(inv.at(c, j)));
                    inv.set(r, j, w);
                }
            }
        }
        Ok(inv)
    }

    /// Determinant. Uses elimination with unit pivots, falling back to the
    /// Laplace expansion when no unit pivot is available.
    pub fn det(&self) -> R {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return self.data.first().map(|x| x.one_like()).expect("empty matrix has no ring");
        }
        let mut a = self.clone();
        let mut acc = self.template().one_like();
        for c in 0..n {
            let Some(pr) = (c..n).find(|&r| a.at(r, c).is_unit()) else {
                let rest: Vec<usize> = (c..n).collect();
                return acc.mul(&a.submatrix(&rest, &rest).det_laplace());
            };
            if pr != c {
                for j in 0..n {
                    a.data.swap(pr * n + j, c * n + j);
                }
                acc = acc.neg();
            }
            let piv = a.at(c, c).clone();
            acc = acc.mul(&piv);
            let pinv = piv.inv().expect("unit pivot");
            for r in c + 1..n {
                if a.at(r, c).eq_zero() {
                    continue;
                }
                let f = a.at(r, c).mul(&pinv);
                for j in c..n {
                    let v = a.at(r, j).sub(&f.mul(a.at(c, j)));
                    a.set(r, j, v);
                }
            }
        }
        acc
    }

    /// Determinant by cofactor expansion (exponential; small matrices only).
    pub fn det_laplace(&self) -> R {
        let n = self.rows;
        if n == 1 {
            return self.at(0, 0).clone();
        }
        let mut acc = self.template();
        for j in 0..n {
            let a = self.at(0, j);
            if a.eq_zero() {
                continue;
            }
            let rows: Vec<usize> = (1..n).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let t = a.mul(&self.submatrix(&rows, &cols).det_laplace());
            acc = if j % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
        }
        acc
    }

    /// Block-diagonal matrix.
    pub fn block_diag(a: &Self, b: &Self) -> Self {
        let z = a.template();
        let n = a.rows + b.rows;
        Self::from_fn(n, a.cols + b.cols, |i, j| {
            if i < a.rows && j < a.cols {
                a.at(i, j).clone()
            } else if i >= a.rows && j >= a.cols {
                b.at(i - a.rows, j - a.cols).clone()
            } else {
                z.clone()
            }
        })
    }

    /// Assemble from four blocks `[[a, b], [c, d]]`.
    pub fn blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        assert_eq!(a.rows, b.rows);
        assert_eq!(c.rows, d.rows);
        assert_eq!(a.cols, c.cols);
        assert_eq!(b.cols, d.cols);
        Self::from_fn(a.rows + c.rows, a.cols + b.cols, |i, j| match (i < a.rows, j < a.cols) {
            (true, true) => a.at(i, j).clone(),
            (true, false) => b.at(i, j - a.cols).clone(),
            (false, true) => c.at(i - a.rows, j).clone(),
            (false, false) => d.at(i - a.rows, j - a.cols).clone(),
        })
    }
}

impl<R: Ring> Mat<Artinian<R>> {
    /// Constant (residue) part, entrywise.
    pub fn residue(&self) -> Mat<R> {
        self.map(|x| x.residue())
    }

    /// Inverse via the terminating geometric series on the nilpotent part:
    /// with `M = M0 + N`, `M^{-1} = sum_k (-M0^{-1} N)^k M0^{-1}`.
    pub fn artinian_invert(&self) -> Result<Self> {
        let m0 = self.residue();
        let m0inv = m0
            .inverse()
            .map_err(|_| Error::NotUnit("residue matrix is singular".into()))?;
        let nvars = self.data[0].nvars;
        let lift = |m: &Mat<R>| m.map(|x| Artinian::constant(nvars, x.clone()));
        let m0inv_l = lift(&m0inv);
        let nil = self.sub(&lift(&m0));
        let step = m0inv_l.mul(&nil).scale(&self.template().one_like().neg());
        let mut acc = Self::identity(self.rows, &self.template());
        let mut pw = acc.clone();
        for _ in 0..nvars {
            pw = pw.mul(&step);
            if pw.is_zero() {
                break;
            }
            acc = acc.add(&pw);
        }
        Ok(acc.mul(&m0inv_l))
    }
}

impl Mat<Q> {
    /// Build from integer rows.
    pub fn from_ints(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Self::from_fn(r, c, |i, j| q(rows[i][j]))
    }

    /// Minimum `p`-adic valuation of the entries (`None` for the zero matrix).
    pub fn min_valuation(&self, p: u64) -> Option<i64> {
        self.data.iter().filter_map(|x| valuation(x, p)).min()
    }

    /// Whether all entries lie in `Z_(p)`.
    pub fn is_p_integral(&self, p: u64) -> bool {
        self.min_valuation(p).map_or(true, |v| v >= 0)
    }

    /// Whether the matrix lies in `GL_n(Z_p)`.
    pub fn in_gl_zp(&self, p: u64) -> bool {
        self.is_p_integral(p) && valuation(&self.det(), p) == Some(0)
    }

    /// JSON: list of rows of `"num/den"` strings.
    pub fn to_json(&self) -> Value {
        Value::Array(
            (0..self.rows)
                .map(|i| Value::Array((0..self.cols).map(|j| Value::String(format_q(self.at(i, j)))).collect()))
                .collect(),
        )
    }

    /// Parse from a list of rows of strings or integers.
    pub fn from_json(v: &Value) -> Result<Self> {
        let rows = v.as_array().ok_or_else(|| Error::Parse("matrix must be a list of rows".into()))?;
        let mut data = Vec::new();
        let mut cols = None;
        for r in rows {
            let r = r.as_array().ok_or_else(|| Error::Parse("row must be a list".into()))?;
            if *cols.get_or_insert(r.len()) != r.len() {
                return Err(Error::Parse("ragged matrix".into()));
            }
            for x in r {
                data.push(match x {
                    Value::String(s) => parse_q(s)?,
                    Value::Number(n) => q(n.as_i64().ok_or_else(|| Error::Parse("non-integer entry".into()))?),
                    _ => return Err(Error::Parse("bad matrix entry".into())),
                });
            }
        }
        Ok(Mat { rows: rows.len(), cols: cols.unwrap_or(0), data })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::zmod::Zmod;

    #[test]
    fn inverse_and_det() {
        let m = Mat::from_ints(&[vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 4]]);
        assert_eq!(m.det(), q(18));
        assert_eq!(m.det(), m.det_laplace());
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Mat::identity(3, &q(0)));
    }

    #[test]
    fn modular_inverse_detects_non_units() {
        let z = |v| Zmod::new(3, 2, v).unwrap();
        let m = Mat { rows: 2, cols: 2, data: vec![z(3), z(1), z(1), z(0)] };
        assert_eq!(m.mul(&m.inverse().unwrap()), Mat::identity(2, &z(0)));
        let s = Mat { rows: 2, cols: 2, data: vec![z(3), z(6), z(1), z(2)] };
        assert!(s.inverse().is_err());
        assert_eq!(s.det(), z(0));
    }

    #[test]
    fn artinian_series_matches_gauss() {
        let n = 3;
        let c = |x: i64| Artinian::constant(n, q(x));
        let t = |i: u32, x: i64| Artinian::var(n, i, q(x));
        let m = Mat {
            rows: 2,
            cols: 2,
            data: vec![c(1).add(&t(0, 1)), t(1, 2), c(3).add(&t(2, 1)), c(1)],
        };
        let a = m.artinian_invert().unwrap();
        assert_eq!(a, m.inverse().unwrap());
        assert_eq!(m.mul(&a), Mat::identity(2, &c(0)));
        let sing = Mat { rows: 1, cols: 1, data: vec![t(0, 1)] };
        assert!(matches!(sing.artinian_invert(), Err(Error::NotUnit(_))));
    }
}
