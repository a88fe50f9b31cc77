//! Weights of the Levi pair, the cone of admissible weights and its
//! generators, Pieri expansions and Weyl-character bookkeeping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{Mat, Poly, Q};
use num_traits::{One, Zero};

/// A character `(kappa, j)` of `T x S` for `d` components of `GL_{2n}`.
///
/// `kappa[t][i]` is `kappa_{i+1, t}` (0-based storage of the 1-based index).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightData {
    /// Half rank.
    pub n: usize,
    /// Number of components.
    pub d: usize,
    /// Distinguished component.
    #[serde(default)]
    pub tau0: usize,
    /// Weight of the similitude factor.
    #[serde(default)]
    pub kappa0: i64,
    /// `kappa_{1..2n, tau}` per component.
    pub kappa: Vec<Vec<i64>>,
    /// `j_tau` per component.
    pub j: Vec<i64>,
}

/// Coefficients in the generator decomposition of a cone weight.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeCoefficients {
    /// Coefficient of `mu_0`.
    pub a0: i64,
    /// Coefficient of `mu_w`.
    pub aw: i64,
    /// Coefficient of `mu_{n+1, tau0}`.
    pub a_np1: i64,
    /// `a[t][i-1]` is the coefficient of `mu_{i, t}`, `i = 1..n`.
    pub a: Vec<Vec<i64>>,
    /// `b[t]` is the coefficient of `(mu_{n, t}, 1_t)`.
    pub b: Vec<i64>,
}

/// A generator of the cone (as a weight with its `j` part).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Generator {
    /// `mu_0`.
    Mu0,
    /// `mu_w`.
    MuW,
    /// `mu_{n+1, tau0}`.
    MuNp1,
    /// `mu_{i, t}` (1-based `i`).
    Mu(usize, usize),
    /// `(mu_{n, t}, 1_t)`.
    MuJ(usize),
}

impl WeightData {
    /// `kappa_{i, t}` with the 1-based index `i`.
    pub fn k(&self, t: usize, i: usize) -> i64 {
        self.kappa[t][i - 1]
    }

    /// The zero weight.
    pub fn zero(n: usize, d: usize, tau0: usize) -> Self {
        WeightData { n, d, tau0, kappa0: 0, kappa: vec![vec![0; 2 * n]; d], j: vec![0; d] }
    }

    /// `w = kappa_{2,tau0} + kappa_{2n,tau0}`.
    pub fn w(&self) -> i64 {
        self.k(self.tau0, 2) + self.k(self.tau0, 2 * self.n)
    }

    /// Shape validation (sizes and indices), independent of cone membership.
    pub fn validate_shape(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if self.n < 2 {
            return bad("n must be at least 2".into());
        }
        if self.d == 0 || self.tau0 >= self.d {
            return bad(format!("need d >= 1 and tau0 < d (d = {}, tau0 = {})", self.d, self.tau0));
        }
        if self.kappa.len() != self.d || self.kappa.iter().any(|k| k.len() != 2 * self.n) {
            return bad(format!("kappa must be {} rows of length {}", self.d, 2 * self.n));
        }
        if self.j.len() != self.d {
            return bad(format!("j must have {} entries", self.d));
        }
        Ok(())
    }

    /// Check membership in the cone; the error names the violated condition.
    pub fn check_cone(&self) -> Result<()> {
        self.validate_shape()?;
        let n = self.n;
        let t0 = self.tau0;
        let fail = |m: String| Err(Error::InvalidInput(format!("weight outside the cone: {m}")));
        for i in 2..2 * n {
            if self.k(t0, i) < self.k(t0, i + 1) {
                return fail(format!("kappa_{{{i},tau0}} >= kappa_{{{},tau0}} fails", i + 1));
            }
        }
        for t in (0..self.d).filter(|t| *t != t0) {
            for i in 1..2 * n {
                if self.k(t, i) < self.k(t, i + 1) {
                    return fail(format!("kappa_{{{i},{t}}} >= kappa_{{{},{t}}} fails", i + 1));
                }
            }
        }
        let w = self.w();
        if w > 0 {
            return fail(format!("w = {w} must be <= 0"));
        }
        for i in 2..=n {
            if self.k(t0, i) + self.k(t0, 2 * n + 2 - i) != w {
                return fail(format!("kappa_{{{i},tau0}} + kappa_{{{},tau0}} != w", 2 * n + 2 - i));
            }
        }
        if self.k(t0, n + 1) > w {
            return fail(format!("kappa_{{{},tau0}} = {} exceeds w = {w}", n + 1, self.k(t0, n + 1)));
        }
        for t in (0..self.d).filter(|t| *t != t0) {
            for i in 1..=n {
                if self.k(t, i) + self.k(t, 2 * n + 1 - i) != 0 {
                    return fail(format!("kappa_{{{i},{t}}} + kappa_{{{},{t}}} != 0", 2 * n + 1 - i));
                }
            }
        }
        let jmax0 = self.k(t0, n + 1) - self.k(t0, n + 2);
        if self.j[t0] < 0 || self.j[t0] > jmax0 {
            return fail(format!("j_tau0 = {} outside [0, {jmax0}]", self.j[t0]));
        }
        for t in (0..self.d).filter(|t| *t != t0) {
            if self.j[t] < 0 || self.j[t] > self.k(t, n) {
                return fail(format!("j_{t} = {} outside [0, {}]", self.j[t], self.k(t, n)));
            }
        }
        Ok(())
    }

    /// Whether the weight lies in the cone.
    pub fn in_cone(&self) -> bool {
        self.check_cone().is_ok()
    }

    /// Largest admissible `j_tau0`.
    pub fn j_boundary(&self) -> i64 {
        self.k(self.tau0, self.n + 1) - self.k(self.tau0, self.n + 2)
    }

    /// The generator weight as a [`WeightData`] with the same shape.
    pub fn generator(n: usize, d: usize, tau0: usize, g: &Generator) -> WeightData {
        let mut out = WeightData::zero(n, d, tau0);
        let k0 = &mut out.kappa[tau0];
        match *g {
            Generator::Mu0 => out.kappa0 = 1,
            Generator::MuW => (n + 1..=2 * n).for_each(|i| k0[i - 1] = -1),
            Generator::MuNp1 => {
                k0[n] = -1;
                for j in 2..=n {
                    k0[j - 1] += 1;
                    k0[2 * n + 1 - j] -= 1;
                }
            }
            Generator::Mu(i, t) if t == tau0 => {
                if i == 1 {
                    k0[0] = 1;
                } else {
                    for j in 2..=i {
                        k0[j - 1] += 1;
                        k0[2 * n + 1 - j] -= 1;
                    }
                }
            }
            Generator::Mu(i, t) => {
                for j in 1..=i {
                    out.kappa[t][j - 1] += 1;
                    out.kappa[t][2 * n - j] -= 1;
                }
            }
            Generator::MuJ(t) => {
                out = WeightData::generator(n, d, tau0, &Generator::Mu(n, t));
                out.j[t] = 1;
            }
        }
        out
    }

    /// Componentwise sum `self + c * o`.
    pub fn add_scaled(&self, o: &WeightData, c: i64) -> WeightData {
        let mut r = self.clone();
        r.kappa0 += c * o.kappa0;
        for t in 0..self.d {
            for i in 0..2 * self.n {
                r.kappa[t][i] += c * o.kappa[t][i];
            }
            r.j[t] += c * o.j[t];
        }
        r
    }
}

/// Decompose a cone weight into generators.
pub fn cone_decompose(w: &WeightData) -> Result<ConeCoefficients> {
    w.check_cone()?;
    let n = w.n;
    let t0 = w.tau0;
    let mut a = vec![vec![0; n]; w.d];
    for t in 0..w.d {
        if t == t0 {
            a[t][0] = w.k(t0, 1);
            for i in 2..n {
                a[t][i - 1] = w.k(t0, i) - w.k(t0, i + 1);
            }
            a[t][n - 1] = w.k(t0, n + 1) - w.k(t0, n + 2) - w.j[t0];
        } else {
            for i in 1..n {
                a[t][i - 1] = w.k(t, i) - w.k(t, i + 1);
            }
            a[t][n - 1] = w.k(t, n) - w.j[t];
        }
    }
    Ok(ConeCoefficients {
        a0: w.kappa0,
        aw: -(w.k(t0, n) + w.k(t0, n + 2)),
        a_np1: w.k(t0, n) - w.k(t0, n + 1) + w.k(t0, n + 2),
        a,
        b: w.j.clone(),
    })
}

impl ConeCoefficients {
    /// The generator expansion as `(generator, coefficient)` pairs.
    pub fn terms(&self) -> Vec<(Generator, i64)> {
        let mut out = vec![(Generator::Mu0, self.a0), (Generator::MuW, self.aw), (Generator::MuNp1, self.a_np1)];
        for (t, row) in self.a.iter().enumerate() {
            for (i, c) in row.iter().enumerate() {
                out.push((Generator::Mu(i + 1, t), *c));
            }
        }
        for (t, c) in self.b.iter().enumerate() {
            out.push((Generator::MuJ(t), *c));
        }
        out
    }

    /// Rebuild the weight from the generators.
    pub fn reconstruct(&self, n: usize, tau0: usize) -> WeightData {
        let d = self.b.len();
        self.terms()
            .iter()
            .fold(WeightData::zero(n, d, tau0), |acc, (g, c)| acc.add_scaled(&WeightData::generator(n, d, tau0, g), *c))
    }

    /// Sign constraints: every coefficient except `a0` and `a_{1,tau0}` is nonnegative.
    pub fn signs_ok(&self, tau0: usize) -> bool {
        self.aw >= 0
            && self.a_np1 >= 0
            && self.b.iter().all(|b| *b >= 0)
            && self.a.iter().enumerate().all(|(t, row)| row.iter().enumerate().all(|(i, c)| (t == tau0 && i == 0) || *c >= 0))
    }
}

/// Whether a tuple is weakly decreasing.
pub fn is_dominant(k: &[i64]) -> bool {
    k.windows(2).all(|w| w[0] >= w[1])
}

/// Constituents of `V_kappa (x) W_{-j}` for `GL_d`, each with multiplicity one.
pub fn pieri_decompose(kappa: &[i64], j: u32) -> Result<Vec<Vec<i64>>> {
    if !is_dominant(kappa) {
        return Err(Error::InvalidInput(format!("{kappa:?} is not dominant")));
    }
    let d = kappa.len();
    let mut out = Vec::new();
    let mut t = vec![0i64; d];
    fn rec(i: usize, left: i64, kappa: &[i64], t: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        let d = kappa.len();
        if i == d - 1 {
            t[i] = left;
            out.push(kappa.iter().zip(t.iter()).map(|(k, s)| k - s).collect());
            return;
        }
        let cap = (kappa[i] - kappa[i + 1]).min(left);
        for s in 0..=cap {
            t[i] = s;
            rec(i + 1, left - s, kappa, t, out);
        }
    }
    if d == 0 {
        return Ok(vec![vec![]]);
    }
    rec(0, j as i64, kappa, &mut t, &mut out);
    out.sort();
    out.reverse();
    Ok(out)
}

/// Weyl dimension formula `prod_{i<j} (l_i - l_j + j - i)/(j - i)`.
pub fn weyl_dimension(l: &[i64]) -> u64 {
    let m = l.len();
    let mut num = Q::one();
    for i in 0..m {
        for j in i + 1..m {
            num *= Q::from_integer((l[i] - l[j] + (j - i) as i64).into()) / Q::from_integer(((j - i) as i64).into());
        }
    }
    num.to_integer().try_into().expect("dimension fits in u64")
}

/// Complete homogeneous symmetric polynomial `h_k(x_1..x_d)`.
fn complete_homogeneous(d: usize, k: i64) -> Poly {
    if k < 0 {
        return Poly::zero(d);
    }
    let mut acc = Poly::constant(d, Q::one());
    // h_k by the recursion over variables: h_k(x_1..x_i) = sum_s x_i^s h_{k-s}(x_1..x_{i-1}).
    let mut tables: Vec<Poly> = (0..=k).map(|e| if e == 0 { acc.clone() } else { Poly::zero(d) }).collect();
    for v in 0..d {
        let x = Poly::var(d, v);
        let mut next = vec![Poly::zero(d); (k + 1) as usize];
        for total in 0..=k as usize {
            let mut s = Poly::zero(d);
            let mut pw = Poly::constant(d, Q::one());
            for e in 0..=total {
                s = s.add(&pw.mul(&tables[total - e]));
                pw = pw.mul(&x);
            }
            next[total] = s;
        }
        tables = next;
    }
    acc = tables.pop().expect("k + 1 tables");
    acc
}

/// Schur polynomial of a partition (nonnegative, weakly decreasing) by Jacobi-Trudi.
pub fn schur_polynomial(lambda: &[i64]) -> Result<Poly> {
    let d = lambda.len();
    if !is_dominant(lambda) || lambda.iter().any(|x| *x < 0) {
        return Err(Error::InvalidInput(format!("{lambda:?} is not a partition")));
    }
    if d == 0 {
        return Ok(Poly::constant(0, Q::one()));
    }
    let hs: Vec<Poly> = (0..=lambda[0] + d as i64).map(|k| complete_homogeneous(d, k)).collect();
    let h = |k: i64| if k < 0 { Poly::zero(d) } else { hs[k as usize].clone() };
    // Determinant over the polynomial ring by permutation expansion (d <= 5).
    let mut acc = Poly::zero(d);
    for perm in permutations(d) {
        let sign = perm_sign(&perm);
        let mut term = Poly::constant(d, if sign > 0 { Q::one() } else { -Q::one() });
        for (i, &pj) in perm.iter().enumerate() {
            term = term.mul(&h(lambda[i] - i as i64 + pj as i64));
            if term.is_zero() {
                break;
            }
        }
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// Character of the `GL_d` irreducible of highest weight `kappa`, multiplied
/// by `(x_1 ... x_d)^shift` so that it is a polynomial.
pub fn shifted_character(kappa: &[i64], shift: i64) -> Result<Poly> {
    let l: Vec<i64> = kappa.iter().map(|k| k + shift).collect();
    schur_polynomial(&l)
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

/// Sign of a permutation.
pub fn perm_sign(p: &[usize]) -> i64 {
    let mut seen = vec![false; p.len()];
    let mut sign = 1;
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            x = p[x];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Verify the Pieri expansion against Weyl characters: returns `true` when
/// `ch(V_kappa) ch(W_{-j}) = sum ch(V_kappa')`.
pub fn pieri_character_check(kappa: &[i64], j: u32) -> Result<bool> {
    let d = kappa.len();
    let shift = -kappa.iter().copied().min().unwrap_or(0).min(0) + j as i64;
    let lhs = shifted_character(kappa, shift)?;
    let mut w = vec![0i64; d];
    if d > 0 {
        w[d - 1] = -(j as i64);
    }
    let lhs = lhs.mul(&shifted_character(&w, j as i64)?);
    let mut rhs = Poly::zero(d);
    for k in pieri_decompose(kappa, j)? {
        rhs = rhs.add(&shifted_character(&k, shift + j as i64)?);
    }
    Ok(lhs == rhs)
}

/// Convenience: `w^max` (antidiagonal permutation) of size `n`.
pub fn w_max(n: usize) -> Mat<Q> {
    Mat::from_fn(n, n, |i, j| if i + j + 1 == n { Q::one() } else { Q::zero() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wd(kappa: Vec<i64>, j: i64) -> WeightData {
        WeightData { n: kappa.len() / 2, d: 1, tau0: 0, kappa0: 0, kappa: vec![kappa], j: vec![j] }
    }

    #[test]
    fn cone_example() {
        let w = wd(vec![3, 2, -2, -3], 1);
        let c = cone_decompose(&w).unwrap();
        assert_eq!((c.a0, c.aw, c.a[0][0], c.a[0][1], c.a_np1, c.b[0]), (0, 1, 3, 0, 1, 1));
        assert_eq!(c.reconstruct(2, 0), w);
        assert!(c.signs_ok(0));
        let z = cone_decompose(&WeightData::zero(2, 1, 0)).unwrap();
        assert_eq!(z.reconstruct(2, 0), WeightData::zero(2, 1, 0));
        let bad = wd(vec![0, 0, 1, 0], 0);
        assert!(cone_decompose(&bad).is_err());
    }

    #[test]
    fn pieri_examples() {
        assert_eq!(pieri_decompose(&[2, 0], 0).unwrap(), vec![vec![2, 0]]);
        assert_eq!(pieri_decompose(&[2, 0], 1).unwrap(), vec![vec![2, -1], vec![1, 0]]);
        assert_eq!(pieri_decompose(&[1, 1, 0], 1).unwrap(), vec![vec![1, 1, -1], vec![1, 0, 0]]);
        assert!(pieri_character_check(&[2, 0], 1).unwrap());
        assert!(pieri_character_check(&[1, 0, -2], 2).unwrap());
    }

    #[test]
    fn weyl_dims() {
        assert_eq!(weyl_dimension(&[1, 0]), 2);
        assert_eq!(weyl_dimension(&[1, -2, -2]), 10);
        assert_eq!(weyl_dimension(&[2, -2, -3]), 35);
        let s = schur_polynomial(&[2, 1, 0]).unwrap();
        assert_eq!(s.eval(&[Q::one(), Q::one(), Q::one()]), Q::from_integer(8.into()));
    }

    #[test]
    fn perms() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(perm_sign(&[1, 0, 2]), -1);
        assert_eq!(perm_sign(&[1, 2, 0]), 1);
    }
}
