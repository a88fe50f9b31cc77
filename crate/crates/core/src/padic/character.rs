//! Finite-order characters of `Z_p^x` with values in roots of unity, and
//! their Gauss sums.
//!
//! A character of level `p^c` is stored as an exponent table: for every
//! residue `a` mod `p^c` prime to `p`, `chi(a) = zeta_N^{e(a)}` where `N` is
//! the declared order bound. Exact values live in `Q(zeta_N)`.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::cyclotomic::{euler_phi, Cyclotomic};
use super::rational::{ppow, Q};
use super::ring::Ring;
use crate::error::{ensure, Error, Result};

/// A character `chi : (Z/p^c)^x -> mu_N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PCharacter {
    /// The prime.
    pub p: u64,
    /// Level exponent `c` (the table lives on `(Z/p^c)^x`).
    pub conductor_exp: u32,
    /// Values are `N`-th roots of unity.
    pub order: u64,
    /// Exponents `e(a)` for the units `a` of `Z/p^c`, listed increasingly.
    pub values: Vec<u64>,
}

/// Units of `Z/p^c` in increasing order.
pub fn units_mod(p: u64, c: u32) -> Vec<u64> {
    let m = p.pow(c);
    if m == 1 {
        return vec![0];
    }
    (1..m).filter(|a| a % p != 0).collect()
}

/// Smallest primitive root modulo `p^c` (odd `p`).
pub fn primitive_root(p: u64, c: u32) -> Result<u64> {
    ensure(p % 2 == 1, || "primitive roots modulo powers of 2 do not exist beyond 4".into())?;
    let m = p.pow(c);
    let phi = euler_phi(m);
    let mut fac = vec![];
    let mut t = phi;
    let mut d = 2;
    while d * d <= t {
        if t % d == 0 {
            fac.push(d);
            while t % d == 0 {
                t /= d;
            }
        }
        d += 1;
    }
    if t > 1 {
        fac.push(t);
    }
    (2..m.max(3))
        .find(|g| g % p != 0 && fac.iter().all(|f| powmod(*g, phi / f, m) != 1))
        .ok_or_else(|| Error::InvalidInput(format!("no primitive root mod {m}")))
}

/// Modular exponentiation.
pub fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}

impl PCharacter {
    fn index_of(&self, a: u64) -> Option<usize> {
        let m = self.modulus();
        let a = a % m;
        if a % self.p == 0 && m > 1 {
            return None;
        }
        // units below `a`: a - floor(a/p) - 1 ... count of multiples of p in [1, a)
        Some((a - a / self.p - 1 + u64::from(a % self.p == 0)) as usize)
    }

    /// The modulus `p^c`.
    pub fn modulus(&self) -> u64 {
        self.p.pow(self.conductor_exp)
    }

    /// The trivial character at level `p^c`.
    pub fn trivial(p: u64, c: u32) -> Self {
        let n = units_mod(p, c).len();
        PCharacter { p, conductor_exp: c, order: 1, values: vec![0; n.max(1)] }
    }

    /// The character with `chi(g) = zeta_N^k` on the smallest primitive root
    /// `g` mod `p^c` (odd `p`). Requires `N | phi(p^c)`.
    pub fn from_generator(p: u64, c: u32, order: u64, k: u64) -> Result<Self> {
        ensure(c >= 1, || "level must be at least p".into())?;
        let m = p.pow(c);
        let phi = euler_phi(m);
        ensure(order >= 1 && phi % order == 0, || format!("order {order} does not divide phi({m}) = {phi}"))?;
        let g = primitive_root(p, c)?;
        let units = units_mod(p, c);
        let mut values = vec![0u64; units.len()];
        let mut x = 1u64;
        for t in 0..phi {
            let idx = units.binary_search(&x).expect("power of a unit is a unit");
            values[idx] = (t * k) % order;
            x = x * g % m;
        }
        Ok(PCharacter { p, conductor_exp: c, order, values })
    }

    /// The quadratic (Legendre) character modulo an odd prime `p`.
    pub fn quadratic(p: u64) -> Result<Self> {
        Self::from_generator(p, 1, 2, 1)
    }

    /// Every character of `(Z/p^c)^x` (odd `p`), with values in `mu_{phi(p^c)}`.
    pub fn all(p: u64, c: u32) -> Result<Vec<Self>> {
        let phi = euler_phi(p.pow(c));
        (0..phi).map(|k| Self::from_generator(p, c, phi, k)).collect()
    }

    /// Exponent of `chi(a)`, or `None` when `p | a`.
    pub fn exponent(&self, a: i64) -> Option<u64> {
        let m = self.modulus() as i64;
        let a = a.rem_euclid(m.max(1)) as u64;
        if self.conductor_exp == 0 {
            return if a % self.p == 0 && self.modulus() > 1 { None } else { Some(0) };
        }
        self.index_of(a).map(|i| self.values[i])
    }

    /// `chi(a)` in `Q(zeta_N)` (zero when `p | a`).
    pub fn value(&self, a: i64) -> Cyclotomic {
        match self.exponent(a) {
            Some(e) => Cyclotomic::zeta_pow(self.order, e as i64),
            None => Cyclotomic::zero(self.order),
        }
    }

    /// `chi(a)` for a `p`-adic unit given as a rational.
    pub fn value_q(&self, a: &Q) -> Result<Cyclotomic> {
        let m = self.modulus().max(1);
        let r = super::rational::reduce_mod(a, self.p, m.max(self.p))?;
        Ok(self.value(r as i64))
    }

    /// Inverse character.
    pub fn inverse(&self) -> Self {
        let values = self.values.iter().map(|e| (self.order - e % self.order) % self.order).collect();
        PCharacter { values, ..self.clone() }
    }

    /// Restate at a higher level `p^{c2}` (inflation).
    pub fn inflate(&self, c2: u32) -> Result<Self> {
        ensure(c2 >= self.conductor_exp, || "cannot inflate to a lower level".into())?;
        let units = units_mod(self.p, c2);
        let values = units.iter().map(|a| self.exponent(*a as i64).expect("unit")).collect();
        Ok(PCharacter { conductor_exp: c2, values, ..self.clone() })
    }

    /// Pointwise product (levels and orders are unified).
    pub fn mul(&self, o: &Self) -> Result<Self> {
        ensure(self.p == o.p, || "characters for different primes".into())?;
        let c = self.conductor_exp.max(o.conductor_exp);
        let order = self.order.lcm(&o.order);
        let (a, b) = (self.inflate(c)?, o.inflate(c)?);
        let values = a
            .values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| (x * (order / a.order) + y * (order / b.order)) % order)
            .collect();
        Ok(PCharacter { p: self.p, conductor_exp: c, order, values })
    }

    /// Whether the character is trivial.
    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|e| e % self.order == 0)
    }

    /// Exact conductor exponent: the least `f` with `chi` trivial on
    /// `1 + p^f Z_p` (`f = 0` for the trivial character).
    pub fn conductor(&self) -> u32 {
        if self.is_trivial() {
            return 0;
        }
        let m = self.modulus();
        for f in 1..=self.conductor_exp {
            let pf = self.p.pow(f);
            let trivial = (0..m / pf).all(|t| self.exponent((1 + t * pf) as i64) == Some(0));
            if trivial {
                return f;
            }
        }
        self.conductor_exp
    }

    /// `chi(-1) = +-1`.
    pub fn sign(&self) -> i64 {
        let e = self.exponent(-1).expect("-1 is a unit");
        if e == 0 {
            1
        } else {
            debug_assert_eq!(2 * e, self.order);
            -1
        }
    }
}

/// Gauss sum `G(chi) = p^{-(h - f)} sum_{a in (Z/p^h)^x} chi(a) zeta_{p^f}^a`
/// where `f` is the exact conductor exponent and `h` the table level.
/// The result lies in `Q(zeta_{lcm(N, p^f)})`.
pub fn gauss_sum(chi: &PCharacter) -> Cyclotomic {
    let f = chi.conductor();
    let pf = chi.p.pow(f);
    let h = chi.conductor_exp.max(f);
    let m = chi.order.lcm(&pf);
    let mut acc = Cyclotomic::zero(m);
    for a in units_mod(chi.p, h) {
        let e = chi.exponent(a as i64).expect("unit") as i64;
        let exp = e * (m / chi.order) as i64 + (a % pf) as i64 * (m / pf) as i64;
        acc = acc.add(&Cyclotomic::zeta_pow(m, exp));
    }
    acc.scale(&ppow(chi.p, -((h - f) as i64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::rational::q;

    #[test]
    fn legendre_mod3_and_mod5() {
        let chi = PCharacter::quadratic(3).unwrap();
        assert_eq!(chi.value(2), Cyclotomic::from_q(2, q(-1)));
        assert_eq!(chi.conductor(), 1);
        let chi5 = PCharacter::quadratic(5).unwrap();
        assert_eq!(chi5.value(4), Cyclotomic::one(2));
        assert_eq!(chi5.value(2), Cyclotomic::from_q(2, q(-1)));
    }

    #[test]
    fn gauss_sum_quadratic_mod3() {
        let g = gauss_sum(&PCharacter::quadratic(3).unwrap());
        let expected = Cyclotomic::zeta_pow(3, 1).sub(&Cyclotomic::zeta_pow(3, 2));
        assert_eq!(g, expected);
        assert_eq!(g.mul(&g), Cyclotomic::from_q(3, q(-3)));
    }

    #[test]
    fn inflation_preserves_conductor() {
        let chi = PCharacter::quadratic(5).unwrap().inflate(2).unwrap();
        assert_eq!(chi.conductor(), 1);
        assert_eq!(gauss_sum(&chi), gauss_sum(&PCharacter::quadratic(5).unwrap()));
        let all = PCharacter::all(3, 2).unwrap();
        assert_eq!(all.iter().filter(|c| c.conductor() == 2).count(), 4);
    }

    #[test]
    fn gauss_norm_identity() {
        for chi in PCharacter::all(5, 2).unwrap() {
            let f = chi.conductor();
            if f == 0 {
                continue;
            }
            let lhs = gauss_sum(&chi).mul(&gauss_sum(&chi.inverse()));
            let rhs = Cyclotomic::from_q(1, q(chi.sign() * 5i64.pow(f)));
            assert_eq!(lhs, rhs);
        }
    }
}
