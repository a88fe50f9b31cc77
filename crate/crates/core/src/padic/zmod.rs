//! Residue rings `Z/p^N`.

use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::rational::{reduce_mod, Q};
use super::ring::Ring;
use crate::error::{Error, Result};

/// An element of `Z/p^N` stored as a canonical residue in `[0, p^N)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Zmod {
    /// Canonical residue.
    pub v: u64,
    /// The prime.
    pub p: u64,
    /// The exponent `N`.
    pub n: u32,
}

impl Zmod {
    /// The modulus `p^N`.
    pub fn modulus(&self) -> u64 {
        self.p.pow(self.n)
    }

    /// Construct from a signed integer.
    pub fn new(p: u64, n: u32, v: i128) -> Result<Self> {
        let m = checked_modulus(p, n)?;
        Ok(Zmod { v: v.rem_euclid(m as i128) as u64, p, n })
    }

    /// Reduce a `p`-integral rational.
    pub fn from_q(p: u64, n: u32, x: &Q) -> Result<Self> {
        let m = checked_modulus(p, n)?;
        Ok(Zmod { v: reduce_mod(x, p, m)?, p, n })
    }

    /// `p`-adic valuation of the residue, capped at `N` (returned for zero).
    pub fn valuation(&self) -> u32 {
        if self.v == 0 {
            return self.n;
        }
        let mut v = self.v;
        let mut k = 0;
        while v % self.p == 0 {
            v /= self.p;
            k += 1;
        }
        k
    }

    /// Signed representative in `(-p^N/2, p^N/2]`.
    pub fn signed(&self) -> i128 {
        let m = self.modulus() as i128;
        let v = self.v as i128;
        if 2 * v > m {
            v - m
        } else {
            v
        }
    }
}

/// `p^N`, checked against overflow of the 64-bit residue representation.
pub fn checked_modulus(p: u64, n: u32) -> Result<u64> {
    if p < 2 {
        return Err(Error::InvalidInput(format!("p = {p} is not a prime")));
    }
    p.checked_pow(n)
        .filter(|m| *m < (1u64 << 62))
        .ok_or_else(|| Error::Precision(format!("{p}^{n} exceeds the residue word size")))
}

impl Ring for Zmod {
    fn zero_like(&self) -> Self {
        Zmod { v: 0, ..*self }
    }
    fn one_like(&self) -> Self {
        Zmod { v: 1 % self.modulus(), ..*self }
    }
    fn from_q_like(&self, x: &Q) -> Option<Self> {
        Zmod::from_q(self.p, self.n, x).ok()
    }
    fn add(&self, o: &Self) -> Self {
        debug_assert_eq!((self.p, self.n), (o.p, o.n));
        let m = self.modulus() as u128;
        Zmod { v: ((self.v as u128 + o.v as u128) % m) as u64, ..*self }
    }
    fn sub(&self, o: &Self) -> Self {
        let m = self.modulus() as u128;
        Zmod { v: ((self.v as u128 + m - o.v as u128) % m) as u64, ..*self }
    }
    fn mul(&self, o: &Self) -> Self {
        let m = self.modulus() as u128;
        Zmod { v: ((self.v as u128 * o.v as u128) % m) as u64, ..*self }
    }
    fn neg(&self) -> Self {
        let m = self.modulus();
        Zmod { v: (m - self.v) % m, ..*self }
    }
    fn eq_zero(&self) -> bool {
        self.v == 0
    }
    fn inv(&self) -> Option<Self> {
        if self.v % self.p == 0 {
            return None;
        }
        let m = self.modulus() as i128;
        let g = (self.v as i128).extended_gcd(&m);
        Some(Zmod { v: g.x.mod_floor(&m).to_u64()?, ..*self })
    }
    fn is_unit(&self) -> bool {
        self.v % self.p != 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let a = Zmod::new(3, 2, 5).unwrap();
        let b = Zmod::new(3, 2, -1).unwrap();
        assert_eq!(b.v, 8);
        assert_eq!(a.mul(&b).v, 4);
        assert_eq!(a.inv().unwrap().mul(&a).v, 1);
        assert!(Zmod::new(3, 2, 6).unwrap().inv().is_none());
        assert_eq!(Zmod::new(3, 3, 18).unwrap().valuation(), 2);
    }
}
