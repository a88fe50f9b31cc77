//! Minimal commutative-ring abstraction shared by the matrix and
//! truncated-algebra code.
//!
//! Several rings in this crate carry run-time parameters (the modulus of
//! `Z/p^N`, the conductor of a cyclotomic field, the number of nilpotent
//! generators), so constants are produced from an existing element via the
//! `*_like` constructors rather than from associated functions.

use num_traits::{One, Zero};

use super::rational::Q;

/// A commutative ring with unit whose elements know their own parameters.
pub trait Ring: Clone + PartialEq + std::fmt::Debug {
    /// The zero of the ring containing `self`.
    fn zero_like(&self) -> Self;
    /// The one of the ring containing `self`.
    fn one_like(&self) -> Self;
    /// Image of a rational number, if it exists in this ring.
    fn from_q_like(&self, x: &Q) -> Option<Self>;
    /// Sum.
    fn add(&self, o: &Self) -> Self;
    /// Difference.
    fn sub(&self, o: &Self) -> Self;
    /// Product.
    fn mul(&self, o: &Self) -> Self;
    /// Additive inverse.
    fn neg(&self) -> Self;
    /// Whether the element is zero.
    fn eq_zero(&self) -> bool;
    /// Multiplicative inverse, if the element is a unit.
    fn inv(&self) -> Option<Self>;
    /// Whether the element is a unit.
    fn is_unit(&self) -> bool {
        self.inv().is_some()
    }
    /// Integer image.
    fn from_i64_like(&self, n: i64) -> Self {
        self.from_q_like(&super::rational::q(n)).expect("integers embed in every ring")
    }
    /// Nonnegative integer power.
    fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

impl Ring for Q {
    fn zero_like(&self) -> Self {
        Q::zero()
    }
    fn one_like(&self) -> Self {
        Q::one()
    }
    fn from_q_like(&self, x: &Q) -> Option<Self> {
        Some(x.clone())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn eq_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn is_unit(&self) -> bool {
        !Zero::is_zero(self)
    }
}
