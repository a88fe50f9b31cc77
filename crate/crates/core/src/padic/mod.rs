//! Exact scalar, ring and matrix kernels: rationals with `p`-adic
//! valuations, residue rings `Z/p^N`, cyclotomic fields, square-zero
//! Artinian algebras, dense matrices and rational linear algebra.

pub mod artinian;
pub mod character;
pub mod cyclotomic;
pub mod linalg;
pub mod matrix;
pub mod poly;
pub mod rational;
pub mod ring;
pub mod zmod;

pub use artinian::Artinian;
pub use character::{gauss_sum, PCharacter};
pub use cyclotomic::Cyclotomic;
pub use matrix::Mat;
pub use poly::Poly;
pub use rational::{PadicScalar, Q};
pub use ring::Ring;
pub use zmod::Zmod;

/// Default prime.
pub const DEFAULT_P: u64 = 3;

/// Validate a prime parameter. `p = 2` is accepted but callers are expected
/// to flag it in their output metadata.
pub fn check_prime(p: u64) -> crate::error::Result<()> {
    let is_prime = p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0);
    crate::error::ensure(is_prime, || format!("p = {p} is not prime"))
}
