//! Exact computations behind a family of p-adic interpolation identities.
//!
//! The crate is organised in layers:
//!
//! * [`padic`] — rationals with valuations, `Z/p^N`, cyclotomic fields,
//!   square-zero Artinian algebras, matrices and linear algebra;
//! * [`mahler`] — Mahler expansions, weighted norms, locally constant test
//!   functions and their finite Fourier expansions;
//! * [`tate`] — derivation-twisted operators on truncated Tate algebras and
//!   the overconvergence estimate;
//! * [`glrep`] — weights, cone decompositions, Pieri expansions and the
//!   algebraic branching vectors for `GL_{2n}` Levi pairs;
//! * [`uea`] — universal enveloping algebra normal forms and the
//!   determinant-type branching operators;
//! * [`iwahori`] — Iwahori factorisations, coset combinatorics and explicit
//!   matrix identities;
//! * [`interp`] — Gauss sums, epsilon factors and the interpolation factor;
//! * [`report`] — verification suites producing deterministic JSON reports.

pub mod error;
pub mod glrep;
pub mod interp;
pub mod iwahori;
pub mod mahler;
pub mod padic;
pub mod report;
pub mod tate;
pub mod uea;

pub use error::{Error, Result};
pub use padic::{Artinian, Cyclotomic, Mat, PadicScalar, Poly, Ring, Zmod, Q};
