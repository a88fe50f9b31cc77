//! Weights, cone decompositions, Pieri expansions, function models of
//! irreducible representations and the algebraic branching vectors.

pub mod branch;
pub mod model;
pub mod weights;

pub use branch::{BranchVector, ComponentVector, MgPoint, MhPoint};
pub use model::{BorelSide, IrrepModel, DEFAULT_DIM_CAP};
pub use weights::{cone_decompose, pieri_decompose, weyl_dimension, ConeCoefficients, Generator, WeightData};
