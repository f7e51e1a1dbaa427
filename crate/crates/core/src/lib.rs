//! Homotopy types and connectivity of permutation order complexes.

pub mod complex;
pub mod error;
pub mod experiment;
pub mod homotopy;
pub mod nerve;
pub mod numerics;
pub mod permutation;
pub mod point_model;
pub mod verify;

pub use complex::{BettiVector, SimplicialComplex};
pub use error::{Error, Result};
pub use homotopy::{homotopy_type, HomotopyType};
pub use permutation::Permutation;
