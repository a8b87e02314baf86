//! Realignment-based entanglement detection.
//!
//! Bipartite states get the realignment (CCNR) criterion, the first
//! realigned moment `t₁ = Tr[ρ P^{T_B}]`, moment-based criteria and
//! concurrence lower bounds. Three-qubit states get a realignment
//! classifier over the three single-qubit cuts.

pub mod bipartite;
pub mod cli;
pub mod criteria;
pub mod error;
pub mod estimator;
pub mod matsub;
pub mod statefile;
pub mod states;
pub mod sweep;
pub mod tripartite;

pub use error::{Error, Result};
pub use matsub::ComplexMatrix;
pub use states::{DensityMatrix, DimensionSignature};
