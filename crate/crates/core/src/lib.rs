//! Numerical toolkit for torus reductions of the Grassmannian of lines
//! `Gr(1, n)` and the Lagrangian cycles obtained by lifting real loci of the
//! reduced spaces back through the moment level sets.
//!
//! The crate is organised bottom-up:
//!
//! * [`projective`]: subspaces of `CP^n` with joins, meets and projections.
//! * [`plucker`]: Plücker coordinates, the quadratic relations and the
//!   Fubini–Study form of the Plücker space restricted to tangent vectors.
//! * [`moment`]: the coordinate torus action, its moment maps (both the
//!   max-formula and the rational Plücker formula) and Hamiltonian fields.
//! * [`reduction`]: the projection `l ↦ (l₀, s₀, …, s_{k-1})`, fiber charts,
//!   the level-set solver, samplers and the Delzant polytope.
//! * [`cycles`]: Lagrangian cycle descriptors, lifts, the finite-difference
//!   verifier and the census of cycle types.

pub mod cycles;
pub mod error;
pub mod moment;
pub mod plucker;
pub mod projective;
pub mod reduction;
pub mod rng;
pub mod tol;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dynamically sized complex column vector.
pub type CVector = nalgebra::DVector<C64>;
/// Dynamically sized complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
