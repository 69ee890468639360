//! Structure-preserving correction of almost commuting matrix pairs.
//!
//! A pair of self-adjoint matrices that almost commutes and carries a
//! reflection symmetry (real symmetric, plain complex Hermitian, or
//! self-dual) is replaced by a nearby exactly commuting pair with the same
//! symmetry. The crate provides:
//!
//! * reflections `τ` on matrix algebras and the real-part projection,
//! * the quaternion/self-dual correspondence `M_n(ℍ) ≅ Re(M_2n(ℂ), ♯)`,
//! * τ-equivariant functional calculus, self-τ polar decomposition,
//!   perturbation to invertibility and the ε-grid spectral retraction,
//! * a structure-group Jacobi solver that jointly diagonalizes a pair
//!   over ℝ, ℂ or ℍ,
//! * seeded random ensembles (GOE/GUE/GSE-like) and brute-force desk
//!   oracles used by the test suite.

pub mod ensemble;
pub mod error;
pub mod io;
pub mod matrix;
pub mod norms;
pub mod oracle;
pub mod quat;
pub mod reflect;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use matrix::CMat;
pub use reflect::{Reflection, StructuredMatrix};
