//! Quantum decision calculus over finite mode spaces.
//!
//! Actions are split into factors with disjoint modes. Picking one mode per
//! factor gives an elementary prospect, and the elementary prospects index an
//! orthonormal basis of the mind space (the tensor product of the per-factor
//! mode spaces). A prospect is a vector in that space; a state of mind is a
//! normalized vector. From these the crate computes
//!
//! * prospect probabilities `p(π) = |⟨π|ψ⟩|²`,
//! * conjunction probabilities `p(π e_α) = |⟨e_α|π⟩|² |⟨e_α|ψ⟩|²`,
//! * interference terms `q(π)`, the off-diagonal part of the expansion,
//!
//! and orders prospects by probability. The [`oracle`] module recomputes the
//! same numbers with explicit dense operators so the fast path can be checked.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod algebra;
mod error;
pub mod hilbert;
pub mod lattice;
pub mod measure;
pub mod oracle;

pub use error::{QdtError, Result};
pub use num_complex::Complex64;

/// Default tolerance for validating user-supplied data.
pub const VALIDATION_TOLERANCE: f64 = 1e-10;

/// Tolerance for identities that are exact in exact arithmetic.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

/// Tie threshold used when ranking prospects for presentation.
pub const RANKING_TIE_EPSILON: f64 = 1e-12;
