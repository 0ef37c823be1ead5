//! Exact computation of K-theoretic invariants of elementary C[0,1]-algebras.
//!
//! Everything here reduces to integer lattice algebra over arbitrary-precision
//! integers:
//!
//! - [`linalg`]: integer matrices, Hermite and Smith normal forms, lattices,
//!   kernels, cokernels and integer linear solving.
//! - [`towers`]: inverse sequences of free abelian groups, their limits and the
//!   Mittag-Leffler condition.
//! - [`algebra`]: elementary C[0,1]-algebras described by fiber K0-ranks and
//!   connecting matrices, and the K0 presheaf over combinatorial intervals.
//! - [`etheory`]: E-theory groups E_X(A, B) computed as lattices of hom tuples,
//!   boundary maps, E^1, skyscraper groups, the sheaf-morphism correspondence,
//!   composition, factorization and finite-stage intertwining.

pub mod algebra;
pub mod error;
pub mod etheory;
pub mod linalg;
pub mod towers;

pub use error::{Error, Result};
