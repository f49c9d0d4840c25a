//! Exact-arithmetic toolkit for the discrete graded shadows of logarithmic
//! geometry: repletion of monoid maps, log Kähler differentials, truncated
//! log cotangent complexes, truncated logarithmic Hochschild homology, and
//! toric sheaf cohomology, together with verifiers for the low-degree
//! structure theorems those constructions satisfy.
//!
//! Everything is computed over exact coefficients (arbitrary-precision
//! integers, rationals via integer ranks, or prime fields) and all outputs
//! are deterministic: identical inputs give bit-identical results regardless
//! of thread scheduling.
//!
//! Module map:
//! - [`abelian`]: integer matrices, Smith normal form, finitely generated
//!   abelian groups, homology of bounded complexes, group homology.
//! - [`monoid`]: affine monoids (finitely generated cancellative submonoids
//!   of lattices), membership, Hilbert bases, exactness and integrality of
//!   monoid maps, amalgamated sums.
//! - [`repletion`]: exactification and repletion of monoid maps, the split
//!   description, replete diagonals, and the replete bar construction.
//! - [`prelog`]: pre-log rings in a monomial grammar, log Kähler
//!   differentials, truncated cotangent homotopy, map classification.
//! - [`bar`]: the graded homological engine (cyclic/replete bar complexes,
//!   Hochschild and log Hochschild homology, HKR comparison, graded Tor,
//!   base-change and Künneth verifiers).
//! - [`toric`]: fans, dual monoids, star subdivisions, graded Čech
//!   cohomology, subdivision invariance.
//! - [`global`]: glued log schemes, Čech totalization, residue sequences,
//!   projective bundles, box-invariance, descent.
//! - [`acceptance`]: the end-to-end acceptance suite used by the CLI and the
//!   `acceptance` integration test.

pub mod abelian;
pub mod error;
pub mod monoid;
pub mod prelog;
pub mod repletion;

pub use error::{Error, Result};
