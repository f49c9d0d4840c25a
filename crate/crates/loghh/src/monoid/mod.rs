//! Finitely generated cancellative commutative monoids, presented as
//! submonoids of lattices by generator lists. The constructor caches a
//! splitting M = U + M_sharp (units plus sharp part) and a strictly positive
//! grading on the sharp part; membership, saturation, exactness and
//! integrality of maps, Hilbert bases, and amalgamated sums build on that.

mod affine;
mod geometry;
mod hilbert;
mod hom;
mod integrality;

pub use affine::{AffineMonoid, GroupCompletion};
pub use hilbert::hilbert_basis;
pub use hom::{amalgamated_sum, is_exact, AmalgamatedSum, MonoidHom};
pub use integrality::is_integral;

pub(crate) use hom::preimage_generators;
pub(crate) use integrality::graded_tor_complex;

use num_bigint::BigInt;

/// Element of an ambient lattice, destined for membership tests against an
/// AffineMonoid of matching ambient rank.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonoidElement {
    pub vector: Vec<BigInt>,
}

impl MonoidElement {
    pub fn new(vector: Vec<BigInt>) -> Self {
        MonoidElement { vector }
    }
}

impl From<Vec<i64>> for MonoidElement {
    fn from(v: Vec<i64>) -> Self {
        MonoidElement { vector: v.into_iter().map(BigInt::from).collect() }
    }
}

impl From<&[i64]> for MonoidElement {
    fn from(v: &[i64]) -> Self {
        MonoidElement { vector: v.iter().map(|&x| BigInt::from(x)).collect() }
    }
}

/// Outcome of a bounded decision procedure. Unknown carries the bound that
/// was exhausted, so callers can retry with a larger one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TriState {
    Yes,
    No,
    Unknown(u64),
}

impl TriState {
    pub fn is_yes(&self) -> bool {
        matches!(self, TriState::Yes)
    }

    pub fn is_no(&self) -> bool {
        matches!(self, TriState::No)
    }
}

/// Budgets for the bounded search procedures. The defaults suit desk-scale
/// examples; every CLI entry point lets callers override them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    /// Cap on the grading degree explored during membership enumeration.
    pub max_degree: u64,
    /// Half-width of the coordinate box used by enumeration fallbacks.
    pub box_radius: i64,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds { max_degree: 64, box_radius: 8 }
    }
}
