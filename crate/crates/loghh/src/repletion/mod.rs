//! Exactification and repletion of monoid maps.
//!
//! For theta: N -> M the exactification is the fiber product of
//! M -> M^gp <- N^gp, realized here as the preimage monoid
//! (theta^gp)^{-1}(M) inside the group completion of N, together with the
//! inclusion of N and the projection down to M. When theta is virtually
//! surjective the exactification is the repletion. A section of theta splits
//! the repletion as M plus the quotient group N^gp/M^gp, and applying that
//! splitting levelwise to the cyclic bar construction gives the small models
//! in the `bar` submodule.

mod bar;

pub use bar::{replete_bar_level, verify_bar_iso, BarElement, BarIsoReport, RepleteBarLevel};

use crate::abelian::{
    cokernel_structure, inverse_unimodular, kernel_basis, FgAbGroup, GroupElem, IntMatrix,
    QuotientGroup,
};
use crate::error::{Error, Result};
use crate::monoid::{preimage_generators, AffineMonoid, MonoidHom, SearchBounds};
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Exactification of a monoid map theta: N -> M. The replete monoid lives in
/// the ambient lattice of N; the unit map is the identity on coordinates and
/// the projection restricts theta.
#[derive(Clone, Debug)]
pub struct Repletion {
    pub original: MonoidHom,
    pub replete_monoid: AffineMonoid,
    /// Inclusion of N into the replete monoid.
    pub unit_map: MonoidHom,
    /// Restriction of theta to the replete monoid.
    pub projection: MonoidHom,
    /// Kernel of theta^gp: the fibers of the projection over elements in the
    /// image of theta^gp are torsors under this group. Free, since it is a
    /// sublattice of N^gp; quotients with torsion only arise in the bar-level
    /// models, which carry them as annotations.
    pub fiber: FgAbGroup,
    /// Cokernel of theta^gp. Finite exactly when theta is virtually
    /// surjective, which is when the exactification is the repletion.
    pub gp_cokernel: FgAbGroup,
}

impl Repletion {
    /// Exactification and repletion agree for virtually surjective maps.
    pub fn is_repletion(&self) -> bool {
        self.original.is_virtually_surjective()
    }
}

/// Computes the exactification of theta as a submonoid of the group
/// completion of the source.
///
/// The preimage monoid is produced from a Hilbert basis when the target is
/// saturated, or by transporting the target generators when theta is an
/// isomorphism on group completions. Outside those cases no finite generating
/// set is certified and the call reports an inconclusive error carrying the
/// search bound.
pub fn exactify(theta: &MonoidHom, bounds: &SearchBounds) -> Result<Repletion> {
    let n = theta.source();
    let m = theta.target();
    let span_gens: Vec<Vec<BigInt>> = if theta.is_gp_isomorphism() {
        let inv = inverse_unimodular(theta.gp_matrix());
        m.generator_span_coords().iter().map(|c| inv.mul_vec(c)).collect()
    } else {
        match preimage_generators(theta, bounds)? {
            Some(gens) => gens,
            None => {
                return Err(Error::inconclusive(
                    "exactify",
                    bounds.max_degree,
                    "no generating set certified: the target is not saturated, or the \
                     preimage cone exceeds the supported dimension",
                ))
            }
        }
    };
    let ambient_gens: Vec<Vec<BigInt>> =
        span_gens.iter().map(|c| n.from_group_coords(c)).collect();
    let replete_monoid = AffineMonoid::new(n.ambient_rank(), ambient_gens)?;
    let unit_map = MonoidHom::with_bounds(
        n.clone(),
        replete_monoid.clone(),
        IntMatrix::identity(n.ambient_rank()),
        bounds,
    )?;
    let projection = MonoidHom::with_bounds(
        replete_monoid.clone(),
        m.clone(),
        theta.matrix().clone(),
        bounds,
    )?;
    let fiber = FgAbGroup::free(kernel_basis(theta.gp_matrix()).cols());
    let gp_cokernel = cokernel_structure(theta.gp_matrix());
    Ok(Repletion { original: theta.clone(), replete_monoid, unit_map, projection, fiber, gp_cokernel })
}

/// Split description of a repletion along a section. The element maps
/// `split` and `unsplit` are mutually inverse between the replete monoid and
/// pairs (element of M, class in N^gp/M^gp), where M^gp sits inside N^gp
/// through the section. Both extend to group isomorphisms
/// N^gp = M^gp + N^gp/M^gp, so they are defined on the whole span.
#[derive(Clone, Debug)]
pub struct RepleteSplit {
    pub repletion: Repletion,
    pub section: MonoidHom,
    /// Structure of N^gp/M^gp. Free here, because a section makes M^gp a
    /// direct summand of the lattice N^gp.
    pub group: FgAbGroup,
    class_lattice: QuotientGroup,
}

impl RepleteSplit {
    /// The quotient N^gp/M^gp in source span coordinates, for forming and
    /// comparing classes.
    pub fn class_lattice(&self) -> &QuotientGroup {
        &self.class_lattice
    }

    /// Sends an element of the replete monoid (an ambient vector of N inside
    /// the span) to its image in M and its class modulo M^gp.
    pub fn split(&self, x: &[BigInt]) -> Result<(Vec<BigInt>, GroupElem)> {
        let n = self.repletion.original.source();
        let c = n.group_coords(x).ok_or_else(|| {
            Error::invalid("replete-split", "vector outside the group completion of the source")
        })?;
        let point = self.repletion.original.apply_vec(x);
        Ok((point, self.class_lattice.project(&c)))
    }

    /// Inverse of `split`: rebuilds the element of N^gp with the given image
    /// in M and class. The result lands in the replete monoid exactly when
    /// the first component lies in M.
    pub fn unsplit(&self, point: &[BigInt], class: &GroupElem) -> Result<Vec<BigInt>> {
        let n = self.repletion.original.source();
        let m = self.repletion.original.target();
        let mc = m.group_coords(point).ok_or_else(|| {
            Error::invalid("replete-split", "vector outside the group completion of the target")
        })?;
        let base = self.section.gp_matrix().mul_vec(&mc);
        let lift = self.class_lattice.lift(class);
        // Project the lift onto the fiber direction: subtract the section of
        // its image, which does not change the class.
        let shadow = self
            .section
            .gp_matrix()
            .mul_vec(&self.repletion.original.gp_matrix().mul_vec(&lift));
        let span: Vec<BigInt> = (0..base.len())
            .map(|i| &base[i] + &lift[i] - &shadow[i])
            .collect();
        Ok(n.from_group_coords(&span))
    }
}

/// Splits the repletion of theta: N -> M along a section eta: M -> N.
///
/// The section is verified on group completions, which covers all generators.
pub fn replete_split(
    theta: &MonoidHom,
    eta: &MonoidHom,
    bounds: &SearchBounds,
) -> Result<RepleteSplit> {
    if eta.source() != theta.target() || eta.target() != theta.source() {
        return Err(Error::invalid(
            "replete-split",
            "the section must run from the target back to the source",
        ));
    }
    let composite = theta.gp_matrix().mul(eta.gp_matrix());
    let rm = theta.target().rank();
    let is_id = (0..rm).all(|i| {
        (0..rm).all(|j| {
            let want = if i == j { BigInt::one() } else { BigInt::zero() };
            *composite.get(i, j) == want
        })
    });
    if !is_id {
        return Err(Error::invalid("replete-split", "the given map is not a section"));
    }
    let repletion = exactify(theta, bounds)?;
    let class_lattice = QuotientGroup::from_relations(eta.gp_matrix());
    let group = class_lattice.structure();
    Ok(RepleteSplit { repletion, section: eta.clone(), group, class_lattice })
}

/// Repletion of the fold of the self-pushout of theta: P -> M, split along
/// the first inclusion.
#[derive(Clone, Debug)]
pub struct RepleteDiagonal {
    pub sum: crate::monoid::AmalgamatedSum,
    /// Fold map from the amalgamated sum back to M.
    pub fold: MonoidHom,
    /// Split description of the fold's repletion; its group is M^gp/P^gp.
    pub split: RepleteSplit,
}

/// Forms M +_P M for theta: P -> M, folds it back onto M, and splits the
/// repletion of the fold along the first inclusion. Errors from the
/// amalgamated sum (notably torsion in the pushout group) propagate.
pub fn replete_diagonal(theta: &MonoidHom, bounds: &SearchBounds) -> Result<RepleteDiagonal> {
    let sum = crate::monoid::amalgamated_sum(theta, theta, bounds)?;
    let m = theta.target();
    let nn = &sum.monoid;
    let l = sum.from_left.gp_matrix();
    let r = sum.from_right.gp_matrix();
    let rm = m.rank();
    let rnn = nn.rank();
    // The fold is determined on group completions by composing to the
    // identity with both inclusions; solve for its matrix row by row. The
    // system stacks the transposes of the two inclusion matrices.
    let stacked = IntMatrix::from_fn(2 * rm, rnn, |i, j| {
        if i < rm { l.get(j, i).clone() } else { r.get(j, i - rm).clone() }
    });
    let mut fold_rows: Vec<Vec<BigInt>> = Vec::with_capacity(rm);
    for i in 0..rm {
        let mut rhs = vec![BigInt::zero(); 2 * rm];
        rhs[i] = BigInt::one();
        rhs[rm + i] = BigInt::one();
        let row = crate::abelian::solve(&stacked, &rhs).ok_or_else(|| {
            Error::unsupported("replete-diagonal", "the fold admits no integral matrix")
        })?;
        fold_rows.push(row);
    }
    let fold_span = IntMatrix::from_fn(rm, rnn, |i, j| fold_rows[i][j].clone());
    // Transport from span coordinates to ambient coordinates on both sides.
    let mut cols: Vec<Vec<BigInt>> = Vec::with_capacity(nn.ambient_rank());
    for j in 0..nn.ambient_rank() {
        let mut e = vec![BigInt::zero(); nn.ambient_rank()];
        e[j] = BigInt::one();
        let c = nn
            .group_coords(&e)
            .expect("the pushout generators span their ambient lattice");
        cols.push(m.from_group_coords(&fold_span.mul_vec(&c)));
    }
    let fold_matrix =
        IntMatrix::from_fn(m.ambient_rank(), nn.ambient_rank(), |i, j| cols[j][i].clone());
    let fold = MonoidHom::with_bounds(nn.clone(), m.clone(), fold_matrix, bounds)?;
    let split = replete_split(&fold, &sum.from_left, bounds)?;
    Ok(RepleteDiagonal { sum, fold, split })
}
