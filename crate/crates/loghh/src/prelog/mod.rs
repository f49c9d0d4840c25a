//! Pre-log rings in a monomial grammar.
//!
//! A pre-log ring here is a monoid algebra over an exact coefficient ring,
//! cut down by a monomial ideal, together with a pre-log monoid mapping into
//! the monomials. Keeping every ring element monomial-supported makes all the
//! module computations graded: each graded piece is finite rank and lands in
//! the integer linear algebra layer, so no Groebner machinery is needed.

mod classify;
mod kahler;
mod transitivity;

pub use classify::{classify_map, cotangent_pi, ClassificationEvidence, MapClassification};
pub use kahler::{kahler_differentials, ModuleGenerator, PresentedModule, RelationTerm};
pub use transitivity::{transitivity_check, TransitivityReport};

use crate::abelian::{Coefficients, IntMatrix};
use crate::error::{Error, Result};
use crate::monoid::{AffineMonoid, MonoidElement, MonoidHom, SearchBounds};
use num_bigint::BigInt;
use num_traits::Zero;

/// A coefficient ring, a monoid algebra with a monomial ideal, and a pre-log
/// monoid landing in the monomials. The ring is k[M]/I where M is the target
/// of `structure`, I is generated by the monomials in `ideal`, and the
/// pre-log monoid is the source of `structure`.
#[derive(Clone, Debug)]
pub struct PreLogRing {
    pub coeff: Coefficients,
    /// Monomial generators of the defining ideal, as elements of the ring
    /// monoid. Empty for a plain monoid algebra.
    pub ideal: Vec<MonoidElement>,
    /// The pre-log structure: a monoid map from the pre-log monoid into the
    /// ring monoid, read as n |-> x^{structure(n)}.
    pub structure: MonoidHom,
}

impl PreLogRing {
    pub fn new(
        coeff: Coefficients,
        structure: MonoidHom,
        ideal: Vec<MonoidElement>,
        bounds: &SearchBounds,
    ) -> Result<PreLogRing> {
        coeff.validate()?;
        for g in &ideal {
            if !structure.target().contains(g, bounds)? {
                return Err(Error::invalid(
                    "prelog-ring",
                    "an ideal generator lies outside the ring monoid",
                ));
            }
        }
        Ok(PreLogRing { coeff, ideal, structure })
    }

    /// The canonical log structure on a monoid algebra: k[M] with pre-log
    /// monoid M mapping identically.
    pub fn canonical(coeff: Coefficients, m: &AffineMonoid) -> PreLogRing {
        PreLogRing {
            coeff,
            ideal: Vec::new(),
            structure: MonoidHom::identity(m),
        }
    }

    /// k[M] with the trivial (empty) pre-log structure.
    pub fn with_trivial_prelog(coeff: Coefficients, m: &AffineMonoid) -> PreLogRing {
        let structure = MonoidHom::new(
            AffineMonoid::trivial(),
            m.clone(),
            IntMatrix::zeros(m.ambient_rank(), 0),
        )
        .expect("the empty map into any monoid is a homomorphism");
        PreLogRing { coeff, ideal: Vec::new(), structure }
    }

    /// The coefficient ring itself, with trivial monoid and pre-log data.
    pub fn base(coeff: Coefficients) -> PreLogRing {
        PreLogRing::with_trivial_prelog(coeff, &AffineMonoid::trivial())
    }

    pub fn ring_monoid(&self) -> &AffineMonoid {
        self.structure.target()
    }

    pub fn prelog_monoid(&self) -> &AffineMonoid {
        self.structure.source()
    }

    /// The tensor product of two pre-log rings over their common coefficient
    /// ring: the monoids and pre-log monoids become block sums, the ideals
    /// are imported side by side. In the monomial grammar this is exactly
    /// k[M1 (+) M2] / (I1 + I2) with pre-log monoid N1 (+) N2.
    pub fn product(x: &PreLogRing, y: &PreLogRing, bounds: &SearchBounds) -> Result<PreLogRing> {
        if x.coeff != y.coeff {
            return Err(Error::invalid(
                "prelog-product",
                format!("coefficient rings differ: {} vs {}", x.coeff, y.coeff),
            ));
        }
        let block_sum = |a: &AffineMonoid, b: &AffineMonoid| -> Result<AffineMonoid> {
            let (da, db) = (a.ambient_rank(), b.ambient_rank());
            let mut gens: Vec<Vec<BigInt>> = Vec::new();
            for g in a.generators() {
                let mut v = g.clone();
                v.resize(da + db, BigInt::zero());
                gens.push(v);
            }
            for g in b.generators() {
                let mut v = vec![BigInt::zero(); da];
                v.extend_from_slice(g);
                gens.push(v);
            }
            AffineMonoid::new(da + db, gens)
        };
        let ring_monoid = block_sum(x.ring_monoid(), y.ring_monoid())?;
        let prelog_monoid = block_sum(x.prelog_monoid(), y.prelog_monoid())?;
        let (dmx, dmy) = (x.ring_monoid().ambient_rank(), y.ring_monoid().ambient_rank());
        let (dnx, dny) = (x.prelog_monoid().ambient_rank(), y.prelog_monoid().ambient_rank());
        let structure_matrix = IntMatrix::from_fn(dmx + dmy, dnx + dny, |i, j| {
            if i < dmx && j < dnx {
                x.structure.matrix().get(i, j).clone()
            } else if i >= dmx && j >= dnx {
                y.structure.matrix().get(i - dmx, j - dnx).clone()
            } else {
                BigInt::zero()
            }
        });
        let structure =
            MonoidHom::with_bounds(prelog_monoid, ring_monoid, structure_matrix, bounds)?;
        let mut ideal: Vec<MonoidElement> = Vec::new();
        for g in &x.ideal {
            let mut v = g.vector.clone();
            v.resize(dmx + dmy, BigInt::zero());
            ideal.push(MonoidElement::new(v));
        }
        for g in &y.ideal {
            let mut v = vec![BigInt::zero(); dmx];
            v.extend_from_slice(&g.vector);
            ideal.push(MonoidElement::new(v));
        }
        Ok(PreLogRing { coeff: x.coeff, ideal, structure })
    }

    /// Same coefficient ring, ideal, and structure map presentation.
    pub(crate) fn same_presentation(&self, other: &PreLogRing) -> bool {
        self.coeff == other.coeff
            && self.ideal == other.ideal
            && self.structure.source() == other.structure.source()
            && self.structure.target() == other.structure.target()
            && self.structure.matrix() == other.structure.matrix()
    }
}

/// A map of pre-log rings: compatible monoid maps on the ring monoids and
/// the pre-log monoids. Construction checks that the structure square
/// commutes and that the ideal maps into the ideal.
#[derive(Clone, Debug)]
pub struct PreLogMap {
    pub source: PreLogRing,
    pub target: PreLogRing,
    pub monoid_map: MonoidHom,
    pub prelog_map: MonoidHom,
}

impl PreLogMap {
    pub fn new(
        source: PreLogRing,
        target: PreLogRing,
        monoid_map: MonoidHom,
        prelog_map: MonoidHom,
        bounds: &SearchBounds,
    ) -> Result<PreLogMap> {
        if source.coeff != target.coeff {
            return Err(Error::invalid(
                "prelog-map",
                format!("coefficient rings differ: {} vs {}", source.coeff, target.coeff),
            ));
        }
        if monoid_map.source() != source.ring_monoid()
            || monoid_map.target() != target.ring_monoid()
        {
            return Err(Error::invalid(
                "prelog-map",
                "the ring-monoid map does not connect the ring monoids",
            ));
        }
        if prelog_map.source() != source.prelog_monoid()
            || prelog_map.target() != target.prelog_monoid()
        {
            return Err(Error::invalid(
                "prelog-map",
                "the pre-log map does not connect the pre-log monoids",
            ));
        }
        for g in source.prelog_monoid().generators() {
            let around = target.structure.apply_vec(&prelog_map.apply_vec(g));
            let down = monoid_map.apply_vec(&source.structure.apply_vec(g));
            if around != down {
                return Err(Error::invalid(
                    "prelog-map",
                    "the structure square does not commute on a pre-log generator",
                ));
            }
        }
        for i in &source.ideal {
            let image = MonoidElement::new(monoid_map.apply_vec(&i.vector));
            if !monomial_in_ideal(&target, &image.vector, bounds)? {
                return Err(Error::invalid(
                    "prelog-map",
                    "an ideal generator does not map into the target ideal",
                ));
            }
        }
        Ok(PreLogMap { source, target, monoid_map, prelog_map })
    }

    pub fn identity(ring: &PreLogRing) -> PreLogMap {
        PreLogMap {
            source: ring.clone(),
            target: ring.clone(),
            monoid_map: MonoidHom::identity(ring.ring_monoid()),
            prelog_map: MonoidHom::identity(ring.prelog_monoid()),
        }
    }

    /// The structure map from the bare coefficient ring into a pre-log ring.
    pub fn unit(target: &PreLogRing, bounds: &SearchBounds) -> Result<PreLogMap> {
        let source = PreLogRing::base(target.coeff);
        let monoid_map = MonoidHom::new(
            source.ring_monoid().clone(),
            target.ring_monoid().clone(),
            IntMatrix::zeros(target.ring_monoid().ambient_rank(), 0),
        )?;
        let prelog_map = MonoidHom::new(
            source.prelog_monoid().clone(),
            target.prelog_monoid().clone(),
            IntMatrix::zeros(target.prelog_monoid().ambient_rank(), 0),
        )?;
        PreLogMap::new(source, target.clone(), monoid_map, prelog_map, bounds)
    }

    /// self after other.
    pub fn compose(&self, other: &PreLogMap) -> Result<PreLogMap> {
        if !self.source.same_presentation(&other.target) {
            return Err(Error::invalid(
                "prelog-map",
                "composition needs matching middle pre-log ring",
            ));
        }
        Ok(PreLogMap {
            source: other.source.clone(),
            target: self.target.clone(),
            monoid_map: self.monoid_map.compose(&other.monoid_map)?,
            prelog_map: self.prelog_map.compose(&other.prelog_map)?,
        })
    }
}

/// Whether x^v vanishes in the quotient ring, i.e. v lies in the monomial
/// region swept out by the ideal generators.
pub(crate) fn monomial_in_ideal(
    ring: &PreLogRing,
    v: &[BigInt],
    bounds: &SearchBounds,
) -> Result<bool> {
    for gen in &ring.ideal {
        let diff: Vec<BigInt> = v.iter().zip(&gen.vector).map(|(a, b)| a - b).collect();
        if ring.ring_monoid().contains(&MonoidElement::new(diff), bounds)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// A free pre-log extension together with the inclusion of its base.
#[derive(Clone, Debug)]
pub struct FreeExtension {
    pub ring: PreLogRing,
    /// The base ring mapping into the extension.
    pub unit: PreLogMap,
    /// Names of the adjoined log variables, in ambient-coordinate order.
    pub log_labels: Vec<String>,
    /// Names of the adjoined smooth variables, in ambient-coordinate order.
    pub smooth_labels: Vec<String>,
}

/// Adjoins free log variables X and free smooth variables Y to a pre-log
/// ring: the result is k[M + N^X + N^Y] with pre-log monoid N + N^X, where
/// each log variable maps to its own monomial. The base must be a plain
/// monoid algebra; extend first, then impose monomial relations.
pub fn free_prelog(
    base: &PreLogRing,
    log_vars: &[&str],
    smooth_vars: &[&str],
    bounds: &SearchBounds,
) -> Result<FreeExtension> {
    if !base.ideal.is_empty() {
        return Err(Error::unsupported(
            "free_prelog",
            "the base carries a monomial ideal; adjoin variables before imposing relations",
        ));
    }
    let dm = base.ring_monoid().ambient_rank();
    let dn = base.prelog_monoid().ambient_rank();
    let x = log_vars.len();
    let y = smooth_vars.len();

    let pad = |v: &[BigInt], width: usize| -> Vec<BigInt> {
        let mut out = v.to_vec();
        out.resize(width, BigInt::zero());
        out
    };
    let unit_vec = |width: usize, pos: usize| -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); width];
        out[pos] = BigInt::from(1);
        out
    };

    let mut ring_gens: Vec<Vec<BigInt>> = base
        .ring_monoid()
        .generators()
        .iter()
        .map(|g| pad(g, dm + x + y))
        .collect();
    for i in 0..x + y {
        ring_gens.push(unit_vec(dm + x + y, dm + i));
    }
    let ring_monoid = AffineMonoid::new(dm + x + y, ring_gens)?;

    let mut prelog_gens: Vec<Vec<BigInt>> = base
        .prelog_monoid()
        .generators()
        .iter()
        .map(|g| pad(g, dn + x))
        .collect();
    for i in 0..x {
        prelog_gens.push(unit_vec(dn + x, dn + i));
    }
    let prelog_monoid = AffineMonoid::new(dn + x, prelog_gens)?;

    // Structure map: the base block in the corner, each log variable to its
    // own ring coordinate, smooth variables hit by nothing.
    let structure_matrix = IntMatrix::from_fn(dm + x + y, dn + x, |i, j| {
        if i < dm && j < dn {
            base.structure.matrix().get(i, j).clone()
        } else if i >= dm && j >= dn && i - dm == j - dn {
            BigInt::from(1)
        } else {
            BigInt::zero()
        }
    });
    let structure =
        MonoidHom::with_bounds(prelog_monoid, ring_monoid.clone(), structure_matrix, bounds)?;
    let ring = PreLogRing { coeff: base.coeff, ideal: Vec::new(), structure };

    let ring_incl = IntMatrix::from_fn(dm + x + y, dm, |i, j| {
        if i == j { BigInt::from(1) } else { BigInt::zero() }
    });
    let prelog_incl = IntMatrix::from_fn(dn + x, dn, |i, j| {
        if i == j { BigInt::from(1) } else { BigInt::zero() }
    });
    let unit = PreLogMap::new(
        base.clone(),
        ring.clone(),
        MonoidHom::with_bounds(
            base.ring_monoid().clone(),
            ring.ring_monoid().clone(),
            ring_incl,
            bounds,
        )?,
        MonoidHom::with_bounds(
            base.prelog_monoid().clone(),
            ring.prelog_monoid().clone(),
            prelog_incl,
            bounds,
        )?,
        bounds,
    )?;

    Ok(FreeExtension {
        ring,
        unit,
        log_labels: log_vars.iter().map(|s| s.to_string()).collect(),
        smooth_labels: smooth_vars.iter().map(|s| s.to_string()).collect(),
    })
}
