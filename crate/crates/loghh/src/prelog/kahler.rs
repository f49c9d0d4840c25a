//! Log Kähler differentials as a graded presentation.
//!
//! For a map of pre-log rings the module of relative log differentials is
//! generated by d(x^g) for the ring-monoid generators and dlog(n) for the
//! pre-log generators. The finitely many structural relations are stored on
//! the presentation; the Leibniz consequences of ring-monoid relations form
//! a family indexed by monomials, so `graded_piece` reinstates them degree
//! by degree, where each instance is a row between finitely many monomials.
//! That per-degree reconstruction is exact: a relation of the ring monoid in
//! a given degree is a difference of two factorizations of some divisor of
//! that degree, and all such differences are enumerated.

use crate::abelian::{cokernel_structure, kernel_basis, rank, solve};
use crate::abelian::{Coefficients, IntMatrix, ModuleDesc};
use crate::error::{Error, Result};
use crate::monoid::AffineMonoid;
use crate::prelog::{PreLogMap, PreLogRing};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

/// A named module generator with its degree in the ring monoid's ambient
/// lattice. Differentials d(x^g) sit in degree g; dlog generators sit in
/// degree zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleGenerator {
    pub label: String,
    pub degree: Vec<BigInt>,
}

/// One summand c * x^m * (generator) of a relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationTerm {
    pub gen: usize,
    pub monomial: Vec<BigInt>,
    pub coeff: BigInt,
}

/// A module over a pre-log ring presented by labeled generators and
/// monomial-coefficient relations. Every stored relation is homogeneous;
/// `graded_piece` additionally instates the Leibniz expansions of the ring
/// monoid's own relations in the requested degree.
#[derive(Clone, Debug)]
pub struct PresentedModule {
    base: PreLogRing,
    generators: Vec<ModuleGenerator>,
    relations: Vec<Vec<RelationTerm>>,
    relation_degrees: Vec<Vec<BigInt>>,
    /// Generators below this index are the d(x^g) family, aligned with the
    /// ring monoid's generator list; the rest are dlog generators.
    d_gens: usize,
}

impl PresentedModule {
    pub(crate) fn assemble(
        base: PreLogRing,
        generators: Vec<ModuleGenerator>,
        relations: Vec<Vec<RelationTerm>>,
        d_gens: usize,
    ) -> Result<PresentedModule> {
        let ambient = base.ring_monoid().ambient_rank();
        for g in &generators {
            if g.degree.len() != ambient {
                return Err(Error::invalid("presented-module", "generator degree has wrong length"));
            }
        }
        let mut relation_degrees = Vec::with_capacity(relations.len());
        for rel in &relations {
            let Some(first) = rel.first() else {
                return Err(Error::invalid("presented-module", "empty relation"));
            };
            let degree_of = |term: &RelationTerm| -> Result<Vec<BigInt>> {
                let gen = generators
                    .get(term.gen)
                    .ok_or_else(|| Error::invalid("presented-module", "relation references a missing generator"))?;
                Ok(term.monomial.iter().zip(&gen.degree).map(|(a, b)| a + b).collect())
            };
            let degree = degree_of(first)?;
            for term in &rel[1..] {
                if degree_of(term)? != degree {
                    return Err(Error::invalid(
                        "presented-module",
                        "relation mixes terms of different degrees",
                    ));
                }
            }
            relation_degrees.push(degree);
        }
        Ok(PresentedModule { base, generators, relations, relation_degrees, d_gens })
    }

    pub fn base(&self) -> &PreLogRing {
        &self.base
    }

    pub fn generators(&self) -> &[ModuleGenerator] {
        &self.generators
    }

    pub fn relations(&self) -> &[Vec<RelationTerm>] {
        &self.relations
    }

    pub fn generator_index(&self, label: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.label == label)
    }

    /// The graded piece in the given ambient degree, over the ring's
    /// coefficients. Exact: columns are the generators whose coefficient
    /// monomial survives in the quotient ring, rows are the translated
    /// structural relations plus every factorization difference of every
    /// divisor of the degree.
    pub fn graded_piece(&self, degree: &[BigInt]) -> Result<ModuleDesc> {
        let Some((columns, mat)) = self.graded_presentation(degree)? else {
            return Ok(ModuleDesc::zero());
        };
        Ok(match self.base.coeff {
            Coefficients::Integer => {
                let g = cokernel_structure(&mat);
                ModuleDesc { rank: g.free_rank, torsion: g.invariant_factors }
            }
            Coefficients::Rational => ModuleDesc::free(columns.len() - rank(&mat)),
            Coefficients::PrimeField(p) => ModuleDesc::free(columns.len() - mat.rank_mod_p(p)),
        })
    }

    /// The integer presentation behind `graded_piece`: the indices of the
    /// generators alive in the degree, and the relation matrix whose rows
    /// match those indices and whose columns are the relation instances.
    /// None when the piece is zero for lack of live generators.
    pub(crate) fn graded_presentation(
        &self,
        degree: &[BigInt],
    ) -> Result<Option<(Vec<usize>, IntMatrix)>> {
        let m = self.base.ring_monoid();
        if degree.len() != m.ambient_rank() {
            return Err(Error::invalid("graded_piece", "degree has wrong length"));
        }
        if !m.is_sharp() {
            return Err(Error::unsupported(
                "graded_piece",
                "the ring monoid has units; graded evaluation needs a sharp ring monoid",
            ));
        }
        let view = SharpView::build(&self.base)?;
        let Some(mu) = view.to_sharp(degree) else {
            return Ok(None);
        };

        let mut columns: Vec<usize> = Vec::new();
        for (i, g) in self.generators.iter().enumerate() {
            let Some(delta) = view.to_sharp(&g.degree) else {
                continue;
            };
            let shifted: Vec<BigInt> = mu.iter().zip(&delta).map(|(a, b)| a - b).collect();
            if view.alive(&shifted)? {
                columns.push(i);
            }
        }
        if columns.is_empty() {
            return Ok(None);
        }
        let position = |gen: usize| columns.iter().position(|&c| c == gen);

        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        for (rel, rel_degree) in self.relations.iter().zip(&self.relation_degrees) {
            let t: Vec<BigInt> = degree.iter().zip(rel_degree).map(|(a, b)| a - b).collect();
            let Some(ts) = view.to_sharp(&t) else {
                continue;
            };
            if !view.alive(&ts)? {
                continue;
            }
            let mut row = vec![BigInt::zero(); columns.len()];
            let mut nonzero = false;
            for term in rel {
                if let Some(pos) = position(term.gen) {
                    row[pos] += &term.coeff;
                    nonzero = true;
                }
            }
            if nonzero {
                rows.push(row);
            }
        }

        // Leibniz rows from the ring monoid's relations: for every divisor of
        // the degree with more than one factorization, the differences of the
        // factorization count vectors relate the d-generators.
        let grade = view.grade_as_u64(&mu)?;
        for divisor in m.sharp_elements_up_to(grade) {
            let t: Vec<BigInt> = mu.iter().zip(&divisor).map(|(a, b)| a - b).collect();
            if !view.alive(&t)? {
                continue;
            }
            let factorizations = view.factorizations(&divisor);
            if factorizations.len() < 2 {
                continue;
            }
            let base_counts = &factorizations[0];
            for f in &factorizations[1..] {
                let mut row = vec![BigInt::zero(); columns.len()];
                let mut nonzero = false;
                for (j, (&cf, &cb)) in f.iter().zip(base_counts).enumerate() {
                    if cf == cb {
                        continue;
                    }
                    let gen = view.gen_lookup[j];
                    debug_assert!(gen < self.d_gens);
                    if let Some(pos) = position(gen) {
                        row[pos] += BigInt::from(cf) - BigInt::from(cb);
                        nonzero = true;
                    }
                }
                if nonzero {
                    rows.push(row);
                }
            }
        }

        let mat = IntMatrix::from_fn(columns.len(), rows.len(), |i, j| rows[j][i].clone());
        Ok(Some((columns, mat)))
    }
}

/// Membership and factorization for a sharp ring monoid, in the coordinates
/// of its sharp lattice, with the ideal translated along.
struct SharpView<'a> {
    m: &'a AffineMonoid,
    ideal: Vec<Vec<BigInt>>,
    /// Maps a sharp-generator index to the ring-monoid generator index.
    gen_lookup: Vec<usize>,
}

impl<'a> SharpView<'a> {
    fn build(ring: &'a PreLogRing) -> Result<SharpView<'a>> {
        let m = ring.ring_monoid();
        let mut ideal = Vec::with_capacity(ring.ideal.len());
        for gen in &ring.ideal {
            let s = m
                .sharp_coords(&gen.vector)
                .ok_or_else(|| Error::invalid("graded_piece", "ideal generator outside the monoid span"))?;
            ideal.push(s);
        }
        let sharp = m.sharp_data();
        let mut gen_lookup = Vec::with_capacity(sharp.gens.len());
        for sg in &sharp.gens {
            let i = m
                .generators()
                .iter()
                .position(|g| m.sharp_coords(g).as_deref() == Some(sg.as_slice()))
                .ok_or_else(|| Error::invalid("graded_piece", "sharp generator without a preimage"))?;
            gen_lookup.push(i);
        }
        Ok(SharpView { m, ideal, gen_lookup })
    }

    fn to_sharp(&self, ambient: &[BigInt]) -> Option<Vec<BigInt>> {
        self.m.sharp_coords(ambient)
    }

    fn grade_as_u64(&self, x: &[BigInt]) -> Result<u64> {
        self.m.sharp_data().grade(x).to_u64().ok_or_else(|| {
            Error::scale("graded_piece", "degree grading exceeds the machine range")
        })
    }

    /// Exact membership; self-bounding, since descent only ever lowers the
    /// grading of the queried element.
    fn member(&self, x: &[BigInt]) -> Result<bool> {
        let sharp = self.m.sharp_data();
        if x.iter().all(|c| c.is_zero()) {
            return Ok(true);
        }
        if !sharp.in_cone(x) {
            return Ok(false);
        }
        let cap = self.grade_as_u64(x)? + 1;
        sharp.generated_membership(x, cap)
    }

    fn in_ideal(&self, x: &[BigInt]) -> Result<bool> {
        for i in &self.ideal {
            let diff: Vec<BigInt> = x.iter().zip(i).map(|(a, b)| a - b).collect();
            if self.member(&diff)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// In the monoid and not killed by the ideal.
    fn alive(&self, x: &[BigInt]) -> Result<bool> {
        Ok(self.member(x)? && !self.in_ideal(x)?)
    }

    /// Factorizations into ring-monoid generators, as count vectors aligned
    /// with the sharp generator list (translate via gen_lookup).
    fn factorizations(&self, x: &[BigInt]) -> Vec<Vec<u64>> {
        self.m.sharp_data().factorizations(x)
    }
}

fn fmt_vec(v: &[BigInt]) -> String {
    let inner: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", inner.join(","))
}

/// The module of relative log Kähler differentials of a pre-log map, as a
/// graded presentation over the target ring.
///
/// Generators: d(x^g) for every ring-monoid generator and dlog(n) for every
/// pre-log generator of the target. Stored relations: the lattice relations
/// among the dlog generators, d(alpha(n)) = alpha(n) dlog(n), vanishing of
/// dlog on pre-log elements from the base, vanishing of d on ring elements
/// from the base, and vanishing of d on the ideal generators. The ring
/// monoid's own relations enter through `graded_piece`.
pub fn kahler_differentials(f: &PreLogMap) -> Result<PresentedModule> {
    let target = &f.target;
    let m = target.ring_monoid();
    let n = target.prelog_monoid();
    if !m.is_sharp() {
        return Err(Error::unsupported(
            "kahler_differentials",
            "the target ring monoid has units; the graded presentation needs a sharp ring monoid",
        ));
    }
    let view = SharpView::build(target)?;
    let ambient = m.ambient_rank();
    let zero_monomial = vec![BigInt::zero(); ambient];

    let mut generators: Vec<ModuleGenerator> = Vec::new();
    for g in m.generators() {
        generators.push(ModuleGenerator {
            label: format!("d{}", fmt_vec(g)),
            degree: g.clone(),
        });
    }
    let d_gens = generators.len();
    for g in n.generators() {
        generators.push(ModuleGenerator {
            label: format!("dlog{}", fmt_vec(g)),
            degree: zero_monomial.clone(),
        });
    }

    // d(x^e) expanded along one factorization of e; different factorizations
    // differ by Leibniz rows that graded evaluation restores.
    let expand_d = |e: &[BigInt]| -> Result<Vec<RelationTerm>> {
        let s = view
            .to_sharp(e)
            .ok_or_else(|| Error::invalid("kahler_differentials", "image outside the ring monoid span"))?;
        let factorizations = view.factorizations(&s);
        let counts = factorizations.first().ok_or_else(|| {
            Error::invalid("kahler_differentials", "image admits no factorization in the ring monoid")
        })?;
        let mut terms = Vec::new();
        for (j, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let gen = view.gen_lookup[j];
            let monomial: Vec<BigInt> = e
                .iter()
                .zip(&m.generators()[gen])
                .map(|(a, b)| a - b)
                .collect();
            terms.push(RelationTerm { gen, monomial, coeff: BigInt::from(c) });
        }
        Ok(terms)
    };

    let mut relations: Vec<Vec<RelationTerm>> = Vec::new();

    // Lattice relations among the dlog generators: dlog is additive on the
    // group completion, so integer relations among the pre-log generators
    // hold among their dlogs.
    let n_gens_span = n.generator_span_coords();
    let n_gen_matrix =
        IntMatrix::from_fn(n.rank(), n_gens_span.len(), |i, j| n_gens_span[j][i].clone());
    let kernel = kernel_basis(&n_gen_matrix);
    for c in 0..kernel.cols() {
        let mut rel = Vec::new();
        for j in 0..n_gens_span.len() {
            let coeff = kernel.get(j, c).clone();
            if !coeff.is_zero() {
                rel.push(RelationTerm { gen: d_gens + j, monomial: zero_monomial.clone(), coeff });
            }
        }
        if !rel.is_empty() {
            relations.push(rel);
        }
    }

    // d(alpha(n)) = alpha(n) dlog(n) for every pre-log generator.
    for (j, g) in n.generators().iter().enumerate() {
        let e = target.structure.apply_vec(g);
        let mut rel = expand_d(&e)?;
        rel.push(RelationTerm { gen: d_gens + j, monomial: e, coeff: BigInt::from(-1) });
        relations.push(rel);
    }

    // dlog vanishes on pre-log elements pulled back from the base.
    for g in f.source.prelog_monoid().generators() {
        let image = f.prelog_map.apply_vec(g);
        let coords = n
            .group_coords(&image)
            .ok_or_else(|| Error::invalid("kahler_differentials", "pre-log image outside the span"))?;
        let expansion = solve(&n_gen_matrix, &coords).ok_or_else(|| {
            Error::invalid("kahler_differentials", "pre-log image is not a combination of generators")
        })?;
        let mut rel = Vec::new();
        for (j, coeff) in expansion.into_iter().enumerate() {
            if !coeff.is_zero() {
                rel.push(RelationTerm { gen: d_gens + j, monomial: zero_monomial.clone(), coeff });
            }
        }
        if !rel.is_empty() {
            relations.push(rel);
        }
    }

    // d vanishes on ring elements pulled back from the base.
    for g in f.source.ring_monoid().generators() {
        let image = f.monoid_map.apply_vec(g);
        if image.iter().all(|x| x.is_zero()) {
            continue;
        }
        let rel = expand_d(&image)?;
        if !rel.is_empty() {
            relations.push(rel);
        }
    }

    // d vanishes on the ideal generators in the quotient.
    for g in &target.ideal {
        let rel = expand_d(&g.vector)?;
        if !rel.is_empty() {
            relations.push(rel);
        }
    }

    PresentedModule::assemble(target.clone(), generators, relations, d_gens)
}
