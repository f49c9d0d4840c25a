//! Per-degree homotopy of cyclic bar constructions and their ring-level
//! shadows: Hochschild homology of monoid algebras and monomial quotients,
//! replete bar homology with an independent chain-level oracle, log
//! Hochschild homology, and graded Tor.
//!
//! Every operation fixes a window of multidegrees in the ambient character
//! lattice of the target and computes one finite complex per degree. Units
//! are split off first: each affine monoid decomposes as U + M# with U its
//! unit lattice, the cyclic bar construction factors along that splitting,
//! and the unit directions contribute the group homology of U through the
//! Kunneth formula. What remains is a normalized complex over the sharp
//! part, enumerated in sharp coordinates, where monomial ideals act by
//! deleting basis tuples.

use crate::abelian::{
    cokernel_structure, complex_homology, group_homology, Coefficients, Complex, FgAbGroup,
    GroupElem, IntMatrix, ModuleDesc,
};
use crate::bar::simplicial::{circle_complex, kunneth_assemble, tensor_complex};
use crate::bar::table::HomotopyTable;
use crate::error::{Error, Result};
use crate::monoid::{graded_tor_complex, AffineMonoid, MonoidElement, MonoidHom, SearchBounds};
use crate::prelog::{monomial_in_ideal, PreLogMap, PreLogRing};
use crate::repletion::{replete_bar_level, RepleteBarLevel};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};

/// Hard ceiling on the total number of basis tuples across the levels of
/// any single per-degree complex.
const LEVEL_CAP: usize = 20_000;

/// Ceiling for integral and rational homology of the Moore oracle, whose
/// exact reductions grow much faster than prime-field elimination.
const EXACT_CAP: usize = 1_000;

fn zero_profile(qmax: usize) -> Vec<ModuleDesc> {
    vec![ModuleDesc::zero(); qmax + 1]
}

fn one_profile(qmax: usize) -> Vec<ModuleDesc> {
    let mut p = zero_profile(qmax);
    p[0] = ModuleDesc::free(1);
    p
}

/// Evaluates one profile of homotopy groups per degree in parallel and
/// assembles the table. Degrees are deduplicated and sorted up front, each
/// task is independent, and the merge order is fixed, so the output does
/// not depend on thread scheduling.
fn parallel_table<F>(qmax: usize, degrees: &[Vec<BigInt>], eval: F) -> Result<HomotopyTable>
where
    F: Fn(&[BigInt]) -> Result<Vec<ModuleDesc>> + Sync,
{
    let mut table = HomotopyTable::new(qmax, degrees);
    let window: Vec<Vec<BigInt>> = table.degrees().to_vec();
    let rows: Vec<(Vec<BigInt>, Vec<ModuleDesc>)> = window
        .par_iter()
        .map(|t| eval(t).map(|profile| (t.clone(), profile)))
        .collect::<Result<Vec<_>>>()?;
    for (t, profile) in rows {
        for (q, desc) in profile.into_iter().enumerate().take(qmax + 1) {
            table.set(q, &t, desc)?;
        }
    }
    Ok(table)
}

/// Call-local context for the normalized cyclic bar complex of one monoid
/// in its sharp coordinates. Basis tuples are (x0; x1, ..., xq) with every
/// entry a live monoid element, the inner entries nonzero, and a fixed sum;
/// faces merge adjacent entries (cyclically for the last one) and kill the
/// tuple when the merge lands in the ideal. Membership answers are memoized
/// per instance, so instances are cheap but not shareable across threads.
pub(crate) struct SharpFiber<'a> {
    monoid: &'a AffineMonoid,
    ideal: Vec<Vec<BigInt>>,
    bounds: &'a SearchBounds,
    member_memo: RefCell<BTreeMap<Vec<BigInt>, bool>>,
    alive_memo: RefCell<BTreeMap<Vec<BigInt>, bool>>,
}

impl<'a> SharpFiber<'a> {
    fn new(
        monoid: &'a AffineMonoid,
        ideal: &[MonoidElement],
        bounds: &'a SearchBounds,
    ) -> Result<SharpFiber<'a>> {
        let mut sharp_ideal = Vec::with_capacity(ideal.len());
        for g in ideal {
            let coords = monoid.sharp_coords(&g.vector).ok_or_else(|| {
                Error::invalid("bar-fiber", "a monomial relation lies outside the monoid span")
            })?;
            sharp_ideal.push(coords);
        }
        Ok(SharpFiber {
            monoid,
            ideal: sharp_ideal,
            bounds,
            member_memo: RefCell::new(BTreeMap::new()),
            alive_memo: RefCell::new(BTreeMap::new()),
        })
    }

    fn member(&self, x: &[BigInt]) -> Result<bool> {
        if let Some(&b) = self.member_memo.borrow().get(x) {
            return Ok(b);
        }
        let b = self.monoid.sharp_data().generated_membership(x, self.bounds.max_degree)?;
        self.member_memo.borrow_mut().insert(x.to_vec(), b);
        Ok(b)
    }

    /// Membership in the monoid minus the monomial ideal. Unit parts never
    /// matter here: subtracting an ideal generator changes the sharp image
    /// by its sharp image alone.
    fn alive(&self, x: &[BigInt]) -> Result<bool> {
        if let Some(&b) = self.alive_memo.borrow().get(x) {
            return Ok(b);
        }
        let mut b = self.member(x)?;
        if b {
            for g in &self.ideal {
                let diff: Vec<BigInt> = x.iter().zip(g).map(|(a, c)| a - c).collect();
                if self.member(&diff)? {
                    b = false;
                    break;
                }
            }
        }
        self.alive_memo.borrow_mut().insert(x.to_vec(), b);
        Ok(b)
    }

    /// Live nonzero elements that can appear as inner entries of a tuple
    /// with the given sum, sorted.
    fn pool(&self, total: &[BigInt]) -> Result<Vec<Vec<BigInt>>> {
        let data = self.monoid.sharp_data();
        if !data.in_cone(total) {
            return Ok(Vec::new());
        }
        let cap = data.grade(total).to_u64().ok_or_else(|| {
            Error::scale("bar-fiber", "the degree's grading does not fit in a machine word")
        })?;
        let mut pool = Vec::new();
        for x in data.elements_up_to(cap) {
            if x.iter().all(|c| c.is_zero()) {
                continue;
            }
            let rest: Vec<BigInt> = total.iter().zip(&x).map(|(a, b)| a - b).collect();
            if !data.in_cone(&rest) {
                continue;
            }
            if self.alive(&x)? {
                pool.push(x);
            }
        }
        Ok(pool)
    }

    fn tuples_into(
        &self,
        remaining: Vec<BigInt>,
        picks_left: usize,
        pool: &[Vec<BigInt>],
        stack: &mut Vec<Vec<BigInt>>,
        out: &mut Vec<Vec<Vec<BigInt>>>,
        cap: usize,
    ) -> Result<()> {
        if out.len() > cap {
            return Err(Error::scale(
                "bar-fiber",
                format!("a normalized bar level exceeds the cap of {LEVEL_CAP} basis tuples"),
            ));
        }
        if picks_left == 0 {
            if self.alive(&remaining)? {
                let mut tuple = Vec::with_capacity(stack.len() + 1);
                tuple.push(remaining);
                tuple.extend(stack.iter().cloned());
                out.push(tuple);
            }
            return Ok(());
        }
        let data = self.monoid.sharp_data();
        for y in pool {
            let next: Vec<BigInt> = remaining.iter().zip(y).map(|(a, b)| a - b).collect();
            // The unpicked rest is a sum of monoid elements, so it stays in
            // the cone, and each future pick costs at least one grade.
            if !data.in_cone(&next) {
                continue;
            }
            if data.grade(&next) < BigInt::from(picks_left as u64 - 1) {
                continue;
            }
            stack.push(y.clone());
            self.tuples_into(next, picks_left - 1, pool, stack, out, cap)?;
            stack.pop();
        }
        Ok(())
    }

    /// The normalized cyclic bar complex in one sharp multidegree, with
    /// levels 0 through top and lexicographically sorted basis tuples.
    fn cyclic_complex(&self, total: &[BigInt], top: usize) -> Result<Complex> {
        if !self.member(total)? {
            return Complex::new(vec![0; top + 1], vec![IntMatrix::zeros(0, 0); top]);
        }
        let pool = self.pool(total)?;
        let mut levels: Vec<Vec<Vec<Vec<BigInt>>>> = Vec::with_capacity(top + 1);
        let mut used = 0usize;
        for q in 0..=top {
            let mut basis = Vec::new();
            let mut stack = Vec::new();
            self.tuples_into(
                total.to_vec(),
                q,
                &pool,
                &mut stack,
                &mut basis,
                LEVEL_CAP.saturating_sub(used),
            )?;
            basis.sort();
            used += basis.len();
            levels.push(basis);
        }
        let ranks: Vec<usize> = levels.iter().map(|l| l.len()).collect();
        let mut boundaries = Vec::with_capacity(top);
        for q in 1..=top {
            let lower: BTreeMap<&Vec<Vec<BigInt>>, usize> =
                levels[q - 1].iter().enumerate().map(|(i, t)| (t, i)).collect();
            let mut mat = IntMatrix::zeros(ranks[q - 1], ranks[q]);
            for (col, tuple) in levels[q].iter().enumerate() {
                let mut sign = BigInt::one();
                for i in 0..=q {
                    // Face i merges entries i and i + 1; the last face wraps
                    // entry q around into entry 0. Inner entries stay
                    // nonzero because the monoid is sharp.
                    let (dst, src) = if i == q { (0, q) } else { (i, i + 1) };
                    let merged: Vec<BigInt> =
                        tuple[dst].iter().zip(&tuple[src]).map(|(a, b)| a + b).collect();
                    if self.alive(&merged)? {
                        let mut face: Vec<Vec<BigInt>> = Vec::with_capacity(q);
                        for (j, entry) in tuple.iter().enumerate() {
                            if j == src {
                                continue;
                            }
                            face.push(if j == dst { merged.clone() } else { entry.clone() });
                        }
                        let row = *lower.get(&face).expect("faces stay in the lower basis");
                        let val = mat.get(row, col) + &sign;
                        mat.set(row, col, val);
                    }
                    sign = -sign;
                }
            }
            boundaries.push(mat);
        }
        Complex::new(ranks, boundaries)
    }

    fn homology_profile(
        &self,
        total: &[BigInt],
        qmax: usize,
        k: Coefficients,
    ) -> Result<Vec<ModuleDesc>> {
        let complex = self.cyclic_complex(total, qmax + 1)?;
        let h = complex_homology(&complex, k)?;
        Ok((0..=qmax).map(|q| h.get(q).cloned().unwrap_or_else(ModuleDesc::zero)).collect())
    }
}

/// One degree of the Hochschild profile of k[M]/I, with the units of M
/// split off into a Kunneth factor.
fn absolute_profile(
    m: &AffineMonoid,
    ideal: &[MonoidElement],
    units: &[ModuleDesc],
    t: &[BigInt],
    qmax: usize,
    k: Coefficients,
    bounds: &SearchBounds,
) -> Result<Vec<ModuleDesc>> {
    let Some(x) = m.sharp_coords(t) else {
        return Ok(zero_profile(qmax));
    };
    let fiber = SharpFiber::new(m, ideal, bounds)?;
    let sharp = fiber.homology_profile(&x, qmax, k)?;
    Ok((0..=qmax).map(|q| kunneth_assemble(k, units, &sharp, q)).collect())
}

/// Direct-factor splitting of theta: P -> M. The mask selects the ambient
/// coordinates met by the image of theta; every target generator must live
/// entirely inside or outside that block, and theta must map P
/// isomorphically onto the inside block. A trivial source splits with an
/// empty base block, so the absolute case needs no special treatment.
struct RelativeSplit {
    base_mask: Vec<bool>,
    base_monoid: AffineMonoid,
    fiber_monoid: AffineMonoid,
}

impl RelativeSplit {
    fn restrict(&self, t: &[BigInt], base: bool) -> Vec<BigInt> {
        t.iter()
            .enumerate()
            .map(|(i, x)| if self.base_mask[i] == base { x.clone() } else { BigInt::zero() })
            .collect()
    }
}

fn split_relative(theta: &MonoidHom, bounds: &SearchBounds) -> Result<RelativeSplit> {
    let m = theta.target();
    let d = m.ambient_rank();
    let images: Vec<Vec<BigInt>> =
        theta.source().generators().iter().map(|g| theta.apply_vec(g)).collect();
    let mut base_mask = vec![false; d];
    for img in &images {
        for (i, x) in img.iter().enumerate() {
            if !x.is_zero() {
                base_mask[i] = true;
            }
        }
    }
    let mut base_gens = Vec::new();
    let mut fiber_gens = Vec::new();
    for g in m.generators() {
        let in_base = g.iter().enumerate().any(|(i, x)| base_mask[i] && !x.is_zero());
        let in_fiber = g.iter().enumerate().any(|(i, x)| !base_mask[i] && !x.is_zero());
        if in_base && in_fiber {
            return Err(Error::unsupported(
                "relative-split",
                "a target generator mixes base and fiber coordinates",
            ));
        }
        if in_base {
            base_gens.push(g.clone());
        } else {
            fiber_gens.push(g.clone());
        }
    }
    let base_monoid = AffineMonoid::new(d, base_gens)?;
    let fiber_monoid = AffineMonoid::new(d, fiber_gens)?;
    if !theta.is_gp_injective() {
        return Err(Error::unsupported(
            "relative-split",
            "the base map is not injective on group completions",
        ));
    }
    let image_monoid = AffineMonoid::new(d, images)?;
    if !image_monoid.equals_submonoid(&base_monoid, bounds)? {
        return Err(Error::unsupported(
            "relative-split",
            "the base image does not exhaust the target generators meeting its block",
        ));
    }
    Ok(RelativeSplit { base_mask, base_monoid, fiber_monoid })
}

/// Shared engine for Hochschild-type tables: relative cyclic bar homology
/// of theta: P -> M with a monomial ideal on the target. Per degree t the
/// answer is the fiber profile at the fiber part of t whenever the base
/// part lies in the base block, and zero otherwise.
fn hh_table(
    ideal: &[MonoidElement],
    theta: &MonoidHom,
    k: Coefficients,
    qmax: usize,
    degrees: &[Vec<BigInt>],
    bounds: &SearchBounds,
) -> Result<HomotopyTable> {
    k.validate()?;
    let split = split_relative(theta, bounds)?;
    for g in ideal {
        if g.vector.iter().enumerate().any(|(i, x)| split.base_mask[i] && !x.is_zero()) {
            return Err(Error::unsupported(
                "hochschild",
                "a monomial relation touches the base block",
            ));
        }
    }
    let fiber = split.fiber_monoid.clone();
    // Fail fast on malformed relations; the per-degree fibers recheck this
    // cheaply when they rebuild their memo tables.
    SharpFiber::new(&fiber, ideal, bounds)?;
    let units = group_homology(&FgAbGroup::free(fiber.unit_rank()), qmax, k);
    parallel_table(qmax, degrees, |t| {
        let tb = split.restrict(t, true);
        if !split.base_monoid.contains(&MonoidElement::new(tb), bounds)? {
            return Ok(zero_profile(qmax));
        }
        let tf = split.restrict(t, false);
        absolute_profile(&fiber, ideal, &units, &tf, qmax, k, bounds)
    })
}

/// Homotopy of the cyclic bar construction of M relative to P, degree by
/// degree in the ambient character lattice of M. The base must land
/// isomorphically on a direct block of the target; the trivial source gives
/// the absolute cyclic bar construction.
pub fn cyclic_bar_homology(
    theta: &MonoidHom,
    k: Coefficients,
    qmax: usize,
    degrees: &[Vec<BigInt>],
    bounds: &SearchBounds,
) -> Result<HomotopyTable> {
    hh_table(&[], theta, k, qmax, degrees, bounds)
}

/// Hochschild homology of the underlying ring map of f, forgetting pre-log
/// structures. The base must be a monoid algebra landing on a direct block
/// of the target; the target may carry a monomial ideal supported in the
/// fiber block.
pub fn hochschild_homology(
    f: &PreLogMap,
    qmax: usize,
    degrees: &[Vec<BigInt>],
    bounds: &SearchBounds,
) -> Result<HomotopyTable> {
    if !f.source.ideal.is_empty() {
        return Err(Error::unsupported(
            "hochschild",
            "the base of a Hochschild computation must be a plain monoid algebra",
        ));
    }
    hh_table(&f.target.ideal, &f.monoid_map, f.target.coeff, qmax, degrees, bounds)
}

/// Replete bar homology of theta: P -> M in closed form. Faces of the
/// replete bar construction never move the point of M, so the complex over
/// an alive degree is the bar complex of G = M^gp / P^gp and the homotopy
/// is k[M] tensored with the group homology of G.
pub fn replete_bar_homology(
    theta: &MonoidHom,
    k: Coefficients,
    qmax: usize,
    degrees: &[Vec<BigInt>],
    bounds: &SearchBounds,
) -> Result<HomotopyTable> {
    k.validate()?;
    let g = cokernel_structure(theta.gp_matrix());
    let gh = group_homology(&g, qmax, k);
    let m = theta.target();
    parallel_table(qmax, degrees, |t| {
        if m.contains(&MonoidElement::new(t.to_vec()), bounds)? {
            Ok(gh.clone())
        } else {
            Ok(zero_profile(qmax))
        }
    })
}

fn torsion_elements(moduli: &[BigInt], free_rank: usize) -> Result<Vec<GroupElem>> {
    let mut residues: Vec<Vec<BigInt>> = vec![Vec::new()];
    for m in moduli {
        let modulus = m.to_u64().ok_or_else(|| {
            Error::scale("replete-moore", format!("torsion modulus {m} is too large to enumerate"))
        })?;
        let mut next = Vec::with_capacity(residues.len() * modulus as usize);
        for prefix in &residues {
            for r in 0..modulus {
                let mut e = prefix.clone();
                e.push(BigInt::from(r));
                next.push(e);
            }
        }
        residues = next;
    }
    let mut out: Vec<GroupElem> = residues
        .into_iter()
        .map(|torsion| GroupElem { torsion, free: vec![BigInt::zero(); free_rank] })
        .filter(|e| !e.is_zero())
        .collect();
    out.sort();
    Ok(out)
}

/// Normalized bar complex of the torsion subgroup of the class group,
/// built by driving the repletion module's own face maps over a constant
/// point. No bar bookkeeping is redone here, which keeps this route
/// independent of the closed form it is checked against.
fn torsion_bar_complex(
    levels: &[RepleteBarLevel],
    nonzero: &[GroupElem],
    top: usize,
) -> Result<Complex> {
    let point = vec![BigInt::zero(); levels[0].base().ambient_rank()];
    let mut bases: Vec<Vec<Vec<GroupElem>>> = vec![vec![Vec::new()]];
    for q in 1..=top {
        let mut level = Vec::with_capacity(bases[q - 1].len() * nonzero.len());
        for prefix in &bases[q - 1] {
            for x in nonzero {
                let mut tuple = prefix.clone();
                tuple.push(x.clone());
                level.push(tuple);
            }
        }
        level.sort();
        bases.push(level);
    }
    let ranks: Vec<usize> = bases.iter().map(|b| b.len()).collect();
    let mut boundaries = Vec::with_capacity(top);
    for q in 1..=top {
        let index: BTreeMap<&Vec<GroupElem>, usize> =
            bases[q - 1].iter().enumerate().map(|(i, t)| (t, i)).collect();
        let mut mat = IntMatrix::zeros(ranks[q - 1], ranks[q]);
        for (col, classes) in bases[q].iter().enumerate() {
            let e = levels[q].element(point.clone(), classes.clone())?;
            let mut sign = BigInt::one();
            for i in 0..=q {
                let face = levels[q].face(i, &e)?;
                // A merge that collapses to the zero class is degenerate
                // and dies in the normalized complex.
                if face.classes.iter().all(|c| !c.is_zero()) {
                    let row =
                        *index.get(&face.classes).expect("face classes stay in the basis");
                    let val = mat.get(row, col) + &sign;
                    mat.set(row, col, val);
                }
                sign = -sign;
            }
        }
        boundaries.push(mat);
    }
    Complex::new(ranks, boundaries)
}

/// Chain-level rebuild of replete bar homology, independent of the closed
/// form: the torsion part of G = M^gp / P^gp is enumerated and run through
/// the repletion face maps, and every free direction contributes a tensor
/// factor with the chain complex of a circle. Degrees only gate the result
/// by membership in M, since faces never move the point.
pub fn replete_bar_moore_oracle(
    theta: &MonoidHom,
    k: Coefficients,
    qmax: usize,
    degrees: &[Vec<BigInt>],
    bounds: &SearchBounds,
) -> Result<HomotopyTable> {
    k.validate()?;
    let top = qmax + 1;
    let levels: Vec<RepleteBarLevel> = (0..=top).map(|q| replete_bar_level(theta, q)).collect();
    let lattice = levels[0].class_lattice();
    let moduli = lattice.torsion_moduli();
    let mut torsion_order: u128 = 1;
    for m in &moduli {
        let m = m.to_u128().ok_or_else(|| {
            Error::scale("replete-moore", "a torsion modulus does not fit in a machine word")
        })?;
        torsion_order = torsion_order.saturating_mul(m);
    }
    let mut predicted: u128 = 0;
    let mut power: u128 = 1;
    for _ in 0..=top {
        predicted = predicted.saturating_add(power);
        power = power.saturating_mul(torsion_order.saturating_sub(1));
    }
    if predicted > LEVEL_CAP as u128 {
        return Err(Error::scale(
            "replete-moore",
            format!("the torsion bar basis needs {predicted} tuples, past the cap of {LEVEL_CAP}"),
        ));
    }
    let nonzero = torsion_elements(&moduli, lattice.free_rank())?;
    let mut total = torsion_bar_complex(&levels, &nonzero, top)?;
    let circle = circle_complex(top);
    for _ in 0..lattice.free_rank() {
        total = tensor_complex(&total, &circle)?;
    }
    let size: usize = total.ranks.iter().sum();
    if size > LEVEL_CAP {
        return Err(Error::scale(
            "replete-moore",
            format!("the assembled Moore complex has {size} basis elements, past {LEVEL_CAP}"),
        ));
    }
    if matches!(k, Coefficients::Integer | Coefficients::Rational) && size > EXACT_CAP {
        return Err(Error::scale(
            "replete-moore",
            format!(
                "the Moore complex has {size} basis elements, past the exact-arithmetic cap \
                 of {EXACT_CAP}; rerun with prime-field coefficients"
            ),
        ));
    }
    let h = complex_homology(&total, k)?;
    let profile: Vec<ModuleDesc> =
        (0..=qmax).map(|q| h.get(q).cloned().unwrap_or_else(ModuleDesc::zero)).collect();
    let m = theta.target();
    parallel_table(qmax, degrees, |t| {
        if m.contains(&MonoidElement::new(t.to_vec()), bounds)? {
            Ok(profile.clone())
        } else {
            Ok(zero_profile(qmax))
        }
    })
}

/// The canonical pre-log structure: the pre-log monoid is the ring monoid
/// and the structure map is the identity on the ambient lattice.
fn is_canonical(ring: &PreLogRing) -> bool {
    ring.prelog_monoid() == ring.ring_monoid()
        && *ring.structure.matrix() == IntMatrix::identity(ring.ring_monoid().ambient_rank())
}

fn is_base_ring(ring: &PreLogRing) -> bool {
    ring.ring_monoid().is_trivial() && ring.prelog_monoid().is_trivial() && ring.ideal.is_empty()
}

/// Shape with canonical pre-log structures on both sides: the repletion
/// pushout degenerates levelwise, log Hochschild homology is the monoid
/// algebra of the replete bar construction, and each live degree carries
/// the group homology of G = coker(theta^gp). Monomial ideals on the target
/// only gate liveness, since faces never move the point.
fn loghh_canonical(
    f: &PreLogMap,
    k: Coefficients,
    qmax: usize,
    degrees: &[Vec<BigInt>],
    bounds: &SearchBounds,
) -> Result<HomotopyTable> {
    let g = cokernel_structure(f.monoid_map.gp_matrix());
    let gh = group_homology(&g, qmax, k);
    let m = f.target.ring_monoid();
    parallel_table(qmax, degrees, |t| {
        let alive = m.contains(&MonoidElement::new(t.to_vec()), bounds)?
            && !monomial_in_ideal(&f.target, t, bounds)?;
        Ok(if alive { gh.clone() } else { zero_profile(qmax) })
    })
}

fn support(v: &[BigInt]) -> Vec<usize> {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, _)| i).collect()
}

fn uf_root(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn uf_union(parent: &mut [usize], a: usize, b: usize) {
    let ra = uf_root(parent, a);
    let rb = uf_root(parent, b);
    if ra != rb {
        parent[ra.max(rb)] = ra.min(rb);
    }
}

enum BlockEval {
    /// No pre-log generators in the block: plain Hochschild homology.
    Plain { monoid: AffineMonoid, units: Vec<ModuleDesc> },
    /// The pre-log generators are a basis of the block's character group,
    /// so the block contributes dlog classes: the group homology of its
    /// group completion wherever the block degree is live.
    GpIso { monoid: AffineMonoid, profile: Vec<ModuleDesc> },
}

/// Shape over the coefficient base with a free pre-log monoid: the ambient
/// coordinates split into independent blocks tied together by ring
/// generators and pre-log images, the blocks contribute through the Kunneth
/// formula, and each block is either plain or a dlog block.
fn loghh_free_blocks(
    target: &PreLogRing,
    k: Coefficients,
    qmax: usize,
    degrees: &[Vec<BigInt>],
    bounds: &SearchBounds,
) -> Result<HomotopyTable> {
    if !target.ideal.is_empty() {
        return Err(Error::unsupported(
            "loghh",
            "monomial relations need the canonical or log-trivial shapes",
        ));
    }
    let m = target.ring_monoid();
    let n = target.prelog_monoid();
    if n.generators().len() != n.rank() {
        return Err(Error::unsupported(
            "loghh",
            "the pre-log monoid is not free on its generator list",
        ));
    }
    let d = m.ambient_rank();
    let mut parent: Vec<usize> = (0..d).collect();
    let mut used = vec![false; d];
    let mut supports: Vec<Vec<usize>> = Vec::new();
    for g in m.generators() {
        let s = support(g);
        for &i in &s {
            used[i] = true;
        }
        supports.push(s);
    }
    let images: Vec<Vec<BigInt>> =
        n.generators().iter().map(|g| target.structure.apply_vec(g)).collect();
    for img in &images {
        let s = support(img);
        if s.is_empty() {
            return Err(Error::unsupported(
                "loghh",
                "a pre-log generator maps to the unit monomial",
            ));
        }
        supports.push(s);
    }
    for s in &supports {
        for w in s.windows(2) {
            uf_union(&mut parent, w[0], w[1]);
        }
    }
    let mut block_gens: BTreeMap<usize, Vec<Vec<BigInt>>> = BTreeMap::new();
    for g in m.generators() {
        let s = support(g);
        if let Some(&first) = s.first() {
            block_gens.entry(uf_root(&mut parent, first)).or_default().push(g.clone());
        }
    }
    let mut block_logs: BTreeMap<usize, Vec<Vec<BigInt>>> = BTreeMap::new();
    for img in &images {
        let first = support(img)[0];
        block_logs.entry(uf_root(&mut parent, first)).or_default().push(img.clone());
    }
    let mut block_coords: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..d {
        if used[i] {
            block_coords.entry(uf_root(&mut parent, i)).or_default().push(i);
        }
    }
    let mut blocks: Vec<(Vec<usize>, BlockEval)> = Vec::new();
    for (root, coords) in block_coords {
        let restrict = |v: &[BigInt]| -> Vec<BigInt> {
            coords.iter().map(|&i| v[i].clone()).collect()
        };
        let gens: Vec<Vec<BigInt>> = block_gens
            .remove(&root)
            .unwrap_or_default()
            .iter()
            .map(|g| restrict(g))
            .collect();
        let monoid = AffineMonoid::new(coords.len(), gens)?;
        let logs = block_logs.remove(&root).unwrap_or_default();
        if logs.is_empty() {
            let units = group_homology(&FgAbGroup::free(monoid.unit_rank()), qmax, k);
            blocks.push((coords, BlockEval::Plain { monoid, units }));
            continue;
        }
        let columns: Vec<Vec<BigInt>> = logs
            .iter()
            .map(|img| {
                monoid
                    .group_coords(&restrict(img))
                    .expect("pre-log images lie in the span of their block")
            })
            .collect();
        let c = IntMatrix::from_fn(monoid.rank(), columns.len(), |i, j| columns[j][i].clone());
        if logs.len() != monoid.rank() || !cokernel_structure(&c).is_zero() {
            return Err(Error::unsupported(
                "loghh",
                "the pre-log generators are not a basis of their block's character group",
            ));
        }
        let profile = group_homology(&FgAbGroup::free(monoid.rank()), qmax, k);
        blocks.push((coords, BlockEval::GpIso { monoid, profile }));
    }
    let unused: Vec<usize> = (0..d).filter(|&i| !used[i]).collect();
    parallel_table(qmax, degrees, |t| {
        if unused.iter().any(|&i| !t[i].is_zero()) {
            return Ok(zero_profile(qmax));
        }
        let mut acc = one_profile(qmax);
        for (coords, eval) in &blocks {
            let tb: Vec<BigInt> = coords.iter().map(|&i| t[i].clone()).collect();
            let p = match eval {
                BlockEval::GpIso { monoid, profile } => {
                    if monoid.contains(&MonoidElement::new(tb), bounds)? {
                        profile.clone()
                    } else {
                        zero_profile(qmax)
                    }
                }
                BlockEval::Plain { monoid, units } => {
                    absolute_profile(monoid, &[], units, &tb, qmax, k, bounds)?
                }
            };
            acc = (0..=qmax).map(|q| kunneth_assemble(k, &acc, &p, q)).collect();
        }
        Ok(acc)
    })
}

/// General relative shape: the ring map must split the target into a base
/// block and a fiber block, the pre-log generators must sort into the same
/// blocks, and the source pre-log structure must map strictly onto the base
/// part. The fiber is then an extension over the coefficient base and the
/// base block only gates degrees.
fn loghh_relative(
    f: &PreLogMap,
    k: Coefficients,
    qmax: usize,
    degrees: &[Vec<BigInt>],
    bounds: &SearchBounds,
) -> Result<HomotopyTable> {
    if !f.target.ideal.is_empty() {
        return Err(Error::unsupported(
            "loghh",
            "monomial relations need the canonical or log-trivial shapes",
        ));
    }
    let split = split_relative(&f.monoid_map, bounds)?;
    let nt = f.target.prelog_monoid();
    let mut base_prelog_gens: Vec<Vec<BigInt>> = Vec::new();
    let mut fiber_prelog_gens: Vec<Vec<BigInt>> = Vec::new();
    for g in nt.generators() {
        let img = f.target.structure.apply_vec(g);
        let in_base = img.iter().enumerate().any(|(i, x)| split.base_mask[i] && !x.is_zero());
        let in_fiber = img.iter().enumerate().any(|(i, x)| !split.base_mask[i] && !x.is_zero());
        match (in_base, in_fiber) {
            (true, true) => {
                return Err(Error::unsupported(
                    "loghh",
                    "a pre-log generator mixes base and fiber coordinates",
                ))
            }
            (false, false) => {
                return Err(Error::unsupported(
                    "loghh",
                    "a pre-log generator maps to the unit monomial",
                ))
            }
            (true, false) => base_prelog_gens.push(g.clone()),
            (false, true) => fiber_prelog_gens.push(g.clone()),
        }
    }
    let amb = nt.ambient_rank();
    let n_base = AffineMonoid::new(amb, base_prelog_gens)?;
    let n_fiber = AffineMonoid::new(amb, fiber_prelog_gens)?;
    if !f.prelog_map.is_gp_injective() {
        return Err(Error::unsupported(
            "loghh",
            "the base pre-log structure is not strict along the map",
        ));
    }
    let prelog_images: Vec<Vec<BigInt>> = f
        .source
        .prelog_monoid()
        .generators()
        .iter()
        .map(|g| f.prelog_map.apply_vec(g))
        .collect();
    let prelog_image_monoid = AffineMonoid::new(amb, prelog_images)?;
    if !prelog_image_monoid.equals_submonoid(&n_base, bounds)? {
        return Err(Error::unsupported(
            "loghh",
            "the base pre-log structure is not strict along the map",
        ));
    }
    if nt.rank() != n_base.rank() + n_fiber.rank() {
        return Err(Error::unsupported(
            "loghh",
            "the pre-log monoid does not split along the base",
        ));
    }
    let fiber_structure = MonoidHom::with_bounds(
        n_fiber,
        split.fiber_monoid.clone(),
        f.target.structure.matrix().clone(),
        bounds,
    )?;
    let fiber_ring = PreLogRing::new(k, fiber_structure, Vec::new(), bounds)?;
    let fiber_degrees: Vec<Vec<BigInt>> = degrees
        .iter()
        .map(|t| split.restrict(t, false))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let fiber_table =
        loghh_homology(&PreLogMap::unit(&fiber_ring, bounds)?, qmax, &fiber_degrees, bounds)?;
    parallel_table(qmax, degrees, |t| {
        let tb = split.restrict(t, true);
        if !split.base_monoid.contains(&MonoidElement::new(tb), bounds)? {
            return Ok(zero_profile(qmax));
        }
        let tf = split.restrict(t, false);
        (0..=qmax).map(|q| fiber_table.get(q, &tf)).collect()
    })
}

/// Truncated log Hochschild homology of a map of pre-log rings, degree by
/// degree in the ambient character lattice of the target. Three shapes are
/// supported: canonical pre-log structures (with monomial ideals), free
/// pre-log extensions over the coefficient base, and relative maps whose
/// ring and pre-log structures both split along a strict base block. Maps
/// with trivial pre-log structures fall back to Hochschild homology.
/// Anything else reports which precondition failed.
pub fn loghh_homology(
    f: &PreLogMap,
    qmax: usize,
    degrees: &[Vec<BigInt>],
    bounds: &SearchBounds,
) -> Result<HomotopyTable> {
    let k = f.target.coeff;
    k.validate()?;
    if !f.source.ideal.is_empty() {
        return Err(Error::unsupported(
            "loghh",
            "monomial relations in the base are not supported",
        ));
    }
    if f.source.prelog_monoid().is_trivial() && f.target.prelog_monoid().is_trivial() {
        return hh_table(&f.target.ideal, &f.monoid_map, k, qmax, degrees, bounds);
    }
    if is_canonical(&f.target) && (is_base_ring(&f.source) || is_canonical(&f.source)) {
        return loghh_canonical(f, k, qmax, degrees, bounds);
    }
    if is_base_ring(&f.source) {
        return loghh_free_blocks(&f.target, k, qmax, degrees, bounds);
    }
    loghh_relative(f, k, qmax, degrees, bounds)
}

/// Graded Tor of k[M] against the coefficient base, as a module over k[P]
/// through theta, in ambient multidegrees of the target. Degrees outside
/// the span or the monoid contribute zero in every homological degree.
pub fn graded_tor(
    theta: &MonoidHom,
    k: Coefficients,
    qmax: usize,
    degrees: &[Vec<BigInt>],
    bounds: &SearchBounds,
) -> Result<HomotopyTable> {
    k.validate()?;
    let m = theta.target();
    parallel_table(qmax, degrees, |t| {
        let Some(span) = m.group_coords(t) else {
            return Ok(zero_profile(qmax));
        };
        match graded_tor_complex(theta, &span, qmax, bounds)? {
            None => Ok(zero_profile(qmax)),
            Some(complex) => (0..=qmax).map(|q| complex.homology(q, k)).collect(),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prelog::free_prelog;

    fn bounds() -> SearchBounds {
        SearchBounds::default()
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn degs(list: &[&[i64]]) -> Vec<Vec<BigInt>> {
        list.iter().map(|v| big(v)).collect()
    }

    fn line_degrees(range: std::ops::RangeInclusive<i64>) -> Vec<Vec<BigInt>> {
        range.map(|m| big(&[m])).collect()
    }

    fn rk(t: &HomotopyTable, q: usize, d: &[i64]) -> usize {
        t.get(q, &big(d)).unwrap().rank
    }

    fn from_trivial(m: &AffineMonoid) -> MonoidHom {
        let zeros = IntMatrix::zeros(m.ambient_rank(), 0);
        MonoidHom::new(AffineMonoid::trivial(), m.clone(), zeros).unwrap()
    }

    fn laurent_line() -> AffineMonoid {
        AffineMonoid::from_gens(1, &[vec![1], vec![-1]]).unwrap()
    }

    #[test]
    fn the_point_has_scalar_homotopy() {
        let theta = MonoidHom::identity(&AffineMonoid::trivial());
        let t = cyclic_bar_homology(&theta, Coefficients::Integer, 2, &[vec![]], &bounds())
            .unwrap();
        assert_eq!(rk(&t, 0, &[]), 1);
        assert_eq!(rk(&t, 1, &[]), 0);
        assert_eq!(rk(&t, 2, &[]), 0);
    }

    #[test]
    fn the_affine_line_matches_the_worked_profile() {
        let theta = from_trivial(&AffineMonoid::free(1));
        let t = cyclic_bar_homology(
            &theta,
            Coefficients::Integer,
            2,
            &line_degrees(0..=3),
            &bounds(),
        )
        .unwrap();
        for m in 0..=3 {
            assert_eq!(rk(&t, 0, &[m]), 1, "pi0 at {m}");
            assert_eq!(rk(&t, 1, &[m]), usize::from(m >= 1), "pi1 at {m}");
            assert_eq!(rk(&t, 2, &[m]), 0, "pi2 at {m}");
            assert!(t.get(1, &big(&[m])).unwrap().torsion.is_empty());
        }
    }

    #[test]
    fn the_laurent_line_carries_its_unit_circle() {
        let theta = from_trivial(&laurent_line());
        let t = cyclic_bar_homology(
            &theta,
            Coefficients::Integer,
            2,
            &line_degrees(-2..=2),
            &bounds(),
        )
        .unwrap();
        for m in -2..=2 {
            assert_eq!(rk(&t, 0, &[m]), 1);
            assert_eq!(rk(&t, 1, &[m]), 1);
            assert_eq!(rk(&t, 2, &[m]), 0);
        }
    }

    #[test]
    fn the_truncated_line_keeps_its_two_torsion() {
        let n1 = AffineMonoid::free(1);
        let structure = MonoidHom::new(
            AffineMonoid::trivial(),
            n1,
            IntMatrix::zeros(1, 0),
        )
        .unwrap();
        let mk = |k| {
            PreLogRing::new(k, structure.clone(), vec![MonoidElement::from(vec![2])], &bounds())
                .unwrap()
        };
        let window = line_degrees(0..=3);

        let target = mk(Coefficients::Integer);
        let f = PreLogMap::unit(&target, &bounds()).unwrap();
        let t = hochschild_homology(&f, 3, &window, &bounds()).unwrap();
        assert_eq!(rk(&t, 0, &[0]), 1);
        assert_eq!(rk(&t, 0, &[1]), 1);
        assert_eq!(rk(&t, 0, &[2]), 0);
        let deg2 = t.get(1, &big(&[2])).unwrap();
        assert_eq!(deg2.rank, 0);
        assert_eq!(deg2.torsion, vec![BigInt::from(2)]);
        // Weight three carries the first two classes of the standard
        // periodic pattern for a square-zero line.
        assert_eq!(rk(&t, 2, &[3]), 1);
        assert_eq!(rk(&t, 3, &[3]), 1);

        let target = mk(Coefficients::PrimeField(2));
        let f = PreLogMap::unit(&target, &bounds()).unwrap();
        let t = hochschild_homology(&f, 1, &window, &bounds()).unwrap();
        assert_eq!(rk(&t, 1, &[2]), 1);

        let target = mk(Coefficients::Rational);
        let f = PreLogMap::unit(&target, &bounds()).unwrap();
        let t = hochschild_homology(&f, 1, &window, &bounds()).unwrap();
        assert_eq!(rk(&t, 1, &[2]), 0);
    }

    #[test]
    fn the_plane_reproduces_its_kaehler_ranks() {
        let theta = from_trivial(&AffineMonoid::free(2));
        let t = cyclic_bar_homology(
            &theta,
            Coefficients::Integer,
            2,
            &degs(&[&[1, 1], &[2, 1], &[1, 0], &[2, 0]]),
            &bounds(),
        )
        .unwrap();
        assert_eq!(rk(&t, 1, &[1, 1]), 2);
        assert_eq!(rk(&t, 2, &[1, 1]), 1);
        assert_eq!(rk(&t, 1, &[2, 1]), 2);
        assert_eq!(rk(&t, 2, &[2, 1]), 1);
        assert_eq!(rk(&t, 1, &[1, 0]), 1);
        assert_eq!(rk(&t, 2, &[1, 0]), 0);
        assert_eq!(rk(&t, 2, &[2, 0]), 0);
    }

    #[test]
    fn a_split_base_gates_the_fiber() {
        let theta = MonoidHom::new(
            AffineMonoid::free(1),
            AffineMonoid::free(2),
            IntMatrix::from_rows(&[vec![1], vec![0]]),
        )
        .unwrap();
        let t = cyclic_bar_homology(
            &theta,
            Coefficients::Integer,
            1,
            &degs(&[&[3, 2], &[3, 0], &[0, 2], &[-1, 1]]),
            &bounds(),
        )
        .unwrap();
        assert_eq!(rk(&t, 0, &[3, 2]), 1);
        assert_eq!(rk(&t, 1, &[3, 2]), 1);
        assert_eq!(rk(&t, 1, &[3, 0]), 0);
        assert_eq!(rk(&t, 1, &[0, 2]), 1);
        assert_eq!(rk(&t, 0, &[-1, 1]), 0);
    }

    #[test]
    fn a_non_split_base_is_rejected() {
        let diag = MonoidHom::new(
            AffineMonoid::free(1),
            AffineMonoid::free(2),
            IntMatrix::from_rows(&[vec![1], vec![1]]),
        )
        .unwrap();
        match cyclic_bar_homology(&diag, Coefficients::Integer, 1, &degs(&[&[1, 1]]), &bounds()) {
            Err(Error::Unsupported { .. }) => {}
            other => panic!("expected an unsupported error, got {other:?}"),
        }
    }

    #[test]
    fn replete_homotopy_is_a_group_homology_sheet() {
        let theta = from_trivial(&AffineMonoid::free(1));
        let t = replete_bar_homology(
            &theta,
            Coefficients::Integer,
            2,
            &line_degrees(0..=3),
            &bounds(),
        )
        .unwrap();
        for m in 0..=3 {
            assert_eq!(rk(&t, 0, &[m]), 1);
            assert_eq!(rk(&t, 1, &[m]), 1);
            assert_eq!(rk(&t, 2, &[m]), 0);
        }

        let kummer = MonoidHom::new(
            AffineMonoid::free(1),
            AffineMonoid::free(1),
            IntMatrix::from_rows(&[vec![2]]),
        )
        .unwrap();
        let t = replete_bar_homology(
            &kummer,
            Coefficients::Integer,
            3,
            &line_degrees(0..=2),
            &bounds(),
        )
        .unwrap();
        for m in 0..=2 {
            assert_eq!(rk(&t, 0, &[m]), 1);
            let odd = t.get(1, &big(&[m])).unwrap();
            assert_eq!((odd.rank, odd.torsion.clone()), (0, vec![BigInt::from(2)]));
            assert!(t.get(2, &big(&[m])).unwrap().is_zero());
            let three = t.get(3, &big(&[m])).unwrap();
            assert_eq!(three.torsion, vec![BigInt::from(2)]);
        }
    }

    #[test]
    fn the_moore_oracle_agrees_with_the_closed_form() {
        let window = line_degrees(0..=2);
        for n in 2..=4i64 {
            let kummer = MonoidHom::new(
                AffineMonoid::free(1),
                AffineMonoid::free(1),
                IntMatrix::from_rows(&[vec![n]]),
            )
            .unwrap();
            let closed =
                replete_bar_homology(&kummer, Coefficients::Integer, 3, &window, &bounds())
                    .unwrap();
            let moore =
                replete_bar_moore_oracle(&kummer, Coefficients::Integer, 3, &window, &bounds())
                    .unwrap();
            assert_eq!(closed.to_json(), moore.to_json(), "cyclic group of order {n}");
        }
    }

    #[test]
    fn the_moore_oracle_handles_free_and_mixed_groups() {
        let theta = from_trivial(&AffineMonoid::free(1));
        let closed =
            replete_bar_homology(&theta, Coefficients::Integer, 3, &line_degrees(0..=2), &bounds())
                .unwrap();
        let moore = replete_bar_moore_oracle(
            &theta,
            Coefficients::Integer,
            3,
            &line_degrees(0..=2),
            &bounds(),
        )
        .unwrap();
        assert_eq!(closed.to_json(), moore.to_json());

        // Z + Z/2: doubling into the first coordinate of N + Z.
        let target = AffineMonoid::from_gens(2, &[vec![1, 0], vec![0, 1], vec![0, -1]]).unwrap();
        let theta = MonoidHom::new(
            AffineMonoid::free(1),
            target,
            IntMatrix::from_rows(&[vec![2], vec![0]]),
        )
        .unwrap();
        let window = degs(&[&[0, 0], &[1, -1], &[2, 3]]);
        let closed =
            replete_bar_homology(&theta, Coefficients::Integer, 2, &window, &bounds()).unwrap();
        let moore =
            replete_bar_moore_oracle(&theta, Coefficients::Integer, 2, &window, &bounds())
                .unwrap();
        assert_eq!(closed.to_json(), moore.to_json());
    }

    #[test]
    fn the_moore_oracle_guards_its_exact_arithmetic() {
        let kummer = MonoidHom::new(
            AffineMonoid::free(1),
            AffineMonoid::free(1),
            IntMatrix::from_rows(&[vec![7]]),
        )
        .unwrap();
        match replete_bar_moore_oracle(
            &kummer,
            Coefficients::Integer,
            3,
            &line_degrees(0..=1),
            &bounds(),
        ) {
            Err(Error::Scale { .. }) => {}
            other => panic!("expected a scale error, got {other:?}"),
        }
        // The same size runs fine over a prime field.
        let closed = replete_bar_homology(
            &kummer,
            Coefficients::PrimeField(7),
            3,
            &line_degrees(0..=1),
            &bounds(),
        )
        .unwrap();
        let moore = replete_bar_moore_oracle(
            &kummer,
            Coefficients::PrimeField(7),
            3,
            &line_degrees(0..=1),
            &bounds(),
        )
        .unwrap();
        assert_eq!(closed.to_json(), moore.to_json());
    }

    #[test]
    fn the_canonical_log_line_has_a_dlog_class_everywhere() {
        let ring = PreLogRing::canonical(Coefficients::Integer, &AffineMonoid::free(1));
        let f = PreLogMap::unit(&ring, &bounds()).unwrap();
        let t = loghh_homology(&f, 2, &line_degrees(0..=3), &bounds()).unwrap();
        for m in 0..=3 {
            assert_eq!(rk(&t, 0, &[m]), 1);
            assert_eq!(rk(&t, 1, &[m]), 1, "dlog class at {m}");
            assert_eq!(rk(&t, 2, &[m]), 0);
        }
    }

    #[test]
    fn the_index_two_inclusion_collapses_only_away_from_two() {
        let p = AffineMonoid::from_gens(2, &[vec![2, 0], vec![1, 1], vec![0, 2]]).unwrap();
        let n2 = AffineMonoid::free(2);
        let mk = |k| {
            let source = PreLogRing::canonical(k, &p);
            let target = PreLogRing::canonical(k, &n2);
            let theta = MonoidHom::new(p.clone(), n2.clone(), IntMatrix::identity(2)).unwrap();
            PreLogMap::new(source, target, theta.clone(), theta, &bounds()).unwrap()
        };
        let window = degs(&[&[1, 0], &[1, 1], &[2, 1]]);

        let t = loghh_homology(&mk(Coefficients::Rational), 2, &window, &bounds()).unwrap();
        for d in [[1, 0], [1, 1], [2, 1]] {
            assert_eq!(rk(&t, 0, &d), 1);
            assert_eq!(rk(&t, 1, &d), 0);
            assert_eq!(rk(&t, 2, &d), 0);
        }

        let t = loghh_homology(&mk(Coefficients::PrimeField(2)), 2, &window, &bounds()).unwrap();
        assert_eq!(rk(&t, 1, &[1, 1]), 1);
        assert_eq!(rk(&t, 2, &[1, 1]), 1);
    }

    #[test]
    fn a_monomial_relation_truncates_the_canonical_sheet() {
        let n1 = AffineMonoid::free(1);
        let target = PreLogRing::new(
            Coefficients::Integer,
            MonoidHom::identity(&n1),
            vec![MonoidElement::from(vec![3])],
            &bounds(),
        )
        .unwrap();
        let f = PreLogMap::unit(&target, &bounds()).unwrap();
        let t = loghh_homology(&f, 2, &line_degrees(0..=4), &bounds()).unwrap();
        for m in 0..=4 {
            let live = usize::from(m <= 2);
            assert_eq!(rk(&t, 0, &[m]), live, "pi0 at {m}");
            assert_eq!(rk(&t, 1, &[m]), live, "pi1 at {m}");
            assert_eq!(rk(&t, 2, &[m]), 0);
        }
    }

    #[test]
    fn a_free_extension_reproduces_its_kaehler_ranks() {
        let base = PreLogRing::base(Coefficients::Integer);
        let fe = free_prelog(&base, &["x"], &["y"], &bounds()).unwrap();
        let t = loghh_homology(
            &fe.unit,
            2,
            &degs(&[&[0, 0], &[2, 0], &[0, 1], &[1, 2]]),
            &bounds(),
        )
        .unwrap();
        for d in [[0, 0], [2, 0], [0, 1], [1, 2]] {
            let dy = usize::from(d[1] >= 1);
            assert_eq!(rk(&t, 0, &d), 1);
            assert_eq!(rk(&t, 1, &d), 1 + dy, "dlog x and dy at {d:?}");
            assert_eq!(rk(&t, 2, &d), dy, "dlog x wedge dy at {d:?}");
        }
    }

    #[test]
    fn a_log_unit_interval_looks_like_a_circle() {
        let structure = MonoidHom::new(
            AffineMonoid::free(1),
            laurent_line(),
            IntMatrix::from_rows(&[vec![1]]),
        )
        .unwrap();
        let target =
            PreLogRing::new(Coefficients::Integer, structure, Vec::new(), &bounds()).unwrap();
        let f = PreLogMap::unit(&target, &bounds()).unwrap();
        let t = loghh_homology(&f, 2, &line_degrees(-2..=2), &bounds()).unwrap();
        for m in -2..=2 {
            assert_eq!(rk(&t, 0, &[m]), 1);
            assert_eq!(rk(&t, 1, &[m]), 1);
            assert_eq!(rk(&t, 2, &[m]), 0);
        }
    }

    #[test]
    fn a_non_basis_prelog_structure_is_rejected() {
        let structure = MonoidHom::new(
            AffineMonoid::free(1),
            AffineMonoid::free(1),
            IntMatrix::from_rows(&[vec![2]]),
        )
        .unwrap();
        let target =
            PreLogRing::new(Coefficients::Integer, structure, Vec::new(), &bounds()).unwrap();
        let f = PreLogMap::unit(&target, &bounds()).unwrap();
        match loghh_homology(&f, 2, &line_degrees(0..=1), &bounds()) {
            Err(Error::Unsupported { .. }) => {}
            other => panic!("expected an unsupported error, got {other:?}"),
        }
    }

    #[test]
    fn a_strict_base_block_splits_off() {
        // Source (k[x], <x>), target k[x, y, z] with pre-log monoid <x, y>,
        // x in the base block, y a fiber dlog direction, z plain.
        let n1 = AffineMonoid::free(1);
        let source = PreLogRing::canonical(Coefficients::Integer, &n1);
        let m3 = AffineMonoid::free(3);
        let n2 = AffineMonoid::free(2);
        let structure = MonoidHom::new(
            n2.clone(),
            m3.clone(),
            IntMatrix::from_rows(&[vec![1, 0], vec![0, 1], vec![0, 0]]),
        )
        .unwrap();
        let target =
            PreLogRing::new(Coefficients::Integer, structure, Vec::new(), &bounds()).unwrap();
        let monoid_map =
            MonoidHom::new(n1.clone(), m3, IntMatrix::from_rows(&[vec![1], vec![0], vec![0]]))
                .unwrap();
        let prelog_map =
            MonoidHom::new(n1, n2, IntMatrix::from_rows(&[vec![1], vec![0]])).unwrap();
        let f = PreLogMap::new(source, target, monoid_map, prelog_map, &bounds()).unwrap();
        let t = loghh_homology(
            &f,
            2,
            &degs(&[&[2, 0, 0], &[0, 0, 1], &[0, 1, 1], &[3, 1, 0], &[-1, 0, 0]]),
            &bounds(),
        )
        .unwrap();
        assert_eq!(rk(&t, 1, &[2, 0, 0]), 1);
        assert_eq!(rk(&t, 1, &[0, 0, 1]), 2);
        assert_eq!(rk(&t, 2, &[0, 1, 1]), 1);
        assert_eq!(rk(&t, 2, &[3, 1, 0]), 0);
        assert_eq!(rk(&t, 0, &[-1, 0, 0]), 0);
    }

    #[test]
    fn graded_tor_pins_the_flatness_failure() {
        let p = AffineMonoid::from_gens(2, &[vec![2, 0], vec![1, 1], vec![0, 2]]).unwrap();
        let theta = MonoidHom::new(p, AffineMonoid::free(2), IntMatrix::identity(2)).unwrap();
        let mut window = Vec::new();
        for a in 0..=3i64 {
            for b in 0..=3i64 {
                window.push(big(&[a, b]));
            }
        }
        let t = graded_tor(&theta, Coefficients::Integer, 1, &window, &bounds()).unwrap();
        assert_eq!(t.total_rank(0), 3, "Tor_0 is spanned by 1, x, y");
        assert_eq!(t.total_rank(1), 2);
        assert_eq!(rk(&t, 1, &[2, 1]), 1);
        assert_eq!(rk(&t, 1, &[1, 2]), 1);

        let kummer = MonoidHom::new(
            AffineMonoid::free(1),
            AffineMonoid::free(1),
            IntMatrix::from_rows(&[vec![2]]),
        )
        .unwrap();
        let t =
            graded_tor(&kummer, Coefficients::Integer, 1, &line_degrees(0..=4), &bounds()).unwrap();
        assert_eq!(t.total_rank(1), 0, "flat maps have no higher Tor");
    }
}
