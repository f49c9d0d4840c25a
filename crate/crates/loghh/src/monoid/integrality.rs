use super::affine::AffineMonoid;
use super::hom::MonoidHom;
use super::{MonoidElement, SearchBounds, TriState};
use crate::abelian::{Coefficients, Complex, IntMatrix, ModuleDesc};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// Integrality of theta in the sense that pushouts along it preserve
/// integrality (cancellativity). Yes answers come from certificates that
/// prove the property outright; No answers come from a nonvanishing graded
/// Tor_1, which refutes flatness of the induced map of monoid algebras and
/// with it integrality of an injective map. Anything else is Unknown at the
/// exhausted bound, so answers never flip as bounds grow.
pub fn is_integral(theta: &MonoidHom, bounds: &SearchBounds) -> TriState {
    if theta.source().is_group() {
        return TriState::Yes;
    }
    if rank_one_source_certificate(theta.source()) {
        return TriState::Yes;
    }
    if let Ok(true) = split_summand_certificate(theta, bounds) {
        return TriState::Yes;
    }
    match tor_witness(theta, bounds) {
        Ok(Some(_)) => TriState::No,
        _ => TriState::Unknown(bounds.box_radius.unsigned_abs()),
    }
}

/// Maps out of U + N are integral: the defining condition
/// theta(a1) + b1 = theta(a2) + b2 can always be balanced by cancelling the
/// unit parts and splitting off the smaller free exponent.
fn rank_one_source_certificate(p: &AffineMonoid) -> bool {
    let sharp = p.sharp_data();
    if sharp.gens.len() <= 1 {
        return true;
    }
    let mut minimal = 0usize;
    for g in &sharp.gens {
        let factorizations = sharp.factorizations(g);
        let irreducible = factorizations
            .iter()
            .all(|counts| counts.iter().map(|&c| u128::from(c)).sum::<u128>() == 1);
        if irreducible {
            minimal += 1;
            if minimal > 1 {
                return false;
            }
        }
    }
    minimal <= 1
}

/// When theta embeds the source isomorphically onto a direct factor of the
/// target (the target generators split between the image monoid and a
/// complement spanning an independent subspace), pushouts along theta are
/// products with the complement and stay integral.
fn split_summand_certificate(theta: &MonoidHom, bounds: &SearchBounds) -> Result<bool> {
    if !theta.is_gp_injective() {
        return Ok(false);
    }
    let target = theta.target();
    let images: Vec<Vec<BigInt>> = theta
        .source()
        .generators()
        .iter()
        .map(|g| theta.apply_vec(g))
        .collect();
    let image_monoid = AffineMonoid::new(target.ambient_rank(), images)?;
    let mut inside: Vec<Vec<BigInt>> = Vec::new();
    let mut outside: Vec<Vec<BigInt>> = Vec::new();
    for g in target.generators() {
        if image_monoid.contains(&MonoidElement::new(g.clone()), bounds)? {
            inside.push(g.clone());
        } else {
            outside.push(g.clone());
        }
    }
    let inside_monoid = AffineMonoid::new(target.ambient_rank(), inside)?;
    for img in image_monoid.generators() {
        if !inside_monoid.contains(&MonoidElement::new(img.clone()), bounds)? {
            return Ok(false);
        }
    }
    Ok(inside_monoid.rank() + side_rank(target.ambient_rank(), &outside) == target.rank())
}

fn side_rank(ambient: usize, vectors: &[Vec<BigInt>]) -> usize {
    let m = IntMatrix::from_fn(ambient, vectors.len(), |i, j| vectors[j][i].clone());
    crate::abelian::rank(&m)
}

/// Searches a degree box for a nonzero Tor_1 of the target monoid algebra
/// against the base ring, over the source monoid algebra. Only attempted
/// for sharp monoids and injective group maps, where graded pieces are
/// finite and nonvanishing refutes integrality.
fn tor_witness(theta: &MonoidHom, bounds: &SearchBounds) -> Result<Option<Vec<BigInt>>> {
    if !theta.is_gp_injective() || !theta.source().is_sharp() || !theta.target().is_sharp() {
        return Ok(None);
    }
    let m = theta.target();
    let radius = BigInt::from(bounds.box_radius.unsigned_abs());
    let grading = &m.sharp_data().grading;
    let mut grade_cap = BigInt::zero();
    for w in grading {
        grade_cap += w.abs() * &radius;
    }
    let grade_cap = grade_cap.min(BigInt::from(10_000u32));
    let cap = grade_cap.to_u64().unwrap_or(0);
    for d in m.sharp_elements_up_to(cap) {
        if d.iter().any(|x| x.abs() > radius) || d.iter().all(|x| x.is_zero()) {
            continue;
        }
        let tor = graded_tor_dims(theta, &d, 1, bounds)?;
        if !tor[1].is_zero() {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

/// Graded Tor of the target monoid algebra, as a module over the source
/// monoid algebra via theta, against the base ring, in a single multidegree
/// of the target span lattice. Returns Tor_0 through Tor_n_max computed from
/// the normalized bar complex truncated one level above n_max.
pub(crate) fn graded_tor_dims(
    theta: &MonoidHom,
    degree: &[BigInt],
    n_max: usize,
    bounds: &SearchBounds,
) -> Result<Vec<ModuleDesc>> {
    let complex = match graded_tor_complex(theta, degree, n_max, bounds)? {
        Some(c) => c,
        None => return Ok(vec![ModuleDesc::zero(); n_max + 1]),
    };
    (0..=n_max)
        .map(|i| complex.homology(i, Coefficients::Integer))
        .collect()
}

/// The truncated graded bar complex behind `graded_tor_dims`, so callers can
/// take homology with other coefficient rings. Returns None when the degree
/// lies outside the target monoid and every Tor piece vanishes.
///
/// Both monoids must be sharp and every source generator must land in a
/// strictly positive degree; that makes each graded piece of the bar
/// complex a finitely generated free abelian group.
pub(crate) fn graded_tor_complex(
    theta: &MonoidHom,
    degree: &[BigInt],
    n_max: usize,
    bounds: &SearchBounds,
) -> Result<Option<Complex>> {
    let m = theta.target();
    let p = theta.source();
    if !m.is_sharp() || !p.is_sharp() {
        return Err(Error::unsupported(
            "graded_tor",
            "graded pieces are finite only for sharp monoids",
        ));
    }
    let grade = |v: &[BigInt]| m.sharp_data().grade(v);
    let p_gens = p.generator_span_coords();
    let images: Vec<Vec<BigInt>> = p_gens
        .iter()
        .map(|c| theta.gp_matrix().mul_vec(c))
        .collect();
    for img in &images {
        if grade(img) < BigInt::one() {
            return Err(Error::unsupported(
                "graded_tor",
                "a source generator lands in degree zero",
            ));
        }
    }
    if !m.contains_span_coords(degree, bounds)? {
        return Ok(None);
    }
    let dgrade = grade(degree);
    // Source elements with image grade within budget, excluding zero.
    let mut pool: BTreeMap<Vec<BigInt>, Vec<BigInt>> = BTreeMap::new();
    let mut frontier = vec![vec![BigInt::zero(); p.rank()]];
    let mut seen: BTreeMap<Vec<BigInt>, ()> = BTreeMap::new();
    seen.insert(frontier[0].clone(), ());
    while let Some(cur) = frontier.pop() {
        for g in p_gens {
            let next: Vec<BigInt> = cur.iter().zip(g).map(|(a, b)| a + b).collect();
            if seen.contains_key(&next) {
                continue;
            }
            let img = theta.gp_matrix().mul_vec(&next);
            if grade(&img) <= dgrade {
                seen.insert(next.clone(), ());
                pool.insert(next.clone(), img);
                frontier.push(next);
            }
        }
    }
    let plist: Vec<(Vec<BigInt>, Vec<BigInt>)> = pool.into_iter().collect();
    let index_of: BTreeMap<Vec<BigInt>, usize> = plist
        .iter()
        .enumerate()
        .map(|(i, (c, _))| (c.clone(), i))
        .collect();
    // Tuple bases per bar level: (target element coords, source indices).
    let mut levels: Vec<Vec<(Vec<BigInt>, Vec<usize>)>> = Vec::new();
    for n in 0..=n_max + 1 {
        let mut basis: Vec<(Vec<BigInt>, Vec<usize>)> = Vec::new();
        let mut stack: Vec<(Vec<usize>, Vec<BigInt>)> =
            vec![(Vec::new(), degree.to_vec())];
        while let Some((ps, rest)) = stack.pop() {
            if ps.len() == n {
                if m.contains_span_coords(&rest, bounds)? {
                    basis.push((rest, ps));
                }
                continue;
            }
            for (i, (_, img)) in plist.iter().enumerate() {
                let next: Vec<BigInt> = rest.iter().zip(img).map(|(a, b)| a - b).collect();
                if grade(&next) >= BigInt::zero() {
                    let mut ps2 = ps.clone();
                    ps2.push(i);
                    stack.push((ps2, next));
                }
            }
        }
        basis.sort();
        levels.push(basis);
    }
    let ranks: Vec<usize> = levels.iter().map(|l| l.len()).collect();
    let mut boundaries: Vec<IntMatrix> = Vec::new();
    for n in 0..=n_max {
        let lower: BTreeMap<&(Vec<BigInt>, Vec<usize>), usize> =
            levels[n].iter().enumerate().map(|(i, t)| (t, i)).collect();
        let mut mat = IntMatrix::zeros(levels[n].len(), levels[n + 1].len());
        for (col, (mv, ps)) in levels[n + 1].iter().enumerate() {
            let mut sign = BigInt::one();
            // Face 0 pushes the first source factor into the target element;
            // inner faces merge adjacent source factors; the final face hits
            // the augmentation and vanishes.
            let img = &plist[ps[0]].1;
            let absorbed: Vec<BigInt> = mv.iter().zip(img).map(|(a, b)| a + b).collect();
            let key = (absorbed, ps[1..].to_vec());
            let row = *lower.get(&key).expect("face lands in the lower basis");
            let val = mat.get(row, col) + &sign;
            mat.set(row, col, val);
            for j in 1..ps.len() {
                sign = -sign;
                let merged_coords: Vec<BigInt> = plist[ps[j - 1]]
                    .0
                    .iter()
                    .zip(&plist[ps[j]].0)
                    .map(|(a, b)| a + b)
                    .collect();
                let merged = *index_of
                    .get(&merged_coords)
                    .expect("merged source element stays within the grade budget");
                let mut qs = Vec::with_capacity(ps.len() - 1);
                qs.extend_from_slice(&ps[..j - 1]);
                qs.push(merged);
                qs.extend_from_slice(&ps[j + 1..]);
                let key = (mv.clone(), qs);
                let row = *lower.get(&key).expect("face lands in the lower basis");
                let val = mat.get(row, col) + &sign;
                mat.set(row, col, val);
            }
        }
        boundaries.push(mat);
    }
    Ok(Some(Complex::new(ranks, boundaries)?))
}
