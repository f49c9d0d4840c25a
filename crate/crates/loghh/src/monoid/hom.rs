use super::affine::AffineMonoid;
use super::geometry::{combinations, dot, primitive};
use super::hilbert::hilbert_basis_full_rank;
use super::{MonoidElement, SearchBounds, TriState};
use crate::abelian::{elementary_divisors, kernel_basis, rank, solve, IntMatrix, QuotientGroup};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;

/// Monoid homomorphism given by an integer matrix between the ambient
/// lattices, checked at construction to map the source monoid into the
/// target monoid.
#[derive(Clone, Debug)]
pub struct MonoidHom {
    source: AffineMonoid,
    target: AffineMonoid,
    matrix: IntMatrix,
    /// Induced map on group completions in span coordinates, of shape
    /// target rank x source rank.
    gp_matrix: IntMatrix,
}

impl MonoidHom {
    pub fn new(source: AffineMonoid, target: AffineMonoid, matrix: IntMatrix) -> Result<MonoidHom> {
        MonoidHom::with_bounds(source, target, matrix, &SearchBounds::default())
    }

    pub fn with_bounds(
        source: AffineMonoid,
        target: AffineMonoid,
        matrix: IntMatrix,
        bounds: &SearchBounds,
    ) -> Result<MonoidHom> {
        if matrix.rows() != target.ambient_rank() || matrix.cols() != source.ambient_rank() {
            return Err(Error::invalid(
                "monoid-hom",
                format!(
                    "matrix is {}x{}, expected {}x{}",
                    matrix.rows(),
                    matrix.cols(),
                    target.ambient_rank(),
                    source.ambient_rank()
                ),
            ));
        }
        for g in source.generators() {
            let img = matrix.mul_vec(g);
            if !target.contains(&MonoidElement::new(img.clone()), bounds)? {
                return Err(Error::invalid(
                    "monoid-hom",
                    format!("generator {g:?} maps to {img:?}, outside the target monoid"),
                ));
            }
        }
        let gp_matrix = induced_span_matrix(&source, &target, &matrix);
        Ok(MonoidHom { source, target, matrix, gp_matrix })
    }

    pub fn identity(m: &AffineMonoid) -> MonoidHom {
        let n = m.ambient_rank();
        MonoidHom::new(m.clone(), m.clone(), IntMatrix::identity(n))
            .expect("identity maps generators to themselves")
    }

    /// Builds the homomorphism sending the i-th generator of the source to
    /// images[i], when an integral matrix between the ambient lattices
    /// realizing those assignments exists. The matrix is canonical only on
    /// the source span; choices off the span do not affect monoid values.
    pub fn from_generator_images(
        source: &AffineMonoid,
        target: &AffineMonoid,
        images: &[Vec<BigInt>],
        bounds: &SearchBounds,
    ) -> Result<MonoidHom> {
        let gens = source.generators();
        if images.len() != gens.len() {
            return Err(Error::invalid(
                "monoid-hom",
                format!("{} images for {} generators", images.len(), gens.len()),
            ));
        }
        let k = gens.len();
        let gt = IntMatrix::from_fn(k, source.ambient_rank(), |i, j| gens[i][j].clone());
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(target.ambient_rank());
        for out in 0..target.ambient_rank() {
            let rhs: Vec<BigInt> = (0..k).map(|i| images[i][out].clone()).collect();
            let row = solve(&gt, &rhs).ok_or_else(|| {
                Error::unsupported(
                    "monoid-hom",
                    "the generator images admit no integral linear extension to the ambient lattice",
                )
            })?;
            rows.push(row);
        }
        let matrix =
            IntMatrix::from_fn(target.ambient_rank(), source.ambient_rank(), |i, j| {
                rows[i][j].clone()
            });
        MonoidHom::with_bounds(source.clone(), target.clone(), matrix, bounds)
    }

    pub fn source(&self) -> &AffineMonoid {
        &self.source
    }

    pub fn target(&self) -> &AffineMonoid {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn gp_matrix(&self) -> &IntMatrix {
        &self.gp_matrix
    }

    pub fn apply(&self, v: &MonoidElement) -> MonoidElement {
        MonoidElement::new(self.matrix.mul_vec(&v.vector))
    }

    pub fn apply_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.matrix.mul_vec(v)
    }

    /// self after other; the target of `other` must equal the source of
    /// self as a submonoid presentation.
    pub fn compose(&self, other: &MonoidHom) -> Result<MonoidHom> {
        if other.target != self.source {
            return Err(Error::invalid(
                "monoid-hom",
                "composition needs matching middle monoid",
            ));
        }
        let matrix = self.matrix.mul(&other.matrix);
        let gp_matrix = self.gp_matrix.mul(&other.gp_matrix);
        Ok(MonoidHom {
            source: other.source.clone(),
            target: self.target.clone(),
            matrix,
            gp_matrix,
        })
    }

    pub fn is_gp_injective(&self) -> bool {
        rank(&self.gp_matrix) == self.source.rank()
    }

    /// Surjective up to finite index on group completions.
    pub fn is_virtually_surjective(&self) -> bool {
        rank(&self.gp_matrix) == self.target.rank()
    }

    pub fn is_gp_isomorphism(&self) -> bool {
        if self.source.rank() != self.target.rank() {
            return false;
        }
        let div = elementary_divisors(&self.gp_matrix);
        div.len() == self.source.rank() && div.iter().all(|d| d.is_one())
    }
}

fn induced_span_matrix(
    source: &AffineMonoid,
    target: &AffineMonoid,
    matrix: &IntMatrix,
) -> IntMatrix {
    let cols: Vec<Vec<BigInt>> = (0..source.rank())
        .map(|j| {
            let img = matrix.mul_vec(&source.span().basis.column(j));
            target
                .span()
                .coords(&img)
                .expect("images of span vectors lie in the target span")
        })
        .collect();
    IntMatrix::from_fn(target.rank(), source.rank(), |i, j| cols[j][i].clone())
}

/// Exactness of theta: whether the source equals the full preimage of the
/// target monoid under the induced map of group completions.
///
/// When the target is saturated the preimage is the lattice-point monoid of
/// a rational polyhedral cone in the source group; its generators (a basis
/// of the lineality part plus a Hilbert basis of the pointed part) are
/// checked for membership in the source, which decides the question. The
/// fallback scans a box in the source group for counterexamples.
pub fn is_exact(theta: &MonoidHom, bounds: &SearchBounds) -> TriState {
    if let Ok(Some(answer)) = exactness_via_saturation(theta, bounds) {
        return answer;
    }
    exactness_by_search(theta, bounds)
}

fn exactness_via_saturation(theta: &MonoidHom, bounds: &SearchBounds) -> Result<Option<TriState>> {
    let p = theta.source();
    let Some(preimage_gens) = preimage_generators(theta, bounds)? else {
        return Ok(None);
    };
    for q in &preimage_gens {
        if !p.contains_span_coords(q, bounds)? {
            return Ok(Some(TriState::No));
        }
    }
    Ok(Some(TriState::Yes))
}

/// Generators, in source span coordinates, of the preimage monoid of the
/// target under the induced group map. Only available when the target is
/// saturated, where the preimage is the lattice-point monoid of a rational
/// cone: a lineality lattice plus a Hilbert basis of the pointed quotient.
/// Returns None when the target is not saturated.
pub(crate) fn preimage_generators(
    theta: &MonoidHom,
    bounds: &SearchBounds,
) -> Result<Option<Vec<Vec<BigInt>>>> {
    let m = theta.target();
    if !m.is_saturated(bounds)? {
        return Ok(None);
    }
    let sharp = m.sharp_data();
    let sproj = m.sharp_projection().free_projection_matrix();
    let comp = sproj.mul(theta.gp_matrix());
    let nmat = IntMatrix::from_fn(sharp.normals.len(), sharp.rank, |i, j| {
        sharp.normals[i][j].clone()
    });
    // Rows of a are the supporting inequalities of M pulled back to source
    // span coordinates; their nonnegativity locus meets the source lattice
    // in exactly the preimage monoid, because M is saturated.
    let a = nmat.mul(&comp);
    let lin = kernel_basis(&a);
    let wall = QuotientGroup::from_relations(&lin);
    let rbar = wall.free_rank();
    if rbar > 4 {
        return Ok(None);
    }
    let section = wall.section_matrix();
    let abar = a.mul(&section);
    let mut rays: BTreeSet<Vec<BigInt>> = BTreeSet::new();
    if rbar > 0 {
        let arows: Vec<Vec<BigInt>> = (0..abar.rows()).map(|i| abar.row(i)).collect();
        for subset in combinations(arows.len(), rbar - 1) {
            let sub = IntMatrix::from_fn(subset.len(), rbar, |i, j| arows[subset[i]][j].clone());
            let kern = kernel_basis(&sub);
            if kern.cols() != 1 {
                continue;
            }
            let v = primitive(&kern.column(0));
            let vals: Vec<BigInt> = arows.iter().map(|r| dot(r, &v)).collect();
            if vals.iter().all(|x| !x.is_negative()) {
                rays.insert(v);
            } else if vals.iter().all(|x| !x.is_positive()) {
                rays.insert(v.iter().map(|x| -x).collect());
            }
        }
    }
    let ray_list: Vec<Vec<BigInt>> = rays.into_iter().collect();
    let hb = hilbert_basis_full_rank(&ray_list, rbar)?;
    let mut preimage_gens: Vec<Vec<BigInt>> = Vec::new();
    for j in 0..lin.cols() {
        let c = lin.column(j);
        preimage_gens.push(c.iter().map(|x| -x).collect());
        preimage_gens.push(c);
    }
    for h in &hb {
        preimage_gens.push(section.mul_vec(h));
    }
    Ok(Some(preimage_gens))
}

fn exactness_by_search(theta: &MonoidHom, bounds: &SearchBounds) -> TriState {
    let p = theta.source();
    let m = theta.target();
    let r = p.rank();
    let mut radius = bounds.box_radius.max(1);
    while r > 0 && (2 * radius as u64 + 1).pow(r as u32) > 200_000 && radius > 1 {
        radius -= 1;
    }
    let mut cur = vec![-radius; r];
    'scan: loop {
        let x: Vec<BigInt> = cur.iter().map(|&v| BigInt::from(v)).collect();
        let img = theta.gp_matrix().mul_vec(&x);
        if let Ok(true) = m.contains_span_coords(&img, bounds) {
            if let Ok(false) = p.contains_span_coords(&x, bounds) {
                return TriState::No;
            }
        }
        for j in 0..r {
            if cur[j] < radius {
                cur[j] += 1;
                continue 'scan;
            }
            cur[j] = -radius;
        }
        break;
    }
    TriState::Unknown(radius as u64)
}

/// The amalgamated sum of theta: P -> M and phi: P -> N, formed as the image
/// of M + N in the pushout of group completions. This is the integralization
/// of the raw monoid pushout; the caveat flag records when the two can
/// differ, namely when integrality of one of the legs is not certified.
#[derive(Clone, Debug)]
pub struct AmalgamatedSum {
    pub monoid: AffineMonoid,
    pub from_left: MonoidHom,
    pub from_right: MonoidHom,
    /// Set when the integralized pushout may differ from the raw pushout.
    pub integral_caveat: bool,
}

pub fn amalgamated_sum(
    theta: &MonoidHom,
    phi: &MonoidHom,
    bounds: &SearchBounds,
) -> Result<AmalgamatedSum> {
    if theta.source() != phi.source() {
        return Err(Error::invalid("amalgamated_sum", "the two legs have different sources"));
    }
    let m = theta.target();
    let n = phi.target();
    let rm = m.rank();
    let rn = n.rank();
    let rp = theta.source().rank();
    let relations = IntMatrix::from_fn(rm + rn, rp, |i, j| {
        if i < rm {
            theta.gp_matrix().get(i, j).clone()
        } else {
            -phi.gp_matrix().get(i - rm, j).clone()
        }
    });
    let push = QuotientGroup::from_relations(&relations);
    if !push.torsion_moduli().is_empty() {
        return Err(Error::unsupported(
            "amalgamated_sum",
            format!(
                "pushout group has torsion {:?} and does not embed in a lattice",
                push.torsion_moduli()
            ),
        ));
    }
    let proj = push.free_projection_matrix();
    let ambient = push.free_rank();
    let stacked = |c: &[BigInt], left: bool| -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); rm + rn];
        for (i, x) in c.iter().enumerate() {
            let slot = if left { i } else { rm + i };
            v[slot] = x.clone();
        }
        proj.mul_vec(&v)
    };
    let left_images: Vec<Vec<BigInt>> = m
        .generator_span_coords()
        .iter()
        .map(|c| stacked(c, true))
        .collect();
    let right_images: Vec<Vec<BigInt>> = n
        .generator_span_coords()
        .iter()
        .map(|c| stacked(c, false))
        .collect();
    let mut gens = left_images.clone();
    gens.extend(right_images.iter().cloned());
    let sum = AffineMonoid::new(ambient, gens)?;
    let from_left = MonoidHom::from_generator_images(m, &sum, &left_images, bounds)?;
    let from_right = MonoidHom::from_generator_images(n, &sum, &right_images, bounds)?;
    let integral_caveat = !(super::is_integral(theta, bounds).is_yes()
        && super::is_integral(phi, bounds).is_yes());
    Ok(AmalgamatedSum { monoid: sum, from_left, from_right, integral_caveat })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bounds() -> SearchBounds {
        SearchBounds::default()
    }

    fn index_two() -> AffineMonoid {
        AffineMonoid::from_gens(2, &[vec![2, 0], vec![1, 1], vec![0, 2]]).unwrap()
    }

    fn inclusion(sub: &AffineMonoid, sup: &AffineMonoid) -> MonoidHom {
        let n = sub.ambient_rank();
        MonoidHom::new(sub.clone(), sup.clone(), IntMatrix::identity(n)).unwrap()
    }

    #[test]
    fn construction_rejects_escaping_generators() {
        let free = AffineMonoid::free(1);
        let neg = IntMatrix::from_rows(&[vec![-1]]);
        assert!(MonoidHom::new(free.clone(), free, neg).is_err());
    }

    #[test]
    fn identity_is_exact() {
        let id = MonoidHom::identity(&AffineMonoid::free(2));
        assert!(is_exact(&id, &bounds()).is_yes());
    }

    #[test]
    fn index_two_inclusion_is_exact() {
        let theta = inclusion(&index_two(), &AffineMonoid::free(2));
        assert!(is_exact(&theta, &bounds()).is_yes());
    }

    #[test]
    fn diagonal_is_exact() {
        let diag = IntMatrix::from_rows(&[vec![1], vec![1]]);
        let theta =
            MonoidHom::new(AffineMonoid::free(1), AffineMonoid::free(2), diag).unwrap();
        assert!(is_exact(&theta, &bounds()).is_yes());
    }

    #[test]
    fn strict_submonoid_of_its_saturation_is_not_exact() {
        // <2, 3> inside N: the preimage of N is all of N, which is strictly
        // larger than the source.
        let nm = AffineMonoid::from_gens(1, &[vec![2], vec![3]]).unwrap();
        let theta = inclusion(&nm, &AffineMonoid::free(1));
        assert!(is_exact(&theta, &bounds()).is_no());
    }

    #[test]
    fn amalgamated_sum_over_trivial_base_is_the_product() {
        let f1 = AffineMonoid::free(1);
        let triv = AffineMonoid::trivial();
        let into = |m: &AffineMonoid| {
            MonoidHom::new(triv.clone(), m.clone(), IntMatrix::zeros(1, 0)).unwrap()
        };
        let s = amalgamated_sum(&into(&f1), &into(&f1), &bounds()).unwrap();
        assert_eq!(s.monoid.rank(), 2);
        assert_eq!(s.monoid.generators().len(), 2);
        assert!(s.monoid.is_saturated(&bounds()).unwrap());
        assert!(!s.integral_caveat);
    }

    #[test]
    fn codiagonal_of_identity_folds_back() {
        let f1 = AffineMonoid::free(1);
        let id = MonoidHom::identity(&f1);
        let s = amalgamated_sum(&id, &id, &bounds()).unwrap();
        assert_eq!(s.monoid.rank(), 1);
        assert_eq!(s.monoid.generators().len(), 1);
        assert_eq!(s.from_left.matrix(), s.from_right.matrix());
    }

    #[test]
    fn pushout_of_planes_over_diagonal_has_rank_three() {
        let f2 = AffineMonoid::free(2);
        let diag = IntMatrix::from_rows(&[vec![1], vec![1]]);
        let theta =
            MonoidHom::new(AffineMonoid::free(1), f2.clone(), diag).unwrap();
        let s = amalgamated_sum(&theta, &theta, &bounds()).unwrap();
        assert_eq!(s.monoid.rank(), 3);
        assert_eq!(s.monoid.generators().len(), 4);
        // The defining relation: e1 + e2 = f1 + f2 in the pushout.
        let e1 = vec![BigInt::from(1), BigInt::from(0)];
        let e2 = vec![BigInt::from(0), BigInt::from(1)];
        let side = |h: &MonoidHom| -> Vec<BigInt> {
            h.apply_vec(&e1)
                .iter()
                .zip(&h.apply_vec(&e2))
                .map(|(a, b)| a + b)
                .collect()
        };
        assert_eq!(side(&s.from_left), side(&s.from_right));
        assert!(!s.integral_caveat);
    }

    #[test]
    fn torsion_pushout_is_refused() {
        let f1 = AffineMonoid::free(1);
        let twice = IntMatrix::from_rows(&[vec![2]]);
        let theta = MonoidHom::new(f1.clone(), f1.clone(), twice).unwrap();
        let err = amalgamated_sum(&theta, &theta, &bounds()).unwrap_err();
        assert!(matches!(err, Error::Unsupported { .. }));
    }
}
