use super::geometry::{dot, in_cone, supporting_normals};
use super::{MonoidElement, SearchBounds};
use crate::abelian::{inverse_unimodular, smith_normal_form, FgAbGroup, IntMatrix, QuotientGroup};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::OnceLock;

/// The lattice spanned by a vector list inside an ambient Z^d, with exact
/// coordinate maps both ways.
#[derive(Clone, Debug)]
pub(crate) struct SpanLattice {
    pub(crate) ambient: usize,
    pub(crate) rank: usize,
    /// ambient x rank matrix whose columns form a basis of the span.
    pub(crate) basis: IntMatrix,
    u: IntMatrix,
    divisors: Vec<BigInt>,
}

impl SpanLattice {
    pub(crate) fn from_vectors(ambient: usize, vectors: &[Vec<BigInt>]) -> SpanLattice {
        let a = IntMatrix::from_fn(ambient, vectors.len(), |i, j| vectors[j][i].clone());
        let f = smith_normal_form(&a);
        let upto = ambient.min(vectors.len());
        let mut divisors = Vec::new();
        for i in 0..upto {
            let d = f.d.get(i, i);
            if d.is_zero() {
                break;
            }
            divisors.push(d.clone());
        }
        let rank = divisors.len();
        let u_inv = inverse_unimodular(&f.u);
        let basis = IntMatrix::from_fn(ambient, rank, |i, j| u_inv.get(i, j) * &divisors[j]);
        SpanLattice { ambient, rank, basis, u: f.u, divisors }
    }

    /// Coordinates of v in the span basis; None when v is outside the span.
    pub(crate) fn coords(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        debug_assert_eq!(v.len(), self.ambient);
        let y = self.u.mul_vec(v);
        for item in y.iter().skip(self.rank) {
            if !item.is_zero() {
                return None;
            }
        }
        let mut c = Vec::with_capacity(self.rank);
        for i in 0..self.rank {
            let (q, r) = y[i].div_rem(&self.divisors[i]);
            if !r.is_zero() {
                return None;
            }
            c.push(q);
        }
        Some(c)
    }

    pub(crate) fn from_coords(&self, c: &[BigInt]) -> Vec<BigInt> {
        self.basis.mul_vec(c)
    }
}

/// The sharp quotient of an affine monoid: generators in the quotient
/// lattice, supporting normals of their cone, and a strictly positive
/// grading (the sum of the normals).
#[derive(Clone, Debug)]
pub(crate) struct SharpData {
    pub(crate) rank: usize,
    pub(crate) gens: Vec<Vec<BigInt>>,
    pub(crate) normals: Vec<Vec<BigInt>>,
    pub(crate) grading: Vec<BigInt>,
}

impl SharpData {
    fn new(rank: usize, gens: Vec<Vec<BigInt>>) -> Result<SharpData> {
        let normals = supporting_normals(&gens, rank);
        let mut grading = vec![BigInt::zero(); rank];
        for n in &normals {
            for (i, x) in n.iter().enumerate() {
                grading[i] += x;
            }
        }
        for g in &gens {
            if dot(&grading, g) < BigInt::one() {
                return Err(Error::unsupported(
                    "affine-monoid",
                    "no strictly positive grading exists on the sharp part",
                ));
            }
        }
        Ok(SharpData { rank, gens, normals, grading })
    }

    pub(crate) fn grade(&self, x: &[BigInt]) -> BigInt {
        dot(&self.grading, x)
    }

    pub(crate) fn in_cone(&self, x: &[BigInt]) -> bool {
        in_cone(&self.normals, x)
    }

    /// Exact membership in the monoid generated by the sharp generators,
    /// by memoized descent: subtract generators while staying in the cone.
    /// The grading strictly decreases along every step, so the search space
    /// is finite; the cap only guards against oversized inputs.
    pub(crate) fn generated_membership(&self, target: &[BigInt], max_degree: u64) -> Result<bool> {
        if target.iter().all(|x| x.is_zero()) {
            return Ok(true);
        }
        if !self.in_cone(target) {
            return Ok(false);
        }
        let grade = self.grade(target);
        if grade > BigInt::from(max_degree) {
            return Err(Error::inconclusive(
                "contains",
                max_degree,
                format!("element has grading degree {grade}; raise the degree bound"),
            ));
        }
        let mut memo: BTreeMap<Vec<BigInt>, bool> = BTreeMap::new();
        Ok(self.descend(target, &mut memo))
    }

    fn descend(&self, t: &[BigInt], memo: &mut BTreeMap<Vec<BigInt>, bool>) -> bool {
        if t.iter().all(|x| x.is_zero()) {
            return true;
        }
        if let Some(&b) = memo.get(t) {
            return b;
        }
        let mut ok = false;
        for g in &self.gens {
            let next: Vec<BigInt> = t.iter().zip(g).map(|(a, b)| a - b).collect();
            if self.in_cone(&next) && self.descend(&next, memo) {
                ok = true;
                break;
            }
        }
        memo.insert(t.to_vec(), ok);
        ok
    }

    /// All monoid elements of grading at most max_grade, sorted.
    pub(crate) fn elements_up_to(&self, max_grade: u64) -> Vec<Vec<BigInt>> {
        let cap = BigInt::from(max_grade);
        let zero = vec![BigInt::zero(); self.rank];
        let mut seen: BTreeSet<Vec<BigInt>> = BTreeSet::new();
        seen.insert(zero.clone());
        let mut queue: VecDeque<Vec<BigInt>> = VecDeque::new();
        queue.push_back(zero);
        while let Some(t) = queue.pop_front() {
            for g in &self.gens {
                let next: Vec<BigInt> = t.iter().zip(g).map(|(a, b)| a + b).collect();
                if self.grade(&next) <= cap && !seen.contains(&next) {
                    seen.insert(next.clone());
                    queue.push_back(next);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// All multisets of generators summing to the target, as count vectors
    /// aligned with the generator list.
    pub(crate) fn factorizations(&self, target: &[BigInt]) -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        let mut counts = vec![0u64; self.gens.len()];
        self.factor_from(0, target, &mut counts, &mut out);
        out
    }

    fn factor_from(
        &self,
        start: usize,
        remaining: &[BigInt],
        counts: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
    ) {
        if remaining.iter().all(|x| x.is_zero()) {
            out.push(counts.clone());
            return;
        }
        for j in start..self.gens.len() {
            let next: Vec<BigInt> = remaining
                .iter()
                .zip(&self.gens[j])
                .map(|(a, b)| a - b)
                .collect();
            if self.in_cone(&next) {
                counts[j] += 1;
                self.factor_from(j, &next, counts, out);
                counts[j] -= 1;
            }
        }
    }
}

/// Group completion data: the abstract group, a basis of it inside the
/// ambient lattice, a basis of the unit lattice, and the sharp quotient as
/// its own affine monoid.
#[derive(Clone, Debug)]
pub struct GroupCompletion {
    pub group: FgAbGroup,
    /// ambient x rank matrix; columns are a basis of M^gp inside Z^d.
    pub embedding: IntMatrix,
    pub units: Vec<Vec<BigInt>>,
    pub sharp: AffineMonoid,
}

/// Finitely generated submonoid of a lattice. Construction computes the
/// span lattice, the supporting normals of the generator cone, the unit
/// subgroup (generators orthogonal to every normal), and the splitting
/// M = U + M_sharp; it fails if the unit lattice does not split off
/// integrally, which is exactly when M_sharp would not embed in a lattice.
#[derive(Debug)]
pub struct AffineMonoid {
    ambient_rank: usize,
    generators: Vec<Vec<BigInt>>,
    span: SpanLattice,
    gens_span: Vec<Vec<BigInt>>,
    unit_idx: Vec<usize>,
    unit_basis: Vec<Vec<BigInt>>,
    sharp_proj: QuotientGroup,
    sharp: SharpData,
    saturated: OnceLock<bool>,
}

impl Clone for AffineMonoid {
    fn clone(&self) -> Self {
        let saturated = OnceLock::new();
        if let Some(&b) = self.saturated.get() {
            let _ = saturated.set(b);
        }
        AffineMonoid {
            ambient_rank: self.ambient_rank,
            generators: self.generators.clone(),
            span: self.span.clone(),
            gens_span: self.gens_span.clone(),
            unit_idx: self.unit_idx.clone(),
            unit_basis: self.unit_basis.clone(),
            sharp_proj: self.sharp_proj.clone(),
            sharp: self.sharp.clone(),
            saturated,
        }
    }
}

impl PartialEq for AffineMonoid {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_rank == other.ambient_rank && self.generators == other.generators
    }
}

impl Eq for AffineMonoid {}

impl AffineMonoid {
    pub fn new(ambient_rank: usize, generators: Vec<Vec<BigInt>>) -> Result<AffineMonoid> {
        for g in &generators {
            if g.len() != ambient_rank {
                return Err(Error::invalid(
                    "affine-monoid",
                    format!("generator has length {}, ambient rank is {ambient_rank}", g.len()),
                ));
            }
        }
        let gens: Vec<Vec<BigInt>> = generators
            .into_iter()
            .filter(|g| !g.iter().all(|x| x.is_zero()))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let span = SpanLattice::from_vectors(ambient_rank, &gens);
        let gens_span: Vec<Vec<BigInt>> = gens
            .iter()
            .map(|g| span.coords(g).expect("generators lie in their own span"))
            .collect();
        let full_normals = supporting_normals(&gens_span, span.rank);
        let unit_idx: Vec<usize> = (0..gens.len())
            .filter(|&i| full_normals.iter().all(|n| dot(n, &gens_span[i]).is_zero()))
            .collect();
        let unit_cols = IntMatrix::from_fn(span.rank, unit_idx.len(), |i, j| {
            gens_span[unit_idx[j]][i].clone()
        });
        let sharp_proj = QuotientGroup::from_relations(&unit_cols);
        if !sharp_proj.torsion_moduli().is_empty() {
            return Err(Error::unsupported(
                "affine-monoid",
                "the unit lattice does not split off the group completion integrally",
            ));
        }
        let unit_span_vectors: Vec<Vec<BigInt>> =
            unit_idx.iter().map(|&i| gens_span[i].clone()).collect();
        let unit_span = SpanLattice::from_vectors(span.rank, &unit_span_vectors);
        let unit_basis: Vec<Vec<BigInt>> = (0..unit_span.rank)
            .map(|j| span.from_coords(&unit_span.basis.column(j)))
            .collect();
        let sharp_gens: Vec<Vec<BigInt>> = gens_span
            .iter()
            .map(|c| sharp_proj.project(c).free)
            .filter(|f| !f.iter().all(|x| x.is_zero()))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let sharp = SharpData::new(sharp_proj.free_rank(), sharp_gens)?;
        Ok(AffineMonoid {
            ambient_rank,
            generators: gens,
            span,
            gens_span,
            unit_idx,
            unit_basis,
            sharp_proj,
            sharp,
            saturated: OnceLock::new(),
        })
    }

    pub fn from_gens(ambient_rank: usize, gens: &[Vec<i64>]) -> Result<AffineMonoid> {
        let big = gens
            .iter()
            .map(|g| g.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        AffineMonoid::new(ambient_rank, big)
    }

    /// The free monoid N^n on the standard basis.
    pub fn free(n: usize) -> AffineMonoid {
        let gens: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| i64::from(j == i)).collect())
            .collect();
        AffineMonoid::from_gens(n, &gens).expect("free monoid is valid")
    }

    /// The full lattice Z^n as a monoid.
    pub fn lattice(n: usize) -> AffineMonoid {
        let mut gens: Vec<Vec<i64>> = Vec::new();
        for i in 0..n {
            let mut e = vec![0i64; n];
            e[i] = 1;
            gens.push(e.clone());
            e[i] = -1;
            gens.push(e);
        }
        AffineMonoid::from_gens(n, &gens).expect("lattice monoid is valid")
    }

    pub fn trivial() -> AffineMonoid {
        AffineMonoid::new(0, Vec::new()).expect("trivial monoid is valid")
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn generators(&self) -> &[Vec<BigInt>] {
        &self.generators
    }

    /// Rank of the group completion.
    pub fn rank(&self) -> usize {
        self.span.rank
    }

    pub fn unit_rank(&self) -> usize {
        self.unit_basis.len()
    }

    pub fn sharp_rank(&self) -> usize {
        self.sharp.rank
    }

    pub fn is_sharp(&self) -> bool {
        self.unit_basis.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty()
    }

    /// Whether the monoid is a group (every generator invertible).
    pub fn is_group(&self) -> bool {
        self.sharp.gens.is_empty()
    }

    pub(crate) fn span(&self) -> &SpanLattice {
        &self.span
    }

    pub(crate) fn sharp_data(&self) -> &SharpData {
        &self.sharp
    }

    pub(crate) fn sharp_projection(&self) -> &QuotientGroup {
        &self.sharp_proj
    }

    pub(crate) fn generator_span_coords(&self) -> &[Vec<BigInt>] {
        &self.gens_span
    }

    /// Span coordinates of an ambient vector, when it lies in M^gp.
    pub fn group_coords(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        self.span.coords(v)
    }

    pub fn from_group_coords(&self, c: &[BigInt]) -> Vec<BigInt> {
        self.span.from_coords(c)
    }

    /// Image of an ambient vector in the sharp quotient lattice, when the
    /// vector lies in M^gp.
    pub fn sharp_coords(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let c = self.span.coords(v)?;
        Some(self.sharp_proj.project(&c).free)
    }

    pub fn contains(&self, v: &MonoidElement, bounds: &SearchBounds) -> Result<bool> {
        if v.vector.len() != self.ambient_rank {
            return Err(Error::invalid(
                "contains",
                format!(
                    "element has length {}, ambient rank is {}",
                    v.vector.len(),
                    self.ambient_rank
                ),
            ));
        }
        let Some(c) = self.span.coords(&v.vector) else {
            return Ok(false);
        };
        self.contains_span_coords(&c, bounds)
    }

    pub(crate) fn contains_span_coords(&self, c: &[BigInt], bounds: &SearchBounds) -> Result<bool> {
        let sbar = self.sharp_proj.project(c).free;
        if sbar.iter().all(|x| x.is_zero()) {
            return Ok(true);
        }
        if !self.sharp.in_cone(&sbar) {
            return Ok(false);
        }
        if self.saturated.get() == Some(&true) {
            return Ok(true);
        }
        self.sharp.generated_membership(&sbar, bounds.max_degree)
    }

    pub fn contains_i64(&self, v: &[i64], bounds: &SearchBounds) -> Result<bool> {
        self.contains(&MonoidElement::from(v), bounds)
    }

    pub fn group_completion(&self) -> GroupCompletion {
        GroupCompletion {
            group: FgAbGroup::free(self.span.rank),
            embedding: self.span.basis.clone(),
            units: self.unit_basis.clone(),
            sharp: self.sharp_monoid(),
        }
    }

    /// The sharp quotient as a standalone affine monoid in Z^{sharp rank}.
    pub fn sharp_monoid(&self) -> AffineMonoid {
        AffineMonoid::new(self.sharp.rank, self.sharp.gens.clone())
            .expect("sharp quotient of a valid monoid is valid")
    }

    /// Saturation test: compare the Hilbert basis of cone(M_sharp) inside
    /// the sharp lattice with the monoid itself. The membership runs here
    /// never consult the saturation cache, so the computation cannot assume
    /// its own answer.
    pub fn is_saturated(&self, bounds: &SearchBounds) -> Result<bool> {
        if let Some(&b) = self.saturated.get() {
            return Ok(b);
        }
        if self.sharp.rank > 4 {
            return Err(Error::scale(
                "is_saturated",
                format!("sharp rank {} exceeds the supported bound 4", self.sharp.rank),
            ));
        }
        let hb = super::hilbert::hilbert_basis_full_rank(&self.sharp.gens, self.sharp.rank)?;
        let mut answer = true;
        for h in &hb {
            if !self.sharp.generated_membership(h, bounds.max_degree)? {
                answer = false;
                break;
            }
        }
        let _ = self.saturated.set(answer);
        Ok(answer)
    }

    /// Mutual containment of generators, i.e. equality as submonoids of the
    /// common ambient lattice.
    pub fn equals_submonoid(&self, other: &AffineMonoid, bounds: &SearchBounds) -> Result<bool> {
        if self.ambient_rank != other.ambient_rank {
            return Err(Error::invalid("equals_submonoid", "ambient ranks differ"));
        }
        for g in &self.generators {
            if !other.contains(&MonoidElement::new(g.clone()), bounds)? {
                return Ok(false);
            }
        }
        for g in &other.generators {
            if !self.contains(&MonoidElement::new(g.clone()), bounds)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Elements of the sharp quotient with grading at most max_grade.
    pub(crate) fn sharp_elements_up_to(&self, max_grade: u64) -> Vec<Vec<BigInt>> {
        self.sharp.elements_up_to(max_grade)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn index_two() -> AffineMonoid {
        AffineMonoid::from_gens(2, &[vec![2, 0], vec![1, 1], vec![0, 2]]).unwrap()
    }

    #[test]
    fn membership_in_the_free_monoid() {
        let m = AffineMonoid::free(2);
        let b = SearchBounds::default();
        assert!(m.contains_i64(&[3, 5], &b).unwrap());
        assert!(!m.contains_i64(&[-1, 0], &b).unwrap());
        assert!(m.contains_i64(&[0, 0], &b).unwrap());
    }

    #[test]
    fn membership_in_the_index_two_monoid() {
        let m = index_two();
        let b = SearchBounds::default();
        assert!(m.contains_i64(&[1, 1], &b).unwrap());
        assert!(!m.contains_i64(&[1, 0], &b).unwrap());
        assert!(m.contains_i64(&[2, 2], &b).unwrap());
        assert!(m.contains_i64(&[3, 1], &b).unwrap());
        // (1, 3) is in the lattice {a + b even} and the cone, and in M.
        assert!(m.contains_i64(&[1, 3], &b).unwrap());
    }

    #[test]
    fn group_completion_of_index_two() {
        let m = index_two();
        let gc = m.group_completion();
        assert_eq!(gc.group, FgAbGroup::free(2));
        assert!(gc.units.is_empty());
        // The span is the even-coordinate-sum sublattice: (1, 0) is not in
        // it but (1, 1) is.
        assert!(m.group_coords(&[BigInt::from(1), BigInt::from(0)]).is_none());
        assert!(m.group_coords(&[BigInt::from(1), BigInt::from(1)]).is_some());
    }

    #[test]
    fn units_split_off_the_laurent_direction() {
        // N + Z: generators e1, e2, -e2.
        let m = AffineMonoid::from_gens(2, &[vec![1, 0], vec![0, 1], vec![0, -1]]).unwrap();
        assert_eq!(m.unit_rank(), 1);
        assert_eq!(m.sharp_rank(), 1);
        let b = SearchBounds::default();
        assert!(m.contains_i64(&[2, -5], &b).unwrap());
        assert!(!m.contains_i64(&[-1, 3], &b).unwrap());
        // Z itself is a group.
        let z = AffineMonoid::lattice(1);
        assert!(z.is_group());
        assert!(z.contains_i64(&[-7], &b).unwrap());
    }

    #[test]
    fn torsion_unit_quotient_is_rejected() {
        // Units span 2Z x 0 inside the full lattice Z^2, so the sharp
        // quotient would need a Z/2 factor; the constructor refuses.
        let err = AffineMonoid::from_gens(
            2,
            &[vec![2, 0], vec![-2, 0], vec![0, 1], vec![1, 1]],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Unsupported { .. }));
    }

    #[test]
    fn saturation_verdicts() {
        let b = SearchBounds::default();
        assert!(AffineMonoid::free(2).is_saturated(&b).unwrap());
        // The numerical monoid <2, 3> misses 1.
        let nm = AffineMonoid::from_gens(1, &[vec![2], vec![3]]).unwrap();
        assert!(!nm.is_saturated(&b).unwrap());
        // The index-2 monoid is saturated inside its own group.
        assert!(index_two().is_saturated(&b).unwrap());
    }

    #[test]
    fn sharp_factorizations_of_a_small_element() {
        let m = AffineMonoid::free(2);
        // (2, 1) factors uniquely as 2 e1 + e2 in N^2.
        let f = m.sharp_data().factorizations(&[BigInt::from(2), BigInt::from(1)]);
        assert_eq!(f.len(), 1);
        // In <2, 3> the element 6 factors as 2+2+2 and 3+3.
        let nm = AffineMonoid::from_gens(1, &[vec![2], vec![3]]).unwrap();
        let f6 = nm.sharp_data().factorizations(&[BigInt::from(6)]);
        assert_eq!(f6.len(), 2);
    }

    #[test]
    fn grade_enumeration_matches_hand_count() {
        let m = index_two();
        // Sharp grading for the index-2 monoid: normals are the coordinate
        // functionals in sharp coordinates; enumerate low grades.
        let elems = m.sharp_elements_up_to(4);
        // Grade in the original coordinates corresponds to (a + b) / 2
        // rescaled; just pin the count and spot-check membership closure.
        assert!(elems.contains(&vec![BigInt::zero(), BigInt::zero()]));
        let b = SearchBounds::default();
        for e in &elems {
            let amb = {
                // sharp coords equal span coords here (no units), and span
                // basis maps back to the ambient lattice.
                m.from_group_coords(e)
            };
            assert!(m.contains(&MonoidElement::new(amb), &b).unwrap());
        }
    }
}
