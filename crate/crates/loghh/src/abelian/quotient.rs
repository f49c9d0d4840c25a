use super::group::FgAbGroup;
use super::matrix::IntMatrix;
use super::snf::{inverse_unimodular, smith_normal_form};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// Element of a quotient group, written in the quotient's canonical
/// coordinates: residues at the torsion slots followed by free coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElem {
    pub torsion: Vec<BigInt>,
    pub free: Vec<BigInt>,
}

impl GroupElem {
    pub fn is_zero(&self) -> bool {
        self.torsion.iter().all(|x| x.is_zero()) && self.free.iter().all(|x| x.is_zero())
    }
}

/// A quotient Z^n / (column span of `relations`), with the change of basis
/// retained so elements can be projected in and lifted back out.
///
/// Unlike the abstract form in FgAbGroup, this keeps a concrete section: the
/// composite project(lift(c)) is the identity, and lift(project(x)) differs
/// from x by an element of the relation span. Both facts are exercised in
/// tests because downstream repletion formulas depend on them verbatim.
#[derive(Clone, Debug)]
pub struct QuotientGroup {
    ambient_rank: usize,
    u: IntMatrix,
    u_inv: IntMatrix,
    /// Diagonal of the Smith form padded with zeros up to ambient rank.
    diag: Vec<BigInt>,
    /// Indices into the diagonal with entry at least 2.
    torsion_slots: Vec<usize>,
    /// Rank of the relation span; slots at and past this index are free.
    rank: usize,
}

impl QuotientGroup {
    /// Quotient of Z^rows(relations) by the columns of `relations`.
    pub fn from_relations(relations: &IntMatrix) -> Self {
        let n = relations.rows();
        let form = smith_normal_form(relations);
        let mut diag = vec![BigInt::zero(); n];
        let upto = relations.rows().min(relations.cols());
        for i in 0..upto {
            diag[i] = form.d.get(i, i).clone();
        }
        let rank = (0..upto).take_while(|&i| !diag[i].is_zero()).count();
        let torsion_slots: Vec<usize> = (0..rank).filter(|&i| diag[i] > BigInt::one()).collect();
        let u_inv = inverse_unimodular(&form.u);
        QuotientGroup {
            ambient_rank: n,
            u: form.u,
            u_inv,
            diag,
            torsion_slots,
            rank,
        }
    }

    /// Quotient with no relations at all: the free group Z^n with identity
    /// coordinates.
    pub fn free(n: usize) -> Self {
        QuotientGroup::from_relations(&IntMatrix::zeros(n, 0))
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn free_rank(&self) -> usize {
        self.ambient_rank - self.rank
    }

    pub fn torsion_moduli(&self) -> Vec<BigInt> {
        self.torsion_slots.iter().map(|&i| self.diag[i].clone()).collect()
    }

    pub fn structure(&self) -> FgAbGroup {
        FgAbGroup {
            free_rank: self.free_rank(),
            invariant_factors: self.torsion_moduli(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank() == 0 && self.torsion_slots.is_empty()
    }

    /// Number of elements, when finite.
    pub fn order(&self) -> Option<u64> {
        if self.free_rank() > 0 {
            return None;
        }
        let mut acc = BigInt::one();
        for m in self.torsion_moduli() {
            acc *= m;
        }
        acc.to_u64()
    }

    pub fn zero(&self) -> GroupElem {
        GroupElem {
            torsion: vec![BigInt::zero(); self.torsion_slots.len()],
            free: vec![BigInt::zero(); self.free_rank()],
        }
    }

    /// Image of an ambient vector in the quotient.
    pub fn project(&self, x: &[BigInt]) -> GroupElem {
        assert_eq!(x.len(), self.ambient_rank, "ambient dimension mismatch");
        let y = self.u.mul_vec(x);
        let torsion = self
            .torsion_slots
            .iter()
            .map(|&i| y[i].mod_floor(&self.diag[i]))
            .collect();
        let free = (self.rank..self.ambient_rank).map(|i| y[i].clone()).collect();
        GroupElem { torsion, free }
    }

    pub fn project_i64(&self, x: &[i64]) -> GroupElem {
        let big: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
        self.project(&big)
    }

    /// A distinguished ambient representative of a quotient element. This is
    /// a genuine section: project(lift(c)) == c.
    pub fn lift(&self, c: &GroupElem) -> Vec<BigInt> {
        assert_eq!(c.torsion.len(), self.torsion_slots.len(), "torsion shape mismatch");
        assert_eq!(c.free.len(), self.free_rank(), "free shape mismatch");
        let mut y = vec![BigInt::zero(); self.ambient_rank];
        for (k, &slot) in self.torsion_slots.iter().enumerate() {
            y[slot] = c.torsion[k].mod_floor(&self.diag[slot]);
        }
        for (k, i) in (self.rank..self.ambient_rank).enumerate() {
            y[i] = c.free[k].clone();
        }
        self.u_inv.mul_vec(&y)
    }

    /// Matrix of the free part of the projection: the rows of U past the
    /// relation rank, shape free_rank x ambient_rank. Applying it to an
    /// ambient vector gives the free coordinates of its image.
    pub fn free_projection_matrix(&self) -> IntMatrix {
        IntMatrix::from_fn(self.free_rank(), self.ambient_rank, |i, j| {
            self.u.get(self.rank + i, j).clone()
        })
    }

    /// Matrix of the section on the free part: columns of U^{-1} past the
    /// relation rank, shape ambient_rank x free_rank. The composite
    /// free_projection_matrix * section_matrix is the identity.
    pub fn section_matrix(&self) -> IntMatrix {
        IntMatrix::from_fn(self.ambient_rank, self.free_rank(), |i, j| {
            self.u_inv.get(i, self.rank + j).clone()
        })
    }

    pub fn add(&self, a: &GroupElem, b: &GroupElem) -> GroupElem {
        let torsion = self
            .torsion_slots
            .iter()
            .enumerate()
            .map(|(k, &i)| (&a.torsion[k] + &b.torsion[k]).mod_floor(&self.diag[i]))
            .collect();
        let free = a
            .free
            .iter()
            .zip(&b.free)
            .map(|(x, y)| x + y)
            .collect();
        GroupElem { torsion, free }
    }

    pub fn neg(&self, a: &GroupElem) -> GroupElem {
        let torsion = self
            .torsion_slots
            .iter()
            .enumerate()
            .map(|(k, &i)| (-&a.torsion[k]).mod_floor(&self.diag[i]))
            .collect();
        let free = a.free.iter().map(|x| -x).collect();
        GroupElem { torsion, free }
    }

    pub fn sub(&self, a: &GroupElem, b: &GroupElem) -> GroupElem {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, n: &BigInt, a: &GroupElem) -> GroupElem {
        let torsion = self
            .torsion_slots
            .iter()
            .enumerate()
            .map(|(k, &i)| (n * &a.torsion[k]).mod_floor(&self.diag[i]))
            .collect();
        let free = a.free.iter().map(|x| n * x).collect();
        GroupElem { torsion, free }
    }

    /// Additive order of an element; None when infinite.
    pub fn element_order(&self, a: &GroupElem) -> Option<BigInt> {
        if a.free.iter().any(|x| !x.is_zero()) {
            return None;
        }
        let mut ord = BigInt::one();
        for (k, &i) in self.torsion_slots.iter().enumerate() {
            let d = &self.diag[i];
            let g = a.torsion[k].gcd(d);
            ord = ord.lcm(&(d / g));
        }
        Some(ord)
    }

    /// All elements of a finite quotient, in lexicographic coordinate order.
    /// Errors when the group is infinite or larger than `max_order`.
    pub fn enumerate(&self, max_order: u64) -> Result<Vec<GroupElem>> {
        let Some(order) = self.order() else {
            return Err(Error::unsupported(
                "enumerate",
                "group has positive free rank, so it is infinite",
            ));
        };
        if order > max_order {
            return Err(Error::scale(
                "enumerate",
                format!("group order {order} exceeds cap {max_order}"),
            ));
        }
        let moduli = self.torsion_moduli();
        let mut out = Vec::with_capacity(order as usize);
        let mut cur = vec![BigInt::zero(); moduli.len()];
        loop {
            out.push(GroupElem { torsion: cur.clone(), free: Vec::new() });
            // Odometer increment over the torsion coordinates.
            let mut pos = moduli.len();
            while pos > 0 {
                pos -= 1;
                cur[pos] += 1;
                if cur[pos] < moduli[pos] {
                    break;
                }
                cur[pos] = BigInt::zero();
                if pos == 0 {
                    return Ok(out);
                }
            }
            if moduli.is_empty() {
                return Ok(out);
            }
        }
    }

    /// Map on quotients induced by an ambient homomorphism `f` from this
    /// group's ambient lattice to `target`'s. Checks well-definedness by
    /// projecting the images of this group's relation generators.
    pub fn induced_map(
        &self,
        target: &QuotientGroup,
        f: &IntMatrix,
        my_relations: &IntMatrix,
    ) -> Result<QuotientMap> {
        if f.rows() != target.ambient_rank || f.cols() != self.ambient_rank {
            return Err(Error::invalid(
                "induced_map",
                format!(
                    "matrix is {}x{} but ambient ranks are {} to {}",
                    f.rows(),
                    f.cols(),
                    self.ambient_rank,
                    target.ambient_rank
                ),
            ));
        }
        for j in 0..my_relations.cols() {
            let image = f.mul_vec(&my_relations.column(j));
            if !target.project(&image).is_zero() {
                return Err(Error::invalid(
                    "induced_map",
                    format!("relation column {j} does not map into the target relation span"),
                ));
            }
        }
        Ok(QuotientMap { matrix: f.clone() })
    }
}

/// Homomorphism between quotient groups, stored as the ambient matrix.
#[derive(Clone, Debug)]
pub struct QuotientMap {
    pub matrix: IntMatrix,
}

impl QuotientMap {
    pub fn apply(&self, source: &QuotientGroup, target: &QuotientGroup, a: &GroupElem) -> GroupElem {
        let x = source.lift(a);
        target.project(&self.matrix.mul_vec(&x))
    }
}
