//! Chain-level building blocks shared by the bar operations: tensor products
//! of complexes, an explicit simplicial circle, and Künneth assembly on
//! module descriptions.

use crate::abelian::{Coefficients, Complex, FgAbGroup, IntMatrix, ModuleDesc};
use crate::error::Result;
use num_bigint::BigInt;
use num_traits::Zero;

fn rank_at(c: &Complex, i: usize) -> usize {
    c.ranks.get(i).copied().unwrap_or(0)
}

/// Offsets of the (i, n - i) blocks inside level n of a tensor product,
/// indexed by the degree i of the left factor.
fn block_offsets(a: &Complex, b: &Complex, n: usize) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(n + 2);
    let mut acc = 0usize;
    for i in 0..=n {
        offsets.push(acc);
        acc += rank_at(a, i) * rank_at(b, n - i);
    }
    offsets.push(acc);
    offsets
}

/// Tensor product of chain complexes: level n is the direct sum over
/// i + j = n of (level i of a) tensor (level j of b), ordered by ascending i
/// and within a block by left index major. The boundary follows the Leibniz
/// rule with the sign (-1)^i on the right factor's boundary.
///
/// By Eilenberg-Zilber this computes the homology of the degreewise tensor
/// of the underlying simplicial modules, which is how it is used here.
pub(crate) fn tensor_complex(a: &Complex, b: &Complex) -> Result<Complex> {
    if a.ranks.is_empty() || b.ranks.is_empty() {
        return Complex::new(Vec::new(), Vec::new());
    }
    let top = a.ranks.len() + b.ranks.len() - 2;
    let ranks: Vec<usize> = (0..=top)
        .map(|n| (0..=n).map(|i| rank_at(a, i) * rank_at(b, n - i)).sum())
        .collect();
    let mut boundaries = Vec::with_capacity(top);
    for n in 0..top {
        let lower = block_offsets(a, b, n);
        let upper = block_offsets(a, b, n + 1);
        let mut m = IntMatrix::zeros(ranks[n], ranks[n + 1]);
        for i in 0..=n + 1 {
            let j = n + 1 - i;
            let (ra, rb) = (rank_at(a, i), rank_at(b, j));
            if ra == 0 || rb == 0 {
                continue;
            }
            for xa in 0..ra {
                for xb in 0..rb {
                    let col = upper[i] + xa * rb + xb;
                    if i >= 1 {
                        let da = &a.boundaries[i - 1];
                        for r in 0..da.rows() {
                            let coeff = da.get(r, xa);
                            if !coeff.is_zero() {
                                let row = lower[i - 1] + r * rank_at(b, j) + xb;
                                let prev = m.get(row, col).clone();
                                m.set(row, col, prev + coeff);
                            }
                        }
                    }
                    if j >= 1 {
                        let db = &b.boundaries[j - 1];
                        let sign = if i % 2 == 0 { 1 } else { -1 };
                        for r in 0..db.rows() {
                            let coeff = db.get(r, xb);
                            if !coeff.is_zero() {
                                let row = lower[i] + xa * rank_at(b, j - 1) + r;
                                let prev = m.get(row, col).clone();
                                m.set(row, col, prev + coeff * sign);
                            }
                        }
                    }
                }
            }
        }
        boundaries.push(m);
    }
    Complex::new(ranks, boundaries)
}

/// The chain complex of the simplicial circle Delta^1 / boundary, truncated
/// at the given top level. Level q has the collapsed point plus the q
/// degeneracies of the nondegenerate edge, so rank q + 1; the boundary comes
/// from the alternating face sum of monotone maps [q] -> [1]. Basis order:
/// the point first, then the maps by flip position.
pub(crate) fn circle_complex(top: usize) -> Complex {
    let ranks: Vec<usize> = (0..=top).map(|q| q + 1).collect();
    let mut boundaries = Vec::with_capacity(top);
    for q in 1..=top {
        let mut m = IntMatrix::zeros(q, q + 1);
        // The point maps to the point with coefficient sum_{j=0}^{q} (-1)^j.
        if q % 2 == 0 {
            let prev = m.get(0, 0).clone();
            m.set(0, 0, prev + 1);
        }
        for i in 1..=q {
            // Faces d_j for j < i send flip i to flip i - 1 (flip 0 is the
            // point); faces d_j for j >= i keep flip i, except that flip q
            // under d_q collapses to the point.
            // Flip 1 drops to the point, which sits at row 0 = index i - 1.
            let head: i64 = if i % 2 == 1 { 1 } else { 0 };
            if head != 0 {
                let prev = m.get(i - 1, i).clone();
                m.set(i - 1, i, prev + head);
            }
            let tail: i64 = if (q - i) % 2 == 0 {
                if i % 2 == 0 {
                    1
                } else {
                    -1
                }
            } else {
                0
            };
            if tail != 0 {
                let row = if i == q { 0 } else { i };
                let prev = m.get(row, i).clone();
                m.set(row, i, prev + tail);
            }
        }
        boundaries.push(m);
    }
    Complex::new(ranks, boundaries).expect("the circle faces satisfy the simplicial identities")
}

/// Reads a module description over the integers back as an abstract group.
pub(crate) fn desc_group(d: &ModuleDesc) -> FgAbGroup {
    let mut orders: Vec<BigInt> = vec![BigInt::zero(); d.rank];
    orders.extend(d.torsion.iter().cloned());
    FgAbGroup::from_cyclic_orders(&orders)
}

/// Tensor product of graded pieces over the coefficient ring. Over a field
/// the ranks multiply; over the integers the cyclic decompositions pair up.
pub(crate) fn desc_tensor(k: Coefficients, a: &ModuleDesc, b: &ModuleDesc) -> ModuleDesc {
    match k {
        Coefficients::Integer => desc_group(a)
            .tensor(&desc_group(b))
            .with_coefficients(Coefficients::Integer),
        Coefficients::Rational | Coefficients::PrimeField(_) => {
            ModuleDesc::free(a.rank * b.rank)
        }
    }
}

/// Tor term of the Künneth formula; zero over a field.
pub(crate) fn desc_tor(k: Coefficients, a: &ModuleDesc, b: &ModuleDesc) -> ModuleDesc {
    match k {
        Coefficients::Integer => desc_group(a)
            .tor(&desc_group(b))
            .with_coefficients(Coefficients::Integer),
        Coefficients::Rational | Coefficients::PrimeField(_) => ModuleDesc::zero(),
    }
}

/// Degree-q piece of the Künneth formula for the tensor of two complexes
/// whose homology descriptions are given levelwise: the sum of pairwise
/// tensors in total degree q plus the Tor corrections in degree q - 1.
/// Entries beyond the stored range are zero.
pub(crate) fn kunneth_assemble(
    k: Coefficients,
    left: &[ModuleDesc],
    right: &[ModuleDesc],
    q: usize,
) -> ModuleDesc {
    let zero = ModuleDesc::zero();
    let at = |v: &[ModuleDesc], i: usize| -> ModuleDesc {
        v.get(i).cloned().unwrap_or_else(|| zero.clone())
    };
    let mut acc = ModuleDesc::zero();
    for i in 0..=q {
        acc = acc.direct_sum(&desc_tensor(k, &at(left, i), &at(right, q - i)));
    }
    if q >= 1 {
        for i in 0..q {
            acc = acc.direct_sum(&desc_tor(k, &at(left, i), &at(right, q - 1 - i)));
        }
    }
    acc
}
