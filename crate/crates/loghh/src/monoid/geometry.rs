use crate::abelian::{kernel_basis, IntMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use std::collections::BTreeSet;

pub(crate) fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Divides out the gcd of the entries and normalizes nothing else; the zero
/// vector is returned unchanged.
pub(crate) fn primitive(v: &[BigInt]) -> Vec<BigInt> {
    let mut g = BigInt::zero();
    for x in v {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        if k == 0 {
            return out;
        }
        let mut i = k - 1;
        loop {
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
            i -= 1;
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Outward-oriented supporting normals of cone(vectors) inside Q^rank.
///
/// Candidates come from kernels of (rank - 1)-subsets of the vectors; a
/// candidate survives when all vectors lie on one side, oriented so the
/// values are nonnegative. Every facet of the cone is the cone over the
/// generators lying on it and so contains rank - 1 independent generators,
/// which means all facet normals appear. Extra supporting (non-facet)
/// normals may also appear; they are valid inequalities, so the intersection
/// of the returned half-spaces is exactly the cone and their common kernel
/// is exactly the lineality space.
pub(crate) fn supporting_normals(vectors: &[Vec<BigInt>], rank: usize) -> Vec<Vec<BigInt>> {
    let mut found: BTreeSet<Vec<BigInt>> = BTreeSet::new();
    if rank == 0 {
        return Vec::new();
    }
    for subset in combinations(vectors.len(), rank - 1) {
        let rows: Vec<Vec<BigInt>> = subset.iter().map(|&i| vectors[i].clone()).collect();
        let m = IntMatrix::from_fn(rows.len(), rank, |i, j| rows[i][j].clone());
        let kern = kernel_basis(&m);
        if kern.cols() != 1 {
            continue;
        }
        let n = primitive(&kern.column(0));
        let mut pos = false;
        let mut neg = false;
        for v in vectors {
            let d = dot(&n, v);
            if d.is_positive() {
                pos = true;
            } else if d.is_negative() {
                neg = true;
            }
            if pos && neg {
                break;
            }
        }
        if pos && neg {
            continue;
        }
        if neg {
            found.insert(n.iter().map(|x| -x).collect());
        } else {
            found.insert(n);
        }
    }
    found.into_iter().collect()
}

/// Whether x satisfies every supporting inequality.
pub(crate) fn in_cone(normals: &[Vec<BigInt>], x: &[BigInt]) -> bool {
    normals.iter().all(|n| !dot(n, x).is_negative())
}
