use super::geometry::{dot, in_cone, primitive, supporting_normals};
use crate::abelian::{inverse_unimodular, rank, smith_normal_form, IntMatrix};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeSet;

const BOX_POINT_CAP: u64 = 4_000_000;

/// Minimal generating set of cone(rays) ∩ Z^d for a pointed rational cone.
///
/// Lattice points of the cone all lie in the saturated span of the rays, so
/// the computation moves to coordinates on that sublattice (where the cone
/// is full dimensional) and maps the result back.
pub fn hilbert_basis(rays: &[Vec<BigInt>]) -> Result<Vec<Vec<BigInt>>> {
    if rays.is_empty() {
        return Ok(Vec::new());
    }
    let d = rays[0].len();
    for r in rays {
        if r.len() != d {
            return Err(Error::invalid("hilbert_basis", "rays have mixed dimensions"));
        }
    }
    if d > 4 {
        return Err(Error::scale(
            "hilbert_basis",
            format!("ambient dimension {d} exceeds the supported bound 4"),
        ));
    }
    let a = IntMatrix::from_fn(d, rays.len(), |i, j| rays[j][i].clone());
    let f = smith_normal_form(&a);
    let upto = d.min(rays.len());
    let r = (0..upto).take_while(|&i| !f.d.get(i, i).is_zero()).count();
    let rays_sat: Vec<Vec<BigInt>> = rays
        .iter()
        .map(|v| {
            let y = f.u.mul_vec(v);
            y[..r].to_vec()
        })
        .collect();
    let hb_sat = hilbert_basis_full_rank(&rays_sat, r)?;
    let u_inv = inverse_unimodular(&f.u);
    Ok(hb_sat
        .into_iter()
        .map(|c| {
            let mut full = c;
            full.resize(d, BigInt::zero());
            u_inv.mul_vec(&full)
        })
        .collect())
}

/// Hilbert basis of cone(rays) ∩ Z^rank for a cone that is full dimensional
/// in Z^rank. Candidates are the lattice points of conv(0, W/(w·r_i) r_i)
/// where w is the sum of the supporting normals and W the sum of w over the
/// primitive rays: any point of the cone with w-grade at most W is such a
/// convex combination, and every irreducible has w-grade at most W because
/// in any conic representation a coefficient of 1 or more would split off a
/// ray. Greedy reduction in grade order is exact since a reducible element
/// always has an irreducible summand of strictly smaller grade.
pub(crate) fn hilbert_basis_full_rank(
    rays: &[Vec<BigInt>],
    dim: usize,
) -> Result<Vec<Vec<BigInt>>> {
    if dim == 0 {
        return Ok(Vec::new());
    }
    let prim: Vec<Vec<BigInt>> = rays
        .iter()
        .filter(|v| !v.iter().all(|x| x.is_zero()))
        .map(|v| primitive(v))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if prim.is_empty() {
        return Ok(Vec::new());
    }
    let normals = supporting_normals(&prim, dim);
    let nmat = IntMatrix::from_fn(normals.len(), dim, |i, j| normals[i][j].clone());
    if rank(&nmat) != dim {
        return Err(Error::unsupported("hilbert_basis", "cone is not pointed"));
    }
    let mut w = vec![BigInt::zero(); dim];
    for n in &normals {
        for (i, x) in n.iter().enumerate() {
            w[i] += x;
        }
    }
    let wr: Vec<BigInt> = prim.iter().map(|r| dot(&w, r)).collect();
    let total: BigInt = wr.iter().sum();
    let mut lo = vec![BigInt::zero(); dim];
    let mut hi = vec![BigInt::zero(); dim];
    for (r, wri) in prim.iter().zip(&wr) {
        for j in 0..dim {
            let num = &total * &r[j];
            let fl = num.div_floor(wri);
            let ce = num.div_ceil(wri);
            if fl < lo[j] {
                lo[j] = fl;
            }
            if ce > hi[j] {
                hi[j] = ce;
            }
        }
    }
    let mut volume = BigInt::one();
    for j in 0..dim {
        volume *= &hi[j] - &lo[j] + 1;
    }
    if volume > BigInt::from(BOX_POINT_CAP) {
        return Err(Error::scale(
            "hilbert_basis",
            format!("candidate box holds {volume} lattice points"),
        ));
    }
    let lo_i: Vec<i64> = lo.iter().map(|x| x.to_i64().expect("bounded by cap")).collect();
    let hi_i: Vec<i64> = hi.iter().map(|x| x.to_i64().expect("bounded by cap")).collect();
    let mut candidates: BTreeSet<(BigInt, Vec<BigInt>)> = BTreeSet::new();
    let mut cur = lo_i.clone();
    'scan: loop {
        let x: Vec<BigInt> = cur.iter().map(|&v| BigInt::from(v)).collect();
        if !x.iter().all(|v| v.is_zero()) && in_cone(&normals, &x) {
            let g = dot(&w, &x);
            if g <= total {
                candidates.insert((g, x));
            }
        }
        for j in 0..dim {
            if cur[j] < hi_i[j] {
                cur[j] += 1;
                continue 'scan;
            }
            cur[j] = lo_i[j];
        }
        break;
    }
    let mut basis: Vec<Vec<BigInt>> = Vec::new();
    'next: for (_, c) in candidates {
        for h in &basis {
            let diff: Vec<BigInt> = c.iter().zip(h).map(|(a, b)| a - b).collect();
            if in_cone(&normals, &diff) {
                continue 'next;
            }
        }
        basis.push(c);
    }
    Ok(basis)
}
