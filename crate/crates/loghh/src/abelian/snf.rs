use super::matrix::IntMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Smith normal form data: u * a * v = d with u, v unimodular and d diagonal
/// with nonnegative entries forming a divisibility chain.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

/// Finds the pivot position with minimal absolute value among nonzero entries
/// in the trailing submatrix starting at (k, k), breaking ties by (row, col)
/// lexicographic order. Deterministic pivoting keeps every downstream basis
/// choice reproducible across runs and thread counts.
fn min_abs_pivot(m: &IntMatrix, k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(BigInt, usize, usize)> = None;
    for i in k..m.rows() {
        for j in k..m.cols() {
            let e = m.get(i, j);
            if e.is_zero() {
                continue;
            }
            let a = e.abs();
            match &best {
                Some((cur, _, _)) if *cur <= a => {}
                _ => best = Some((a, i, j)),
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

/// Smith normal form with full transforms.
pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let mut d = a.clone();
    let mut u = IntMatrix::identity(a.rows());
    let mut v = IntMatrix::identity(a.cols());
    let n = a.rows().min(a.cols());

    let mut k = 0;
    while k < n {
        let Some((pi, pj)) = min_abs_pivot(&d, k) else {
            break;
        };
        d.swap_rows(k, pi);
        u.swap_rows(k, pi);
        d.swap_cols(k, pj);
        v.swap_cols(k, pj);

        // Clear row k and column k. The pivot may need several rounds when a
        // remainder becomes the new, smaller pivot.
        loop {
            let pivot = d.get(k, k).clone();
            debug_assert!(!pivot.is_zero());
            let mut dirty = false;
            for i in (k + 1)..d.rows() {
                let e = d.get(i, k);
                if e.is_zero() {
                    continue;
                }
                let q = -e.div_floor(&pivot);
                d.row_axpy(i, k, &q);
                u.row_axpy(i, k, &q);
                if !d.get(i, k).is_zero() {
                    dirty = true;
                }
            }
            for j in (k + 1)..d.cols() {
                let e = d.get(k, j);
                if e.is_zero() {
                    continue;
                }
                let q = -e.div_floor(&pivot);
                d.col_axpy(j, k, &q);
                v.col_axpy(j, k, &q);
                if !d.get(k, j).is_zero() {
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
            // A nonzero remainder is strictly smaller than the pivot; move the
            // smallest entry back to (k, k) and repeat.
            let (ri, rj) = min_abs_pivot(&d, k).expect("nonzero remainder exists");
            d.swap_rows(k, ri);
            u.swap_rows(k, ri);
            d.swap_cols(k, rj);
            v.swap_cols(k, rj);
        }

        if d.get(k, k).is_negative() {
            d.negate_row(k);
            u.negate_row(k);
        }
        k += 1;
    }

    // Enforce the divisibility chain d[i] | d[i+1]. Folding column i+1 into
    // column i makes the (i, i+1) entry equal d[i+1]; one more reduction round
    // replaces d[i] by gcd(d[i], d[i+1]) and d[i+1] by their lcm.
    let rank = (0..n).take_while(|&i| !d.get(i, i).is_zero()).count();
    loop {
        let mut fixed = true;
        for i in 0..rank.saturating_sub(1) {
            let a_i = d.get(i, i).clone();
            let b = d.get(i + 1, i + 1).clone();
            if (&b % &a_i).is_zero() {
                continue;
            }
            fixed = false;
            d.col_axpy(i, i + 1, &BigInt::from(1));
            v.col_axpy(i, i + 1, &BigInt::from(1));
            // Clear the 2x2 block back to diagonal form.
            loop {
                let pivot_pos = {
                    let a00 = d.get(i, i).abs();
                    let a10 = d.get(i + 1, i).abs();
                    let a11 = d.get(i + 1, i + 1).abs();
                    // Min-abs among nonzero entries of the 2x2 block; (i, i+1)
                    // entry stays zero because column ops preserve row i's
                    // support here.
                    let mut cands: Vec<(BigInt, usize, usize)> = Vec::new();
                    if !a00.is_zero() {
                        cands.push((a00, i, i));
                    }
                    let e01 = d.get(i, i + 1).abs();
                    if !e01.is_zero() {
                        cands.push((e01, i, i + 1));
                    }
                    if !a10.is_zero() {
                        cands.push((a10, i + 1, i));
                    }
                    if !a11.is_zero() {
                        cands.push((a11, i + 1, i + 1));
                    }
                    cands.sort();
                    cands.first().map(|(_, r, c)| (*r, *c))
                };
                let Some((pi, pj)) = pivot_pos else { break };
                d.swap_rows(i, pi);
                u.swap_rows(i, pi);
                d.swap_cols(i, pj);
                v.swap_cols(i, pj);
                let pivot = d.get(i, i).clone();
                let mut dirty = false;
                {
                    let e = d.get(i + 1, i).clone();
                    if !e.is_zero() {
                        let q = -e.div_floor(&pivot);
                        d.row_axpy(i + 1, i, &q);
                        u.row_axpy(i + 1, i, &q);
                        if !d.get(i + 1, i).is_zero() {
                            dirty = true;
                        }
                    }
                }
                {
                    let e = d.get(i, i + 1).clone();
                    if !e.is_zero() {
                        let q = -e.div_floor(&pivot);
                        d.col_axpy(i + 1, i, &q);
                        v.col_axpy(i + 1, i, &q);
                        if !d.get(i, i + 1).is_zero() {
                            dirty = true;
                        }
                    }
                }
                if !dirty && d.get(i + 1, i).is_zero() && d.get(i, i + 1).is_zero() {
                    break;
                }
            }
            if d.get(i, i).is_negative() {
                d.negate_row(i);
                u.negate_row(i);
            }
            if d.get(i + 1, i + 1).is_negative() {
                d.negate_row(i + 1);
                u.negate_row(i + 1);
            }
        }
        if fixed {
            break;
        }
    }

    SmithForm { u, d, v }
}

/// Invariant factors (the nonzero diagonal of the Smith form) without
/// computing the transforms. Uses the same min-abs pivot rule, plus deletion
/// of unit-pivot rows and columns, which keeps intermediate entries small on
/// the sparse boundary matrices this crate produces.
pub fn elementary_divisors(a: &IntMatrix) -> Vec<BigInt> {
    let mut m = a.clone();
    let mut divisors: Vec<BigInt> = Vec::new();
    let mut k = 0;
    loop {
        let n = m.rows().min(m.cols());
        if k >= n {
            break;
        }
        let Some((pi, pj)) = min_abs_pivot(&m, k) else {
            break;
        };
        m.swap_rows(k, pi);
        m.swap_cols(k, pj);
        loop {
            let pivot = m.get(k, k).clone();
            let mut dirty = false;
            for i in (k + 1)..m.rows() {
                let e = m.get(i, k);
                if e.is_zero() {
                    continue;
                }
                let q = -e.div_floor(&pivot);
                m.row_axpy(i, k, &q);
                if !m.get(i, k).is_zero() {
                    dirty = true;
                }
            }
            for j in (k + 1)..m.cols() {
                let e = m.get(k, j);
                if e.is_zero() {
                    continue;
                }
                let q = -e.div_floor(&pivot);
                m.col_axpy(j, k, &q);
                if !m.get(k, j).is_zero() {
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
            let (ri, rj) = min_abs_pivot(&m, k).expect("nonzero remainder exists");
            m.swap_rows(k, ri);
            m.swap_cols(k, rj);
        }
        divisors.push(m.get(k, k).abs());
        k += 1;
    }
    divisors.sort();
    // Fold into a divisibility chain: replace each consecutive pair by
    // (gcd, lcm) until stable. Sorting first makes this converge quickly.
    loop {
        let mut stable = true;
        for i in 0..divisors.len().saturating_sub(1) {
            let g = divisors[i].gcd(&divisors[i + 1]);
            if g != divisors[i] {
                let l = divisors[i].lcm(&divisors[i + 1]);
                divisors[i] = g;
                divisors[i + 1] = l;
                stable = false;
            }
        }
        if stable {
            break;
        }
    }
    divisors
}

/// Rank of the integer matrix (equals rank over Q).
pub fn rank(a: &IntMatrix) -> usize {
    a.rank_over_q()
}

/// Basis of the integer kernel, as columns of a matrix. The lattice spanned
/// is saturated (a direct summand of the ambient lattice), because kernels of
/// integer maps always are.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let SmithForm { d, v, .. } = smith_normal_form(a);
    let r = (0..d.rows().min(d.cols()))
        .take_while(|&i| !d.get(i, i).is_zero())
        .count();
    let cols = a.cols();
    IntMatrix::from_fn(cols, cols - r, |i, j| v.get(i, r + j).clone())
}

/// Solves a x = b over the integers. Returns None when no integral solution
/// exists (either inconsistent over Q or a divisibility obstruction).
pub fn solve(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows(), b.len(), "dimension mismatch in solve");
    let SmithForm { u, d, v } = smith_normal_form(a);
    let ub = u.mul_vec(b);
    let n = d.rows().min(d.cols());
    let mut y = vec![BigInt::zero(); a.cols()];
    for i in 0..d.rows() {
        if i < n && !d.get(i, i).is_zero() {
            let di = d.get(i, i);
            let (q, r) = ub[i].div_rem(di);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !ub[i].is_zero() {
            return None;
        }
    }
    Some(v.mul_vec(&y))
}

/// Inverse of a unimodular square matrix. Panics if the input is not
/// unimodular; callers only pass transforms produced by smith_normal_form.
pub fn inverse_unimodular(a: &IntMatrix) -> IntMatrix {
    assert_eq!(a.rows(), a.cols(), "inverse of non-square matrix");
    let SmithForm { u, d, v } = smith_normal_form(a);
    let n = a.rows();
    for i in 0..n {
        assert!(
            d.get(i, i).abs() == BigInt::from(1),
            "matrix is not unimodular"
        );
    }
    // u * a * v = d with d = diag(+-1), so a^{-1} = v * d^{-1} * u and
    // d^{-1} = d.
    v.mul(&d).mul(&u)
}
