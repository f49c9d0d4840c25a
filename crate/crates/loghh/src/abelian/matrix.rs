use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Dense integer matrix with arbitrary-precision entries, row-major.
///
/// Desk-scale: matrices here come from generator lists, boundary maps of
/// truncated Moore complexes, and Čech differentials, so dense storage and
/// exact arithmetic are the right trade-off.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Builds from rows of machine integers.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(
            rows.iter().all(|row| row.len() == c),
            "ragged row lengths in IntMatrix::from_rows"
        );
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| BigInt::from(x)))
            .collect();
        IntMatrix { rows: r, cols: c, data }
    }

    /// Builds from columns of machine integers; `rows` disambiguates the
    /// shape when the column list is empty.
    pub fn from_cols(rows: usize, cols: &[Vec<i64>]) -> Self {
        let mut m = IntMatrix::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, &x) in col.iter().enumerate() {
                m.set(i, j, BigInt::from(x));
            }
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut m = IntMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> IntMatrix {
        IntMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j) + a * b;
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matrix-vector product");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    pub fn mul_vec_i64(&self, v: &[i64]) -> Vec<BigInt> {
        let big: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        self.mul_vec(&big)
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        (0..self.cols).map(|j| self.get(i, j).clone()).collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] += q * row[source]
    pub fn row_axpy(&mut self, target: usize, source: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let add = self.get(source, j) * q;
            let cur = self.get(target, j) + add;
            self.set(target, j, cur);
        }
    }

    /// col[target] += q * col[source]
    pub fn col_axpy(&mut self, target: usize, source: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let add = self.get(i, source) * q;
            let cur = self.get(i, target) + add;
            self.set(i, target, cur);
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j).clone();
            self.set(i, j, v);
        }
    }

    pub fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -self.get(i, j).clone();
            self.set(i, j, v);
        }
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rows.min(self.cols))
            .map(|i| self.get(i, i).clone())
            .collect()
    }

    /// Rank over the rationals by fraction-free (Bareiss) elimination.
    pub fn rank_over_q(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        let mut prev_pivot = BigInt::one();
        let (rows, cols) = (m.rows, m.cols);
        let mut row = 0;
        for col in 0..cols {
            if row >= rows {
                break;
            }
            // Find first nonzero pivot in this column at or below `row`.
            let mut pivot_row = None;
            for i in row..rows {
                if !m.get(i, col).is_zero() {
                    pivot_row = Some(i);
                    break;
                }
            }
            let Some(p) = pivot_row else { continue };
            m.swap_rows(row, p);
            let pivot = m.get(row, col).clone();
            for i in (row + 1)..rows {
                for j in (col + 1)..cols {
                    let v = (&pivot * m.get(i, j) - m.get(i, col) * m.get(row, j)) / &prev_pivot;
                    m.set(i, j, v);
                }
                m.set(i, col, BigInt::zero());
            }
            prev_pivot = pivot;
            row += 1;
            rank += 1;
        }
        rank
    }

    /// Rank over the prime field with `p` elements.
    pub fn rank_mod_p(&self, p: u64) -> usize {
        assert!(p >= 2);
        let pb = BigInt::from(p);
        let mut m: Vec<Vec<u64>> = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| {
                        let r = ((self.get(i, j) % &pb) + &pb) % &pb;
                        let digits = r.to_u64_digits().1;
                        digits.first().copied().unwrap_or(0)
                    })
                    .collect()
            })
            .collect();
        let mut rank = 0;
        let mut row = 0;
        for col in 0..self.cols {
            if row >= self.rows {
                break;
            }
            let Some(pr) = (row..self.rows).find(|&i| m[i][col] != 0) else {
                continue;
            };
            m.swap(row, pr);
            let inv = mod_inverse(m[row][col], p);
            for j in col..self.cols {
                m[row][j] = mulmod(m[row][j], inv, p);
            }
            for i in 0..self.rows {
                if i != row && m[i][col] != 0 {
                    let factor = m[i][col];
                    for j in col..self.cols {
                        let sub = mulmod(factor, m[row][j], p);
                        m[i][j] = (m[i][j] + p - sub) % p;
                    }
                }
            }
            row += 1;
            rank += 1;
        }
        rank
    }

    /// Largest absolute value of any entry; used by scale guards.
    pub fn max_abs(&self) -> BigInt {
        self.data
            .iter()
            .map(|x| x.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // Fermat: p is prime and a != 0 mod p.
    let mut result: u64 = 1;
    let mut base = a % p;
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mulmod(result, base, p);
        }
        base = mulmod(base, base, p);
        exp >>= 1;
    }
    result
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_transpose() {
        let a = IntMatrix::from_rows(&[vec![1, 2], vec![3, 4]]);
        let b = IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]);
        let ab = a.mul(&b);
        assert_eq!(ab, IntMatrix::from_rows(&[vec![2, 1], vec![4, 3]]));
        assert_eq!(a.transpose(), IntMatrix::from_rows(&[vec![1, 3], vec![2, 4]]));
    }

    #[test]
    fn rational_rank_detects_dependent_rows() {
        let a = IntMatrix::from_rows(&[vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]]);
        assert_eq!(a.rank_over_q(), 2);
    }

    #[test]
    fn mod_p_rank_differs_from_rational_rank() {
        // diag(1, 2): rank 2 over Q, rank 1 over F_2.
        let a = IntMatrix::from_rows(&[vec![1, 0], vec![0, 2]]);
        assert_eq!(a.rank_over_q(), 2);
        assert_eq!(a.rank_mod_p(2), 1);
        assert_eq!(a.rank_mod_p(3), 2);
    }
}
