use super::coefficients::{Coefficients, ModuleDesc};
use super::matrix::IntMatrix;
use super::snf::elementary_divisors;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::One;

/// Bounded chain complex of finitely generated free modules. `ranks[n]` is
/// the rank of the degree-n term and `boundaries[n]` is the map from degree
/// n + 1 down to degree n, so `boundaries[0]` lands in degree zero.
#[derive(Clone, Debug)]
pub struct Complex {
    pub ranks: Vec<usize>,
    pub boundaries: Vec<IntMatrix>,
}

impl Complex {
    /// Validates shapes and the boundary-squared condition.
    pub fn new(ranks: Vec<usize>, boundaries: Vec<IntMatrix>) -> Result<Complex> {
        if !ranks.is_empty() && boundaries.len() + 1 != ranks.len() {
            return Err(Error::MalformedComplex(format!(
                "{} terms need {} boundary maps, got {}",
                ranks.len(),
                ranks.len() - 1,
                boundaries.len()
            )));
        }
        if ranks.is_empty() && !boundaries.is_empty() {
            return Err(Error::MalformedComplex(
                "boundary maps present on an empty complex".into(),
            ));
        }
        for (n, b) in boundaries.iter().enumerate() {
            if b.rows() != ranks[n] || b.cols() != ranks[n + 1] {
                return Err(Error::MalformedComplex(format!(
                    "boundary into degree {n} is {}x{}, expected {}x{}",
                    b.rows(),
                    b.cols(),
                    ranks[n],
                    ranks[n + 1]
                )));
            }
        }
        for n in 0..boundaries.len().saturating_sub(1) {
            if !boundaries[n].mul(&boundaries[n + 1]).is_zero() {
                return Err(Error::MalformedComplex(format!(
                    "boundary squared is nonzero from degree {} to {}",
                    n + 2,
                    n
                )));
            }
        }
        Ok(Complex { ranks, boundaries })
    }

    /// Complex concentrated in degree zero.
    pub fn concentrated(rank: usize) -> Complex {
        Complex { ranks: vec![rank], boundaries: Vec::new() }
    }

    pub fn top_degree(&self) -> Option<usize> {
        self.ranks.len().checked_sub(1)
    }

    fn rank_at(&self, n: usize) -> usize {
        self.ranks.get(n).copied().unwrap_or(0)
    }

    /// The boundary map out of degree n + 1, extended by zero beyond the
    /// stored range.
    fn boundary_into(&self, n: usize) -> IntMatrix {
        if n < self.boundaries.len() {
            self.boundaries[n].clone()
        } else {
            IntMatrix::zeros(self.rank_at(n), 0)
        }
    }

    /// Homology at degree n over the requested coefficients.
    ///
    /// Integral torsion is read off the incoming boundary alone: the kernel
    /// of the outgoing boundary is a saturated sublattice, so the torsion of
    /// the homology equals the torsion of the ambient quotient, which the
    /// invariant factors of the incoming map compute.
    pub fn homology(&self, n: usize, k: Coefficients) -> Result<ModuleDesc> {
        k.validate()?;
        if n >= self.ranks.len() {
            return Ok(ModuleDesc::zero());
        }
        let incoming = self.boundary_into(n);
        match k {
            Coefficients::Integer => {
                let out_rank = if n == 0 {
                    0
                } else {
                    self.boundaries[n - 1].rank_over_q()
                };
                let divisors = elementary_divisors(&incoming);
                let in_rank = divisors.len();
                let nullity = self.ranks[n] - out_rank;
                let torsion: Vec<BigInt> = divisors
                    .into_iter()
                    .filter(|d| *d > BigInt::one())
                    .collect();
                Ok(ModuleDesc { rank: nullity - in_rank, torsion })
            }
            Coefficients::Rational => {
                let out_rank = if n == 0 {
                    0
                } else {
                    self.boundaries[n - 1].rank_over_q()
                };
                let in_rank = incoming.rank_over_q();
                Ok(ModuleDesc::free(self.ranks[n] - out_rank - in_rank))
            }
            Coefficients::PrimeField(p) => {
                let out_rank = if n == 0 {
                    0
                } else {
                    self.boundaries[n - 1].rank_mod_p(p)
                };
                let in_rank = incoming.rank_mod_p(p);
                Ok(ModuleDesc::free(self.ranks[n] - out_rank - in_rank))
            }
        }
    }

    /// Alternating sum of ranks, an invariant shared with homology.
    pub fn euler_characteristic(&self) -> i64 {
        self.ranks
            .iter()
            .enumerate()
            .map(|(n, &r)| if n % 2 == 0 { r as i64 } else { -(r as i64) })
            .sum()
    }
}

/// Homology in all stored degrees.
pub fn complex_homology(c: &Complex, k: Coefficients) -> Result<Vec<ModuleDesc>> {
    (0..c.ranks.len()).map(|n| c.homology(n, k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_catches_shape_and_square_errors() {
        let bad_shape = Complex::new(
            vec![2, 2],
            vec![IntMatrix::from_rows(&[vec![1, 0, 0], vec![0, 1, 0]])],
        );
        assert!(bad_shape.is_err());
        let bad_square = Complex::new(
            vec![1, 1, 1],
            vec![
                IntMatrix::from_rows(&[vec![1]]),
                IntMatrix::from_rows(&[vec![1]]),
            ],
        );
        assert!(bad_square.is_err());
    }

    #[test]
    fn multiplication_by_two_on_z() {
        // 0 -> Z --2--> Z -> 0 has H_0 = Z/2, H_1 = 0.
        let c = Complex::new(vec![1, 1], vec![IntMatrix::from_rows(&[vec![2]])]).unwrap();
        let h0 = c.homology(0, Coefficients::Integer).unwrap();
        assert_eq!(h0, ModuleDesc { rank: 0, torsion: vec![BigInt::from(2)] });
        assert!(c.homology(1, Coefficients::Integer).unwrap().is_zero());
        // Over Q the torsion disappears; over F_2 both degrees light up.
        assert!(c.homology(0, Coefficients::Rational).unwrap().is_zero());
        assert_eq!(c.homology(0, Coefficients::PrimeField(2)).unwrap(), ModuleDesc::free(1));
        assert_eq!(c.homology(1, Coefficients::PrimeField(2)).unwrap(), ModuleDesc::free(1));
    }

    #[test]
    fn circle_complex() {
        // Simplicial circle: two vertices, two edges glued head to tail.
        let boundary = IntMatrix::from_rows(&[vec![-1, -1], vec![1, 1]]);
        let c = Complex::new(vec![2, 2], vec![boundary]).unwrap();
        assert_eq!(c.homology(0, Coefficients::Integer).unwrap(), ModuleDesc::free(1));
        assert_eq!(c.homology(1, Coefficients::Integer).unwrap(), ModuleDesc::free(1));
        assert_eq!(c.euler_characteristic(), 0);
    }

    #[test]
    fn three_term_with_torsion_in_the_middle() {
        // Z --0--> Z --3--> Z: H_0 = Z/3, H_1 = 0 free with no torsion, H_2 = Z.
        let c = Complex::new(
            vec![1, 1, 1],
            vec![
                IntMatrix::from_rows(&[vec![3]]),
                IntMatrix::from_rows(&[vec![0]]),
            ],
        )
        .unwrap();
        assert_eq!(
            c.homology(0, Coefficients::Integer).unwrap(),
            ModuleDesc { rank: 0, torsion: vec![BigInt::from(3)] }
        );
        assert_eq!(c.homology(1, Coefficients::Integer).unwrap(), ModuleDesc::free(0));
        assert_eq!(c.homology(2, Coefficients::Integer).unwrap(), ModuleDesc::free(1));
        assert!(c.homology(7, Coefficients::Integer).unwrap().is_zero());
    }
}
