use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Coefficient rings the homology routines understand. Everything is exact:
/// integers, rationals, or a prime field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coefficients {
    Integer,
    Rational,
    PrimeField(u64),
}

impl Coefficients {
    /// Rejects composite or degenerate moduli before any computation runs.
    pub fn validate(&self) -> Result<()> {
        match self {
            Coefficients::PrimeField(p) => {
                if is_prime(*p) {
                    Ok(())
                } else {
                    Err(Error::invalid(
                        "coefficients",
                        format!("{p} is not prime; prime field coefficients require a prime"),
                    ))
                }
            }
            _ => Ok(()),
        }
    }

    /// Whether the given integer becomes a unit in this coefficient ring.
    pub fn is_invertible(&self, n: &BigInt) -> bool {
        match self {
            Coefficients::Integer => {
                n == &BigInt::from(1) || n == &BigInt::from(-1)
            }
            Coefficients::Rational => !n.is_zero(),
            Coefficients::PrimeField(p) => !(n % BigInt::from(*p)).is_zero(),
        }
    }

    pub fn is_field(&self) -> bool {
        !matches!(self, Coefficients::Integer)
    }
}

impl fmt::Display for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficients::Integer => write!(f, "Z"),
            Coefficients::Rational => write!(f, "Q"),
            Coefficients::PrimeField(p) => write!(f, "F{p}"),
        }
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
        if n == small {
            return true;
        }
        if n % small == 0 {
            return false;
        }
    }
    // Deterministic Miller-Rabin for 64-bit inputs.
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u64 = 1;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Isomorphism type of a finitely generated module over the chosen
/// coefficients: free rank plus invariant factors (ascending divisibility
/// chain, each at least 2; empty over a field).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModuleDesc {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

impl ModuleDesc {
    pub fn free(rank: usize) -> Self {
        ModuleDesc { rank, torsion: Vec::new() }
    }

    pub fn zero() -> Self {
        ModuleDesc::free(0)
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    /// Direct sum, renormalizing the torsion list into a divisibility chain.
    pub fn direct_sum(&self, other: &ModuleDesc) -> ModuleDesc {
        let mut cyclic: Vec<BigInt> = self.torsion.clone();
        cyclic.extend(other.torsion.iter().cloned());
        ModuleDesc {
            rank: self.rank + other.rank,
            torsion: super::group::chain_from_cyclic(&cyclic),
        }
    }
}

impl fmt::Display for ModuleDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.rank > 0 {
            parts.push(if self.rank == 1 {
                "Z".to_string()
            } else {
                format!("Z^{}", self.rank)
            });
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}
