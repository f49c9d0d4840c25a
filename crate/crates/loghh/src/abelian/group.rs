use super::coefficients::{Coefficients, ModuleDesc};
use super::matrix::IntMatrix;
use super::snf::elementary_divisors;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Finitely generated abelian group in canonical form: free rank plus
/// invariant factors in an ascending divisibility chain, each at least 2.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FgAbGroup {
    pub free_rank: usize,
    pub invariant_factors: Vec<BigInt>,
}

impl FgAbGroup {
    pub fn free(rank: usize) -> Self {
        FgAbGroup { free_rank: rank, invariant_factors: Vec::new() }
    }

    pub fn zero() -> Self {
        FgAbGroup::free(0)
    }

    pub fn cyclic(n: u64) -> Self {
        match n {
            0 => FgAbGroup::free(1),
            1 => FgAbGroup::zero(),
            _ => FgAbGroup { free_rank: 0, invariant_factors: vec![BigInt::from(n)] },
        }
    }

    /// Builds the canonical form from an arbitrary list of cyclic orders,
    /// where 0 means an infinite cyclic factor and 1 factors are dropped.
    pub fn from_cyclic_orders(orders: &[BigInt]) -> Self {
        let free = orders.iter().filter(|x| x.is_zero()).count();
        let finite: Vec<BigInt> = orders.iter().filter(|x| !x.is_zero()).cloned().collect();
        FgAbGroup {
            free_rank: free,
            invariant_factors: chain_from_cyclic(&finite),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }

    pub fn direct_sum(&self, other: &FgAbGroup) -> FgAbGroup {
        let mut cyclic = self.invariant_factors.clone();
        cyclic.extend(other.invariant_factors.iter().cloned());
        FgAbGroup {
            free_rank: self.free_rank + other.free_rank,
            invariant_factors: chain_from_cyclic(&cyclic),
        }
    }

    /// Tensor product over Z, using bilinearity over the cyclic decomposition
    /// and Z/d (x) Z/e = Z/gcd(d, e).
    pub fn tensor(&self, other: &FgAbGroup) -> FgAbGroup {
        let mut cyclic: Vec<BigInt> = Vec::new();
        let mut free = self.free_rank * other.free_rank;
        for d in &self.invariant_factors {
            for e in &other.invariant_factors {
                cyclic.push(d.gcd(e));
            }
        }
        for d in &self.invariant_factors {
            for _ in 0..other.free_rank {
                cyclic.push(d.clone());
            }
        }
        for e in &other.invariant_factors {
            for _ in 0..self.free_rank {
                cyclic.push(e.clone());
            }
        }
        // Z (x) Z contributes free rank only; collected above.
        let _ = &mut free;
        FgAbGroup { free_rank: free, invariant_factors: chain_from_cyclic(&cyclic) }
    }

    /// Tor_1^Z, which kills free factors and pairs torsion by gcd.
    pub fn tor(&self, other: &FgAbGroup) -> FgAbGroup {
        let mut cyclic: Vec<BigInt> = Vec::new();
        for d in &self.invariant_factors {
            for e in &other.invariant_factors {
                cyclic.push(d.gcd(e));
            }
        }
        FgAbGroup { free_rank: 0, invariant_factors: chain_from_cyclic(&cyclic) }
    }

    /// The module this group defines over the requested coefficients, via
    /// (-) (x) k. Over Z this is the identity translation.
    pub fn with_coefficients(&self, k: Coefficients) -> ModuleDesc {
        match k {
            Coefficients::Integer => ModuleDesc {
                rank: self.free_rank,
                torsion: self.invariant_factors.clone(),
            },
            Coefficients::Rational => ModuleDesc::free(self.free_rank),
            Coefficients::PrimeField(p) => {
                let pb = BigInt::from(p);
                let extra = self
                    .invariant_factors
                    .iter()
                    .filter(|d| (*d % &pb).is_zero())
                    .count();
                ModuleDesc::free(self.free_rank + extra)
            }
        }
    }
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 {
                "Z".to_string()
            } else {
                format!("Z^{}", self.free_rank)
            });
        }
        for d in &self.invariant_factors {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Canonicalizes a multiset of finite cyclic orders into an ascending
/// divisibility chain. Works prime by prime: the k-th largest invariant
/// factor collects the k-th largest exponent of each prime.
pub fn chain_from_cyclic(orders: &[BigInt]) -> Vec<BigInt> {
    let mut per_prime: BTreeMap<BigInt, Vec<u32>> = BTreeMap::new();
    for d in orders {
        debug_assert!(!d.is_zero());
        let mut rest = d.clone();
        if rest < BigInt::zero() {
            rest = -rest;
        }
        if rest.is_one() {
            continue;
        }
        let mut p = BigInt::from(2);
        while &p * &p <= rest {
            if (&rest % &p).is_zero() {
                let mut e = 0u32;
                while (&rest % &p).is_zero() {
                    rest /= &p;
                    e += 1;
                }
                per_prime.entry(p.clone()).or_default().push(e);
            }
            p += 1;
        }
        if rest > BigInt::one() {
            per_prime.entry(rest).or_default().push(1);
        }
    }
    let slots = per_prime.values().map(|v| v.len()).max().unwrap_or(0);
    let mut chain = vec![BigInt::one(); slots];
    for (p, mut exps) in per_prime {
        exps.sort_unstable_by(|a, b| b.cmp(a));
        // Largest exponent goes to the last (largest) invariant factor.
        for (k, e) in exps.iter().enumerate() {
            let slot = slots - 1 - k;
            chain[slot] *= p.pow(*e);
        }
    }
    chain.retain(|d| !d.is_one());
    chain
}

/// Cokernel of an integer matrix as an abstract group: Z^rows / im(a).
pub fn cokernel_structure(a: &IntMatrix) -> FgAbGroup {
    let divisors = elementary_divisors(a);
    let rank = divisors.len();
    let torsion: Vec<BigInt> = divisors
        .into_iter()
        .filter(|d| *d > BigInt::one())
        .collect();
    FgAbGroup {
        free_rank: a.rows() - rank,
        invariant_factors: torsion,
    }
}

/// k (x)_Z G and Tor_1^Z(k, G) for scalar coefficients, by closed form.
/// Returns (tensor, tor) as modules over k.
pub fn scalar_tensor_tor(k: Coefficients, g: &FgAbGroup) -> (ModuleDesc, ModuleDesc) {
    match k {
        Coefficients::Integer => (
            ModuleDesc { rank: g.free_rank, torsion: g.invariant_factors.clone() },
            ModuleDesc::zero(),
        ),
        Coefficients::Rational => (ModuleDesc::free(g.free_rank), ModuleDesc::zero()),
        Coefficients::PrimeField(p) => {
            let pb = BigInt::from(p);
            let hit = g
                .invariant_factors
                .iter()
                .filter(|d| (*d % &pb).is_zero())
                .count();
            (
                ModuleDesc::free(g.free_rank + hit),
                ModuleDesc::free(hit),
            )
        }
    }
}

/// Group homology H_n(BG; k) for a finitely generated abelian G, computed by
/// the integral Kunneth formula over the cyclic decomposition and then, for
/// field coefficients, universal coefficients.
///
/// Building blocks: H_*(BZ; Z) = (Z, Z, 0, ...), and for d >= 2
/// H_*(BZ/d; Z) = (Z, Z/d, 0, Z/d, 0, ...) with Z/d in odd degrees.
pub fn group_homology(g: &FgAbGroup, n_max: usize, k: Coefficients) -> Vec<ModuleDesc> {
    let integral = integral_group_homology(g, n_max);
    match k {
        Coefficients::Integer => integral
            .into_iter()
            .map(|h| ModuleDesc { rank: h.free_rank, torsion: h.invariant_factors })
            .collect(),
        Coefficients::Rational => integral
            .into_iter()
            .map(|h| ModuleDesc::free(h.free_rank))
            .collect(),
        Coefficients::PrimeField(p) => {
            // Universal coefficients: dim H_n(-; F_p) counts the free rank,
            // p-torsion of H_n, and p-torsion of H_{n-1}.
            let pb = BigInt::from(p);
            (0..=n_max)
                .map(|n| {
                    let here = &integral[n];
                    let hit_here = here
                        .invariant_factors
                        .iter()
                        .filter(|d| (*d % &pb).is_zero())
                        .count();
                    let hit_below = if n == 0 {
                        0
                    } else {
                        integral[n - 1]
                            .invariant_factors
                            .iter()
                            .filter(|d| (*d % &pb).is_zero())
                            .count()
                    };
                    ModuleDesc::free(here.free_rank + hit_here + hit_below)
                })
                .collect()
        }
    }
}

/// Integral homology of BG through degree n_max, as graded groups.
pub fn integral_group_homology(g: &FgAbGroup, n_max: usize) -> Vec<FgAbGroup> {
    // Start from the one-point space.
    let mut acc: Vec<FgAbGroup> = vec![FgAbGroup::zero(); n_max + 1];
    acc[0] = FgAbGroup::free(1);
    for _ in 0..g.free_rank {
        acc = kunneth(&acc, &circle_homology(n_max), n_max);
    }
    for d in &g.invariant_factors {
        acc = kunneth(&acc, &lens_homology(d, n_max), n_max);
    }
    acc
}

fn circle_homology(n_max: usize) -> Vec<FgAbGroup> {
    let mut h = vec![FgAbGroup::zero(); n_max + 1];
    h[0] = FgAbGroup::free(1);
    if n_max >= 1 {
        h[1] = FgAbGroup::free(1);
    }
    h
}

fn lens_homology(d: &BigInt, n_max: usize) -> Vec<FgAbGroup> {
    let mut h = vec![FgAbGroup::zero(); n_max + 1];
    h[0] = FgAbGroup::free(1);
    for n in (1..=n_max).step_by(2) {
        h[n] = FgAbGroup {
            free_rank: 0,
            invariant_factors: vec![d.clone()],
        };
    }
    h
}

/// Integral Kunneth: H_n(X x Y) = sum_{i+j=n} H_i (x) H_j  +  sum_{i+j=n-1}
/// Tor(H_i, H_j). Exact because everything is finitely generated.
fn kunneth(a: &[FgAbGroup], b: &[FgAbGroup], n_max: usize) -> Vec<FgAbGroup> {
    (0..=n_max)
        .map(|n| {
            let mut acc = FgAbGroup::zero();
            for i in 0..=n {
                acc = acc.direct_sum(&a[i].tensor(&b[n - i]));
            }
            if n >= 1 {
                for i in 0..n {
                    acc = acc.direct_sum(&a[i].tor(&b[n - 1 - i]));
                }
            }
            acc
        })
        .collect()
}
