//! Chart-level classification of pre-log maps and the low-degree homotopy
//! of the log cotangent complex on the supported shapes.

use crate::abelian::{
    cokernel_structure, kernel_basis, scalar_tensor_tor, FgAbGroup, IntMatrix, ModuleDesc,
};
use crate::error::{Error, Result};
use crate::monoid::{is_exact, is_integral, AffineMonoid, SearchBounds, TriState};
use crate::prelog::{PreLogMap, PreLogRing};
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// The group-level data every flag is decided from: kernel and cokernel of
/// the pre-log map on group completions, and how their sizes interact with
/// the coefficient ring.
#[derive(Clone, Debug)]
pub struct ClassificationEvidence {
    pub kernel_rank: usize,
    pub cokernel: FgAbGroup,
    /// Order of the torsion part of the cokernel.
    pub torsion_order: BigInt,
    pub torsion_invertible: bool,
    pub cokernel_finite: bool,
    pub cokernel_order_invertible: bool,
}

/// Where a pre-log map sits in the chart taxonomy. The tri-state flags can
/// come back Unknown when a bounded membership search gives out; the
/// smoothness flags are decided exactly from the group-completion data.
#[derive(Clone, Debug)]
pub struct MapClassification {
    pub strict: TriState,
    pub kummer: TriState,
    pub integral: TriState,
    pub exact: TriState,
    pub log_smooth: bool,
    pub log_etale: bool,
    pub derived_log_smooth: bool,
    pub derived_log_etale: bool,
    pub evidence: ClassificationEvidence,
}

/// Classifies a map of pre-log rings through its pre-log monoid map.
/// Requires empty ideals on both sides; the classification is about charts,
/// not quotients of them.
pub fn classify_map(f: &PreLogMap, bounds: &SearchBounds) -> Result<MapClassification> {
    if !f.source.ideal.is_empty() || !f.target.ideal.is_empty() {
        return Err(Error::invalid(
            "classify_map",
            "classification expects plain monoid algebras; clear the ideals first",
        ));
    }
    let theta = &f.prelog_map;
    let gp = theta.gp_matrix();
    let kernel_rank = kernel_basis(gp).cols();
    let cokernel = cokernel_structure(gp);
    let torsion_order: BigInt = cokernel
        .invariant_factors
        .iter()
        .fold(BigInt::one(), |acc, m| acc * m);
    let coeff = f.source.coeff;
    let torsion_invertible = coeff.is_invertible(&torsion_order);
    let cokernel_finite = cokernel.free_rank == 0;
    let cokernel_order_invertible = cokernel_finite && torsion_invertible;

    let log_smooth = kernel_rank == 0 && torsion_invertible;
    let log_etale = log_smooth && cokernel_finite;

    let integral = is_integral(theta, bounds);
    let exact = is_exact(theta, bounds);

    // When integrality is settled affirmatively the classical flags carry
    // over; otherwise fall back to the kernel/cokernel criterion, which is
    // decidable outright in this grammar.
    let derived_log_smooth = if integral.is_yes() {
        log_smooth
    } else {
        kernel_rank == 0 && torsion_invertible
    };
    let derived_log_etale = if integral.is_yes() {
        log_etale
    } else {
        derived_log_smooth && cokernel_order_invertible
    };

    let strict = if !theta.is_gp_isomorphism() {
        TriState::No
    } else {
        let images: Vec<Vec<BigInt>> = theta
            .source()
            .generators()
            .iter()
            .map(|g| theta.apply_vec(g))
            .collect();
        let image = AffineMonoid::new(theta.target().ambient_rank(), images)?;
        match image.equals_submonoid(theta.target(), bounds) {
            Ok(true) => TriState::Yes,
            Ok(false) => TriState::No,
            Err(Error::Inconclusive { bound, .. }) => TriState::Unknown(bound),
            Err(e) => return Err(e),
        }
    };

    let kummer = if theta.is_gp_injective() && cokernel_finite {
        TriState::Yes
    } else {
        TriState::No
    };

    Ok(MapClassification {
        strict,
        kummer,
        integral,
        exact,
        log_smooth,
        log_etale,
        derived_log_smooth,
        derived_log_etale,
        evidence: ClassificationEvidence {
            kernel_rank,
            cokernel,
            torsion_order,
            torsion_invertible,
            cokernel_finite,
            cokernel_order_invertible,
        },
    })
}

/// Both sides of the map are canonical charts k[M] with pre-log monoid M,
/// and the two monoid maps agree.
pub(crate) fn canonical_chart_shape(f: &PreLogMap) -> bool {
    let canonical = |r: &PreLogRing| {
        r.ideal.is_empty()
            && r.prelog_monoid() == r.ring_monoid()
            && r.structure.matrix() == &IntMatrix::identity(r.ring_monoid().ambient_rank())
    };
    canonical(&f.source)
        && canonical(&f.target)
        && f.monoid_map.matrix() == f.prelog_map.matrix()
}

/// The map adjoins free variables: the target monoids are the source ones
/// padded into a larger ambient lattice plus fresh coordinate generators,
/// with each new pre-log generator mapped to its own fresh ring coordinate.
/// Returns the counts of log and smooth variables.
pub(crate) fn relative_free_shape(f: &PreLogMap) -> Option<(usize, usize)> {
    if !f.source.ideal.is_empty() || !f.target.ideal.is_empty() {
        return None;
    }
    let dm = f.source.ring_monoid().ambient_rank();
    let dm_big = f.target.ring_monoid().ambient_rank();
    let dn = f.source.prelog_monoid().ambient_rank();
    let dn_big = f.target.prelog_monoid().ambient_rank();
    if dm_big < dm || dn_big < dn {
        return None;
    }
    let extra = dm_big - dm;
    let x = dn_big - dn;
    if x > extra {
        return None;
    }

    let padded_inclusion = |rows: usize, cols: usize, matrix: &IntMatrix| -> bool {
        matrix.rows() == rows
            && matrix.cols() == cols
            && (0..rows).all(|i| {
                (0..cols).all(|j| {
                    let expected = if i == j { BigInt::one() } else { BigInt::zero() };
                    matrix.get(i, j) == &expected
                })
            })
    };
    if !padded_inclusion(dm_big, dm, f.monoid_map.matrix())
        || !padded_inclusion(dn_big, dn, f.prelog_map.matrix())
    {
        return None;
    }

    let extended = |small: &AffineMonoid, big: &AffineMonoid, fresh: usize| -> bool {
        let wide = big.ambient_rank();
        let mut gens: Vec<Vec<BigInt>> = small
            .generators()
            .iter()
            .map(|g| {
                let mut v = g.clone();
                v.resize(wide, BigInt::zero());
                v
            })
            .collect();
        for i in 0..fresh {
            let mut e = vec![BigInt::zero(); wide];
            e[wide - fresh + i] = BigInt::one();
            gens.push(e);
        }
        match AffineMonoid::new(wide, gens) {
            Ok(expected) => &expected == big,
            Err(_) => false,
        }
    };
    if !extended(f.source.ring_monoid(), f.target.ring_monoid(), extra)
        || !extended(f.source.prelog_monoid(), f.target.prelog_monoid(), x)
    {
        return None;
    }

    // The base block of the structure map is the source structure, and each
    // fresh pre-log generator hits its own fresh ring coordinate.
    let s = f.target.structure.matrix();
    for i in 0..dm {
        for j in 0..dn {
            if s.get(i, j) != f.source.structure.matrix().get(i, j) {
                return None;
            }
        }
    }
    let mut used = vec![false; extra];
    for j in dn..dn_big {
        let mut hit: Option<usize> = None;
        for i in 0..dm_big {
            let v = s.get(i, j);
            if v.is_zero() {
                continue;
            }
            if i < dm || !v.is_one() || hit.is_some() {
                return None;
            }
            hit = Some(i - dm);
        }
        match hit {
            Some(k) if !used[k] => used[k] = true,
            _ => return None,
        }
    }
    for i in dm..dm_big {
        for j in 0..dn {
            if !s.get(i, j).is_zero() {
                return None;
            }
        }
    }

    Some((x, extra - x))
}

/// The n-th homotopy module of the truncated log cotangent complex, as an
/// abelian-group description per monomial of the target ring (the module is
/// the target ring tensored with the description).
///
/// Supported shapes: canonical monoid-algebra maps, where the complex is the
/// ring tensored with the two-term cone of the group-completion map; free
/// pre-log extensions; and strict extensions by smooth variables (the free
/// shape with no log variables).
pub fn cotangent_pi(f: &PreLogMap, n: usize) -> Result<ModuleDesc> {
    if canonical_chart_shape(f) {
        let gp = f.prelog_map.gp_matrix();
        let coeff = f.source.coeff;
        let kernel = FgAbGroup::free(kernel_basis(gp).cols());
        let cokernel = cokernel_structure(gp);
        return Ok(match n {
            0 => scalar_tensor_tor(coeff, &cokernel).0,
            1 => {
                let (kernel_part, _) = scalar_tensor_tor(coeff, &kernel);
                let (_, tor_part) = scalar_tensor_tor(coeff, &cokernel);
                kernel_part.direct_sum(&tor_part)
            }
            _ => ModuleDesc::zero(),
        });
    }
    if let Some((log_vars, smooth_vars)) = relative_free_shape(f) {
        return Ok(if n == 0 {
            ModuleDesc::free(log_vars + smooth_vars)
        } else {
            ModuleDesc::zero()
        });
    }
    Err(Error::unsupported(
        "cotangent_pi",
        "supported shapes are canonical monoid-algebra maps, free pre-log extensions, \
         and strict smooth extensions; this map is none of those",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::{elementary_divisors, Coefficients};
    use crate::monoid::MonoidHom;
    use crate::prelog::free_prelog;

    fn bounds() -> SearchBounds {
        SearchBounds::default()
    }

    fn canonical_map(
        coeff: Coefficients,
        source: &AffineMonoid,
        target: &AffineMonoid,
        matrix: IntMatrix,
    ) -> PreLogMap {
        let theta = MonoidHom::new(source.clone(), target.clone(), matrix).unwrap();
        PreLogMap::new(
            PreLogRing::canonical(coeff, source),
            PreLogRing::canonical(coeff, target),
            theta.clone(),
            theta,
            &bounds(),
        )
        .unwrap()
    }

    #[test]
    fn scaling_by_three_is_log_etale_over_the_rationals() {
        let n = AffineMonoid::free(1);
        let f = canonical_map(
            Coefficients::Rational,
            &n,
            &n,
            IntMatrix::from_rows(&[vec![3]]),
        );
        let c = classify_map(&f, &bounds()).unwrap();
        assert!(c.kummer.is_yes());
        assert!(c.integral.is_yes());
        assert!(c.exact.is_yes());
        assert!(c.log_smooth && c.log_etale);
        assert!(c.derived_log_smooth && c.derived_log_etale);
        assert!(c.strict.is_no());
        assert_eq!(c.evidence.cokernel, FgAbGroup::cyclic(3));
    }

    #[test]
    fn the_even_chart_is_etale_but_not_integral() {
        let even = AffineMonoid::from_gens(2, &[vec![2, 0], vec![1, 1], vec![0, 2]]).unwrap();
        let free2 = AffineMonoid::free(2);
        let f = canonical_map(Coefficients::Rational, &even, &free2, IntMatrix::identity(2));
        let c = classify_map(&f, &bounds()).unwrap();
        assert!(c.log_etale);
        assert!(c.integral.is_no());
        assert!(c.derived_log_etale);
        assert!(c.exact.is_yes());
        assert!(c.kummer.is_yes());
        assert!(c.strict.is_no());
        assert_eq!(c.evidence.cokernel, FgAbGroup::cyclic(2));

        // In characteristic two the same chart stops being log smooth.
        let f2 = canonical_map(
            Coefficients::PrimeField(2),
            &even,
            &free2,
            IntMatrix::identity(2),
        );
        let c2 = classify_map(&f2, &bounds()).unwrap();
        assert!(!c2.log_smooth && !c2.derived_log_smooth);
    }

    #[test]
    fn the_identity_is_strict_with_every_flag_set() {
        let even = AffineMonoid::from_gens(2, &[vec![2, 0], vec![1, 1], vec![0, 2]]).unwrap();
        let ring = PreLogRing::canonical(Coefficients::Integer, &even);
        let c = classify_map(&PreLogMap::identity(&ring), &bounds()).unwrap();
        assert!(c.strict.is_yes());
        assert!(c.kummer.is_yes());
        assert!(c.integral.is_yes());
        assert!(c.exact.is_yes());
        assert!(c.log_smooth && c.log_etale && c.derived_log_smooth && c.derived_log_etale);
        assert!(c.evidence.cokernel.is_zero());
    }

    #[test]
    fn classification_refuses_quotient_rings() {
        use crate::monoid::MonoidElement;
        let m = AffineMonoid::free(1);
        let ring = PreLogRing::new(
            Coefficients::Integer,
            MonoidHom::identity(&m),
            vec![MonoidElement::from(&[1][..])],
            &bounds(),
        )
        .unwrap();
        let err = classify_map(&PreLogMap::identity(&ring), &bounds()).unwrap_err();
        assert!(matches!(err, Error::Invalid { .. }));
    }

    #[test]
    fn flag_implications_hold_across_sample_maps() {
        let n1 = AffineMonoid::free(1);
        let n2 = AffineMonoid::free(2);
        let even = AffineMonoid::from_gens(2, &[vec![2, 0], vec![1, 1], vec![0, 2]]).unwrap();
        let maps = vec![
            canonical_map(Coefficients::Rational, &n1, &n1, IntMatrix::from_rows(&[vec![3]])),
            canonical_map(Coefficients::PrimeField(3), &n1, &n1, IntMatrix::from_rows(&[vec![3]])),
            canonical_map(Coefficients::Rational, &even, &n2, IntMatrix::identity(2)),
            canonical_map(Coefficients::PrimeField(2), &even, &n2, IntMatrix::identity(2)),
            canonical_map(Coefficients::Integer, &n1, &n2, IntMatrix::from_rows(&[vec![1], vec![1]])),
            canonical_map(Coefficients::Rational, &n2, &n1, IntMatrix::from_rows(&[vec![1, 1]])),
        ];
        for f in &maps {
            let c = classify_map(f, &bounds()).unwrap();
            assert!(!c.derived_log_etale || c.derived_log_smooth);
            assert!(!(c.integral.is_yes() && c.log_smooth) || c.derived_log_smooth);
            assert!(!(c.integral.is_yes() && c.log_etale) || c.derived_log_etale);
            assert!(!c.log_etale || c.log_smooth);
        }
    }

    #[test]
    fn the_even_chart_cotangent_depends_on_the_characteristic() {
        let even = AffineMonoid::from_gens(2, &[vec![2, 0], vec![1, 1], vec![0, 2]]).unwrap();
        let free2 = AffineMonoid::free(2);

        // Oracle for the derived values: the group-completion map has Smith
        // form diag(1, 2), so mod two it degenerates to diag(1, 0).
        let theta =
            MonoidHom::new(even.clone(), free2.clone(), IntMatrix::identity(2)).unwrap();
        assert_eq!(
            elementary_divisors(theta.gp_matrix()),
            vec![BigInt::from(1), BigInt::from(2)]
        );

        let f0 = canonical_map(Coefficients::Rational, &even, &free2, IntMatrix::identity(2));
        assert_eq!(cotangent_pi(&f0, 0).unwrap(), ModuleDesc::zero());
        assert_eq!(cotangent_pi(&f0, 1).unwrap(), ModuleDesc::zero());

        let f2 = canonical_map(
            Coefficients::PrimeField(2),
            &even,
            &free2,
            IntMatrix::identity(2),
        );
        assert_eq!(cotangent_pi(&f2, 0).unwrap(), ModuleDesc::free(1));
        assert_eq!(cotangent_pi(&f2, 1).unwrap(), ModuleDesc::free(1));
        assert_eq!(cotangent_pi(&f2, 2).unwrap(), ModuleDesc::zero());
    }

    #[test]
    fn the_affine_line_chart_concentrates_in_degree_zero() {
        let base = PreLogRing::base(Coefficients::Rational);
        let ext = free_prelog(&base, &["t"], &[], &bounds()).unwrap();
        assert_eq!(cotangent_pi(&ext.unit, 0).unwrap(), ModuleDesc::free(1));
        assert_eq!(cotangent_pi(&ext.unit, 1).unwrap(), ModuleDesc::zero());
        assert_eq!(cotangent_pi(&ext.unit, 2).unwrap(), ModuleDesc::zero());
    }

    #[test]
    fn free_extensions_count_their_variables() {
        let base = PreLogRing::base(Coefficients::Integer);
        let ext = free_prelog(&base, &["x"], &["y"], &bounds()).unwrap();
        assert_eq!(relative_free_shape(&ext.unit), Some((1, 1)));
        assert_eq!(cotangent_pi(&ext.unit, 0).unwrap(), ModuleDesc::free(2));
        assert_eq!(cotangent_pi(&ext.unit, 1).unwrap(), ModuleDesc::zero());

        // Extensions of a nontrivial base are recognized too.
        let chart = PreLogRing::canonical(Coefficients::Integer, &AffineMonoid::free(1));
        let over_chart = free_prelog(&chart, &["u"], &["v", "w"], &bounds()).unwrap();
        assert_eq!(relative_free_shape(&over_chart.unit), Some((1, 2)));
        assert_eq!(cotangent_pi(&over_chart.unit, 0).unwrap(), ModuleDesc::free(3));
    }

    #[test]
    fn unsupported_shapes_name_the_supported_ones() {
        // Trivial pre-log on a nontrivial ring monoid is neither a canonical
        // chart nor a free extension.
        let m = AffineMonoid::free(1);
        let source = PreLogRing::with_trivial_prelog(Coefficients::Integer, &m);
        let target = PreLogRing::with_trivial_prelog(Coefficients::Integer, &m);
        let f = PreLogMap::new(
            source,
            target,
            MonoidHom::new(m.clone(), m.clone(), IntMatrix::from_rows(&[vec![2]])).unwrap(),
            MonoidHom::identity(&AffineMonoid::trivial()),
            &bounds(),
        )
        .unwrap();
        let err = cotangent_pi(&f, 0).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("canonical"), "{text}");
        assert!(text.contains("free pre-log extensions"), "{text}");
    }
}
