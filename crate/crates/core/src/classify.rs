//! Structural diagnostics of an integrable complex structure.
//!
//! Shape matching is done in the basis the matrix is given in: parameters are
//! read off the entries a family template would occupy, the template is
//! rebuilt from them and compared entry by entry. No change of basis is
//! attempted, so "no match" only means no match in this basis.

use serde::Serialize;

use crate::acs::{integrability_report, is_acs, star_rank, swaps_factors, Acs};
use crate::error::{Error, Result};
use crate::families::{mixed_matrix, template, FamilyId, FamilyParams};
use crate::lie::ProductAlgebra;
use crate::linalg::Matrix6;
use crate::scalar::{Scalar, DEFAULT_EPS};
use crate::spectral::{quasi_invariant, Eigenvalue, QuasiInvariantView, Spectral};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuasiSummary {
    pub v: String,
    pub lambda: Eigenvalue,
    pub jstar_v: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapeMatch {
    /// Template name: a family id, or `split-form` for the template shared
    /// by `case3-split`, `case4-split` and `case6-rank1`.
    pub shape: String,
    pub family: FamilyId,
    /// Parameters read off the matrix, as JSON scalars.
    pub params: Vec<(String, serde_json::Value)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub star_rank: (usize, usize),
    pub quasi_invariant: Vec<QuasiSummary>,
    pub swaps_factors: bool,
    /// `None` when no family template matches in the given basis.
    pub shape: Option<ShapeMatch>,
}

/// Diagnostics of an integrable `j`; anything else is rejected.
pub fn classify<T: Spectral>(palg: &ProductAlgebra<T>, j: &Acs<T>) -> Result<Diagnostics> {
    let square = is_acs(j);
    if !square.is_acs {
        return Err(Error::NotAcs(square.residual));
    }
    let report = integrability_report(palg, j);
    if !report.integrable {
        return Err(Error::NotIntegrable(report.max_norm));
    }
    let quasi = quasi_invariant(j)
        .iter()
        .map(|q| QuasiSummary { v: q.describe_v(), lambda: q.eigenvalue(), jstar_v: q.jstar_v_f64() })
        .collect();
    Ok(Diagnostics {
        star_rank: star_rank(j),
        quasi_invariant: quasi,
        swaps_factors: swaps_factors(j),
        shape: match_shape(palg, j),
    })
}

const SHAPE_ORDER: [FamilyId; 14] = [
    FamilyId::AbelianStandard,
    FamilyId::Case6Theta1Lambda0a,
    FamilyId::Case6Theta1Lambda0b,
    FamilyId::Case6Theta1Lambda2,
    FamilyId::Case6Theta1LambdaMinus2,
    FamilyId::Case3Split,
    FamilyId::Case4Split,
    FamilyId::Case6Rank1,
    FamilyId::Case2,
    FamilyId::Case3Full,
    FamilyId::AbelianRank1,
    FamilyId::AbelianGeneral,
    FamilyId::Magnin,
    FamilyId::Mixed,
];

/// First family template, admissible on the algebra, that reproduces `j`.
pub fn match_shape<T: Scalar>(palg: &ProductAlgebra<T>, j: &Acs<T>) -> Option<ShapeMatch> {
    let alg = palg.base();
    let m = j.matrix();
    for id in SHAPE_ORDER.into_iter().filter(|id| id.admits(alg)) {
        if id == FamilyId::Mixed {
            let hit = [(2, 0, 1), (1, 0, 2), (0, 1, 2), (2, 1, 0), (1, 2, 0), (0, 2, 1)]
                .into_iter()
                .find(|&(u, v, w)| close(&mixed_matrix::<T>(u, v, w), m));
            if let Some((u, v, w)) = hit {
                let label = |i: usize| serde_json::Value::String(format!("e{}", i + 1));
                return Some(ShapeMatch {
                    shape: id.to_string(),
                    family: id,
                    params: vec![("u".into(), label(u)), ("v".into(), label(v)), ("w".into(), label(w))],
                });
            }
            continue;
        }
        let Some(params) = extract(id, m, alg.tag().number()) else {
            continue;
        };
        let Ok(rebuilt) = template(id, &params, alg.tag()) else {
            continue;
        };
        if close(&rebuilt, m) {
            let shape = match id {
                FamilyId::Case3Split | FamilyId::Case4Split | FamilyId::Case6Rank1 => "split-form".to_string(),
                other => other.to_string(),
            };
            let params = params.pairs(id).into_iter().map(|(k, v)| (k.to_string(), v.to_json())).collect();
            return Some(ShapeMatch { shape, family: id, params });
        }
    }
    None
}

fn close<T: Scalar>(a: &Matrix6<T>, b: &Matrix6<T>) -> bool {
    (0..6).all(|r| (0..6).all(|c| (a[(r, c)].clone() - b[(r, c)].clone()).is_negligible(DEFAULT_EPS)))
}

fn extract<T: Scalar>(id: FamilyId, m: &Matrix6<T>, tag: u8) -> Option<FamilyParams<T>> {
    let e = |r: usize, c: usize| m[(r, c)].clone();
    let values = match id {
        FamilyId::AbelianGeneral => vec![e(0, 0), e(1, 0), e(2, 0), e(0, 1), e(1, 1), e(2, 1), e(2, 2)],
        FamilyId::AbelianRank1 => vec![e(2, 2)],
        FamilyId::Case2 => {
            let lambda = e(2, 2);
            let kappa_star = e(2, 3) / -(T::one() + lambda.clone() * lambda.clone());
            vec![e(0, 0), e(1, 0), lambda, e(5, 0), kappa_star, e(3, 3), e(4, 3)]
        }
        FamilyId::Case3Split | FamilyId::Case4Split | FamilyId::Case6Rank1 => {
            vec![e(0, 0), e(1, 0), e(2, 2), e(3, 3), e(4, 3)]
        }
        FamilyId::Case3Full => vec![e(0, 0), e(1, 0), e(2, 0), e(0, 1), e(1, 1), e(2, 1)],
        FamilyId::Magnin if tag == 7 => vec![e(1, 1), e(1, 4)],
        FamilyId::Magnin => vec![e(2, 2), e(2, 5)],
        _ => vec![],
    };
    FamilyParams::from_values(id, values).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{family, sample_params};
    use crate::lie::Designator;
    use crate::scalar::Rational;

    type Q = Rational;

    fn palg(d: &str) -> ProductAlgebra<Q> {
        d.parse::<Designator>().unwrap().product().unwrap()
    }

    #[test]
    fn split_form_sample() {
        let p = palg("4:1");
        let params = sample_params(FamilyId::Case4Split, 5, 1).remove(0);
        let j = family(FamilyId::Case4Split, &params, p.base()).unwrap();
        let d = classify(&p, &j).unwrap();
        assert_eq!(d.star_rank, (1, 1));
        assert!(!d.swaps_factors);
        let shape = d.shape.unwrap();
        assert_eq!(shape.shape, "split-form");
        assert_eq!(shape.family, FamilyId::Case4Split);
        let lambda = params.values()[2].clone();
        assert!(d.quasi_invariant.iter().any(|q| q.v == "e3"
            && q.lambda == Eigenvalue::Rational { value: crate::scalar::format_rational(&lambda) }));
    }

    #[test]
    fn abelian_standard() {
        let d = classify(&palg("1"), &Acs::standard()).unwrap();
        assert_eq!(d.star_rank, (3, 3));
        assert!(d.swaps_factors);
        assert_eq!(d.quasi_invariant.len(), 3);
        assert!(d.quasi_invariant.iter().all(|q| q.lambda == Eigenvalue::Rational { value: "0/1".into() }));
        assert_eq!(d.shape.unwrap().shape, "abelian-standard");
    }

    #[test]
    fn case3_full_sample() {
        let p = palg("3");
        for params in sample_params(FamilyId::Case3Full, 21, 5) {
            let j = family(FamilyId::Case3Full, &params, p.base()).unwrap();
            let d = classify(&p, &j).unwrap();
            assert_eq!(d.star_rank, (3, 3));
            assert!(!d.swaps_factors);
            assert_eq!(d.shape.unwrap().shape, "case3-full");
            let FamilyParams::Case3Full { x, y, a, b, .. } = &params else { panic!() };
            let lambda = crate::families::case3_full_lambda(x, y, a, b);
            assert_eq!(j.matrix()[(2, 2)], lambda);
        }
    }

    #[test]
    fn every_family_sample_matches_its_own_shape() {
        for id in FamilyId::ALL {
            for d in id.reference_algebras() {
                let p = d.product::<Q>().unwrap();
                for params in sample_params(id, 2, 3) {
                    let Ok(j) = family(id, &params, p.base()) else { continue };
                    let shape = classify(&p, &j).unwrap().shape;
                    assert!(shape.is_some(), "{id} on {d}: no shape");
                }
            }
        }
    }

    #[test]
    fn float_input_matches_too() {
        let p = palg("3");
        let params = sample_params(FamilyId::Case3Split, 8, 1).remove(0);
        let j = family(FamilyId::Case3Split, &params, p.base()).unwrap().to_f64();
        let d = classify(&p.to_f64(), &j).unwrap();
        assert_eq!(d.shape.unwrap().shape, "split-form");
    }

    #[test]
    fn rejects_non_structures() {
        let p = palg("2");
        assert!(matches!(classify(&p, &Acs::standard()), Err(Error::NotIntegrable(_))));
        let id = Acs::new(Matrix6::<Q>::identity());
        assert!(matches!(classify(&p, &id), Err(Error::NotAcs(_))));
    }

    #[test]
    fn unrelated_basis_reports_no_match() {
        // The standard structure conjugated by a shear is still a structure on
        // the abelian algebra, but in no template's basis.
        let p = palg("1");
        let mut shear = Matrix6::<Q>::identity();
        shear[(0, 4)] = Q::from_i64(3);
        shear[(2, 1)] = Q::from_i64(-2);
        let j = Acs::standard().conjugate(&shear).unwrap();
        let d = classify(&p, &j).unwrap();
        assert!(d.shape.is_none());
    }
}
