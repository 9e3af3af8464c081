mod common;

use common::*;
use num_traits::Zero;
use proptest::prelude::*;

use nij_core::acs::{integrability_report, is_acs, nijenhuis, star_rank, Acs};
use nij_core::autmod::{condition_number, is_automorphism, is_automorphism_with, sample_automorphisms, ACCEPT_TOL};
use nij_core::classify::classify;
use nij_core::families::{family, sample_params, FamilyId};
use nij_core::json::MatrixDocument;
use nij_core::lie::{bianchi, jacobi_check, Designator, LieAlgebra3, ProductAlgebra};
use nij_core::linalg::{Matrix3, Matrix6, Vector6};
use nij_core::numsearch::{residual, residual_gradient};
use nij_core::spectral::quasi_invariant;
use nij_core::Rational;

fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=5).prop_map(|(n, d)| qr(n, d))
}

fn vector6() -> impl Strategy<Value = Vector6<Rational>> {
    proptest::collection::vec(rational(), 6).prop_map(|v| Vector6::from_fn(|k| v[k].clone()))
}

fn matrix6() -> impl Strategy<Value = Matrix6<Rational>> {
    proptest::collection::vec(rational(), 36).prop_map(|v| Matrix6::from_fn(|r, c| v[6 * r + c].clone()))
}

/// Any Bianchi algebra, with theta drawn where the type needs one.
fn algebra() -> impl Strategy<Value = (u8, Option<Rational>)> {
    (1u8..=8, rational()).prop_filter_map("theta constraint", |(tag, theta)| match tag {
        4 if theta.is_zero() => None,
        4 => Some((4, Some(theta))),
        6 if theta <= Rational::zero() => None,
        6 => Some((6, Some(theta))),
        t => Some((t, None)),
    })
}

fn product(tag: u8, theta: &Option<Rational>) -> ProductAlgebra<Rational> {
    ProductAlgebra::new(bianchi(tag, theta.clone()).unwrap())
}

fn to_q(v: &Vector6<Rational>) -> Vec<Q> {
    v.iter().cloned().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bracket_is_bilinear_antisymmetric_and_matches_tables(
        (tag, theta) in algebra(), u in vector6(), v in vector6(), w in vector6(), a in rational()
    ) {
        let p = product(tag, &theta);
        let table = Table::new(tag, theta.clone());
        let lhs = p.bracket(&(u.scale(&a) + v.clone()), &w);
        let rhs = p.bracket(&u, &w).scale(&a) + p.bracket(&v, &w);
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(p.bracket(&u, &v), -p.bracket(&v, &u));
        prop_assert_eq!(to_q(&p.bracket(&u, &v)), table.bracket6(&to_q(&u), &to_q(&v)));
        let cyclic = p.bracket(&u, &p.bracket(&v, &w)) + p.bracket(&v, &p.bracket(&w, &u)) + p.bracket(&w, &p.bracket(&u, &v));
        prop_assert!(cyclic.is_zero());
        prop_assert!(jacobi_check(p.base().constants()).is_zero());
    }

    #[test]
    fn nijenhuis_is_tensorial_and_antisymmetric(
        (tag, theta) in algebra(), m in matrix6(), u in vector6(), v in vector6(), w in vector6(), a in rational()
    ) {
        let p = product(tag, &theta);
        let j = Acs::new(m);
        let n = |x: &Vector6<Rational>, y: &Vector6<Rational>| nijenhuis(&p, &j, x, y);
        prop_assert_eq!(n(&(u.scale(&a) + v.clone()), &w), n(&u, &w).scale(&a) + n(&v, &w));
        prop_assert_eq!(n(&v, &w), -n(&w, &v));
        let table = Table::new(tag, theta.clone());
        let oracle = common::nijenhuis(&table, &from_library(&j), &to_q(&v), &to_q(&w));
        prop_assert_eq!(to_q(&n(&v, &w)), oracle);
    }

    #[test]
    fn structure_invariants_hold_for_random_structures(seed in any::<u64>(), (tag, theta) in algebra()) {
        let mut rng = rng(seed);
        let j = random_structure(&mut rng);
        prop_assert!(is_acs(&j).is_acs);
        let (a, b) = star_rank(&j);
        prop_assert!(matches!(a, 1 | 3) && matches!(b, 1 | 3));
        let quasi = quasi_invariant(&j);
        prop_assert!(!quasi.is_empty());
        prop_assert!(quasi.iter().all(|q| q.verify(&j)));
        // N(Jv, w) = -J N(v, w) and N(Jv, Jw) = -N(v, w)
        let p = product(tag, &theta);
        let (v, w) = (random_vector(&mut rng), random_vector(&mut rng));
        let (v, w) = (Vector6::from_fn(|k| v[k].clone()), Vector6::from_fn(|k| w[k].clone()));
        let nvw = nijenhuis(&p, &j, &v, &w);
        prop_assert_eq!(nijenhuis(&p, &j, &j.apply(&v), &w), -j.apply(&nvw));
        prop_assert_eq!(nijenhuis(&p, &j, &j.apply(&v), &j.apply(&w)), -nvw);
    }

    #[test]
    fn family_samples_are_exact_structures(seed in any::<u64>(), index in 0usize..13) {
        let id = FamilyId::TEMPLATED[index];
        prop_assume!(!matches!(id, FamilyId::Case6Theta1Lambda2 | FamilyId::Case6Theta1LambdaMinus2));
        for d in id.reference_algebras() {
            let p = d.product::<Rational>().unwrap();
            let params = sample_params(id, seed, 1).remove(0);
            let j = family(id, &params, p.base()).unwrap();
            prop_assert!(is_integrable(&table_for(&d.to_string()), &from_library(&j)));
            prop_assert!(classify(&p, &j).unwrap().shape.is_some());
            // float residual and gradient vanish at exact structures
            let pf = p.to_f64();
            let jf = j.to_f64();
            prop_assert!(residual(&pf, jf.matrix()).unwrap() < 1e-20);
            let scale = (1.0 + jf.matrix().max_norm()).powi(3);
            prop_assert!(residual_gradient(&pf, jf.matrix()).unwrap().iter().all(|g| g.abs() < 1e-12 * scale));
        }
    }

    #[test]
    fn sampling_is_deterministic(seed in any::<u64>(), index in 0usize..13) {
        let id = FamilyId::TEMPLATED[index];
        prop_assert_eq!(sample_params(id, seed, 4), sample_params(id, seed, 4));
    }

    #[test]
    fn matrix_documents_round_trip(m in matrix6(), (tag, theta) in algebra()) {
        let alg: LieAlgebra3<Rational> = bianchi(tag, theta).unwrap();
        let doc = MatrixDocument::rational(alg.designator(), Acs::new(m.clone()));
        let back = MatrixDocument::parse(&doc.to_json_string()).unwrap();
        prop_assert_eq!(&back, &doc);
        let fdoc = MatrixDocument::float(alg.designator(), Acs::new(m.to_f64()));
        prop_assert_eq!(MatrixDocument::parse(&fdoc.to_json_string()).unwrap(), fdoc);
    }

    #[test]
    fn integrability_agrees_with_oracle((tag, theta) in algebra(), m in matrix6()) {
        let p = product(tag, &theta);
        let j = Acs::new(m);
        let report = integrability_report(&p, &j);
        let oracle = failing_pairs(&Table::new(tag, theta.clone()), &from_library(&j));
        prop_assert_eq!(report.failing_pairs(0.0), oracle);
    }

    #[test]
    fn type_two_diagonal_maps_are_automorphisms(a in rational(), b in rational()) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        let alg = bianchi::<Rational>(2, None).unwrap();
        let mut phi = Matrix3::<Rational>::identity();
        phi[(0, 0)] = a;
        phi[(2, 2)] = b;
        prop_assert!(is_automorphism(&alg, &phi).is_automorphism);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn automorphisms_close_under_composition_and_inverse(seed in any::<u64>(), index in 0usize..8) {
        let d: Designator = ["1", "2", "3", "4:1", "4:2", "5", "6:1", "8"][index].parse().unwrap();
        let alg = d.algebra::<f64>().unwrap();
        let sample = sample_automorphisms(&alg, 4, seed).unwrap();
        for phi in &sample.maps {
            for psi in &sample.maps {
                let composed = phi.mul_mat(psi);
                let tol = 10.0 * ACCEPT_TOL * (1.0 + phi.max_norm()) * (1.0 + psi.max_norm());
                prop_assert!(is_automorphism_with(&alg, &composed, tol).residual <= tol);
            }
            if condition_number(phi) <= 1e6 {
                let inv = phi.inverse().unwrap();
                let tol = 10.0 * ACCEPT_TOL * (1.0 + inv.max_norm()).powi(3);
                prop_assert!(is_automorphism_with(&alg, &inv, tol).residual <= tol);
            }
        }
    }
}

#[test]
fn scalar_modes_agree_on_family_points() {
    for id in [FamilyId::Case2, FamilyId::Case3Full, FamilyId::Magnin] {
        for d in id.reference_algebras() {
            let p = d.product::<Rational>().unwrap();
            for params in sample_params(id, 3, 5) {
                let j = family(id, &params, p.base()).unwrap();
                let exact = classify(&p, &j).unwrap();
                let float = classify(&p.to_f64(), &j.to_f64()).unwrap();
                assert_eq!(exact.star_rank, float.star_rank);
                assert_eq!(exact.swaps_factors, float.swaps_factors);
                assert_eq!(exact.shape.map(|s| s.family), float.shape.map(|s| s.family));
                let mut a: Vec<f64> = exact.quasi_invariant.iter().map(|q| q.lambda.approx()).collect();
                let mut b: Vec<f64> = float.quasi_invariant.iter().map(|q| q.lambda.approx()).collect();
                a.sort_by(f64::total_cmp);
                b.sort_by(f64::total_cmp);
                assert_eq!(a.len(), b.len(), "{id} on {d}");
                assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-8));
            }
        }
    }
}
