//! Randomized algebraic properties over generated dimensions and seeds.

mod common;

use common::*;
use lagrep_core::json;
use lagrep_core::lagrange::{
    decompose_two_lagrangians, lagrangian_from_frame, pairs_congruent, sigma_compose,
};
use lagrep_core::numcore::{
    circular_distance, eig_unitary, haar_unitary, symmetric_unitary_sqrt, unitary_defect,
    wrap_angle, CMat, TAU,
};
use lagrep_core::qham::fusion_form_general;
use lagrep_core::reps::{beta, class_of, membership};
use proptest::prelude::*;

proptest! {
    #[test]
    fn wrapped_angles_land_in_range(t in -50.0..50.0f64) {
        let w = wrap_angle(t);
        prop_assert!((0.0..TAU).contains(&w));
        prop_assert!(circular_distance(w, t.rem_euclid(TAU)) <= 1e-9);
    }

    #[test]
    fn haar_samples_are_unitary(n in 1usize..=6, seed in any::<u64>()) {
        let u = haar_unitary(n, seed);
        prop_assert!(unitary_defect(&u) <= tol().unitary(n));
    }

    #[test]
    fn eig_reconstructs(n in 1usize..=5, seed in any::<u64>()) {
        let u = haar_unitary(n, seed);
        let eig = eig_unitary(&u, &tol()).unwrap();
        prop_assert!((eig.reconstruct() - u).norm() <= tol().recon(n));
    }

    #[test]
    fn sqrt_squares_back(n in 1usize..=5, seed in any::<u64>()) {
        let w = random_symmetric_unitary(n, &mut rng(seed));
        let phi = symmetric_unitary_sqrt(&w, &tol()).unwrap();
        prop_assert!((&phi * &phi - &w).norm() <= 1e-11);
        prop_assert!((&phi - phi.transpose()).norm() <= 1e-11);
    }

    #[test]
    fn beta_round_trips_and_preserves_closure(
        n in 1usize..=4,
        l in 1usize..=5,
        seed in any::<u64>(),
    ) {
        let rep = random_closed(n, l, seed);
        let b = beta(&rep);
        prop_assert!(b.product_residual() <= 1e-11);
        prop_assert!(beta(&b).distance(&rep) <= 1e-11);
    }

    #[test]
    fn classes_are_conjugation_invariant(n in 1usize..=5, seed in any::<u64>()) {
        let mut rng = rng(seed);
        let u = lagrep_core::numcore::haar_unitary_with(n, &mut rng);
        let g = lagrep_core::numcore::haar_unitary_with(n, &mut rng);
        let class = class_of(&u, &tol()).unwrap();
        prop_assert!(membership(&class, &(&g * &u * g.adjoint()), &tol()).unwrap());
    }

    #[test]
    fn fused_forms_are_antisymmetric(
        n in 2usize..=3,
        l in 1usize..=3,
        seed in any::<u64>(),
    ) {
        let mut rng = rng(seed);
        let p = random_point(n, l, &mut rng);
        let xs = random_tangents(n, l, &mut rng);
        let ys = random_tangents(n, l, &mut rng);
        let a = fusion_form_general(&p, &xs, &ys).unwrap();
        let b = fusion_form_general(&p, &ys, &xs).unwrap();
        prop_assert!((a + b).abs() <= 1e-12);
        prop_assert!(fusion_form_general(&p, &xs, &xs).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn eta_intertwines_alpha_with_beta(
        n in 1usize..=3,
        l in 1usize..=3,
        seed in any::<u64>(),
    ) {
        use lagrep_core::duality::{alpha_l, eta_l, PairTuple};
        let ru = random_closed(n, l, seed);
        let rv = random_closed(n, l, seed.wrapping_add(1));
        let pairs = PairTuple::new(
            ru.matrices.into_iter().zip(rv.matrices).collect(),
            &tol(),
        )
        .unwrap();
        let lhs = eta_l(&alpha_l(&pairs), &tol()).unwrap();
        let rhs = beta(&eta_l(&pairs, &tol()).unwrap());
        prop_assert!(lhs.distance(&rhs) <= 1e-10);
    }

    #[test]
    fn rep_json_round_trips_bytewise(
        n in 1usize..=4,
        l in 1usize..=4,
        seed in any::<u64>(),
    ) {
        let rep = random_closed(n, l, seed);
        let first = json::to_canonical_string(&json::rep_to_value(&rep));
        let back = json::rep_from_value(&json::parse(&first).unwrap(), &tol()).unwrap();
        let second = json::to_canonical_string(&json::rep_to_value(&back));
        prop_assert_eq!(first, second);
        prop_assert!(back.distance(&rep) == 0.0);
    }

    #[test]
    fn decomposition_reconstructs_haar_input(n in 1usize..=5, seed in any::<u64>()) {
        let u = haar_unitary(n, seed);
        let (l1, l2) = decompose_two_lagrangians(&u, &tol()).unwrap();
        let rebuilt = sigma_compose(&l1, &l2).unwrap();
        prop_assert!((rebuilt - u).norm() <= 1e-9);
    }

    #[test]
    fn congruence_holds_along_the_diagonal_action(n in 1usize..=4, seed in any::<u64>()) {
        let mut rng = rng(seed);
        let l1 = lagrangian_from_frame(
            &lagrep_core::numcore::haar_unitary_with(n, &mut rng), &tol()).unwrap();
        let l2 = lagrangian_from_frame(
            &lagrep_core::numcore::haar_unitary_with(n, &mut rng), &tol()).unwrap();
        let phi = lagrep_core::numcore::haar_unitary_with(n, &mut rng);
        prop_assert!(pairs_congruent(
            &l1,
            &l2,
            &l1.transported(&phi),
            &l2.transported(&phi),
            &tol(),
        )
        .unwrap());
    }

    #[test]
    fn scalar_tuples_are_beta_fixed(l in 1usize..=6, seed in any::<u64>()) {
        let rep = random_closed(1, l, seed);
        prop_assert!(lagrep_core::reps::beta_fix_defect(&rep) <= 1e-12);
        let identity = CMat::identity(1, 1);
        prop_assert!((rep.product() - identity).norm() <= 1e-12);
    }
}
