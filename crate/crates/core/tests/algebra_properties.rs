mod common;

use common::{embed, embed_quat, exp_series, max_entry, oracle_norm, oracle_product};
use proptest::prelude::*;
use sp2geo::lie::{adjoint, bracket, standard_frame};
use sp2geo::quat::{AlgebraVector, GroupPoint, Quaternion, mat_exp};

fn quaternion() -> impl Strategy<Value = Quaternion> {
    prop::array::uniform4(-10.0..10.0f64).prop_map(Quaternion::from_array)
}

fn algebra(max_norm: f64) -> impl Strategy<Value = AlgebraVector> {
    prop::array::uniform10(-1.0..1.0f64).prop_map(move |c| {
        let u = standard_frame().combine(&c);
        let n = u.norm();
        if n > max_norm { u.scale(max_norm / n) } else { u }
    })
}

fn group_point() -> impl Strategy<Value = GroupPoint> {
    algebra(3.0).prop_map(|u| mat_exp(&u))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn product_agrees_with_complex_embedding(p in quaternion(), q in quaternion()) {
        let gap = (embed_quat(p * q) - oracle_product(p, q)).iter().map(|c| c.norm()).fold(0.0, f64::max);
        prop_assert!(gap <= 1e-12 * (1.0 + p.norm() * q.norm()));
    }

    #[test]
    fn norm_is_multiplicative(p in quaternion(), q in quaternion()) {
        let lhs = (p * q).norm();
        prop_assert!((lhs - p.norm() * q.norm()).abs() <= 1e-12 * (1.0 + lhs));
        prop_assert!((p.norm() - oracle_norm(p)).abs() <= 1e-12 * (1.0 + p.norm()));
    }

    #[test]
    fn conjugation_reverses_products(p in quaternion(), q in quaternion()) {
        prop_assert!(((p * q).conj().max_abs_diff(q.conj() * p.conj())) <= 1e-12 * (1.0 + p.norm() * q.norm()));
    }

    #[test]
    fn adjoint_is_an_isometry(g in group_point(), u in algebra(2.0), v in algebra(2.0)) {
        let (au, av) = (adjoint(&g, &u), adjoint(&g, &v));
        prop_assert!((au.inner(&av) - u.inner(&v)).abs() <= 1e-12);
        prop_assert!((au.norm() - u.norm()).abs() <= 1e-12);
    }

    #[test]
    fn adjoint_is_a_lie_algebra_map(g in group_point(), u in algebra(2.0), v in algebra(2.0)) {
        let lhs = adjoint(&g, &bracket(&u, &v));
        let rhs = bracket(&adjoint(&g, &u), &adjoint(&g, &v));
        prop_assert!(lhs.matrix().max_abs_diff(rhs.matrix()) <= 1e-12);
    }

    #[test]
    fn exp_matches_series(u in algebra(2.0)) {
        let gap = max_entry(&(embed(mat_exp(&u).matrix()) - exp_series(u.matrix(), 40)));
        prop_assert!(gap <= 1e-12);
    }

    #[test]
    fn exp_is_unitary(u in algebra(2.0)) {
        prop_assert!(mat_exp(&u).unitarity_defect() <= 1e-10);
    }

    #[test]
    fn exp_is_a_one_parameter_group(u in algebra(1.0), s in -2.0..2.0f64, t in -2.0..2.0f64) {
        let sum = mat_exp(&u.scale(s + t));
        let prod = *mat_exp(&u.scale(s)).matrix() * *mat_exp(&u.scale(t)).matrix();
        prop_assert!(sum.matrix().max_abs_diff(&prod) <= 1e-12);
    }

    #[test]
    fn inverse_is_conjugate_transpose(g in group_point()) {
        let id = *g.matrix() * *g.inverse().matrix();
        prop_assert!(id.max_abs_diff(&sp2geo::quat::QuatMat2::IDENTITY) <= 1e-12);
    }
}
