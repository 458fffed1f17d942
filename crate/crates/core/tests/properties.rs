use beam_bvp::boundary::{greens_matrices, is_wellposed, BoundaryCondition};
use beam_bvp::existence::rank_one_inverse_image;
use beam_bvp::matrix_kit::{
    chi, chi_inverse, constants, is_pibar4, max_norm, pibar_to_real4, real_to_pibar4, BeamParams, ComplexMatrix, Mat4, C64, IM,
};
use beam_bvp::representation::{gamma, gamma_inverse, gamma_inverse_real};
use beam_bvp::spectral::{x_closed, y_matrix};
use nalgebra::{Matrix4, Vector4};
use proptest::prelude::*;

fn mat4(v: &[f64]) -> Mat4 {
    Mat4::from_fn(|i, j| C64::new(v[2 * (4 * i + j)], v[2 * (4 * i + j) + 1]))
}

fn real4(v: &[f64]) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| v[4 * i + j])
}

fn params() -> impl Strategy<Value = BeamParams> {
    (0.3..2.0f64, 0.3..2.0f64, 0.3..3.0f64).prop_map(|(l, a, k)| BeamParams::new(l, a, k).unwrap())
}

fn bc_from(v: &[f64]) -> BoundaryCondition {
    BoundaryCondition::new(ComplexMatrix::from_fn(4, 8, |i, j| C64::new(v[2 * (8 * i + j)], v[2 * (8 * i + j) + 1]))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gamma_round_trip(v in prop::collection::vec(-2.0..2.0f64, 32), p in params()) {
        let g = mat4(&v);
        let back = gamma(&gamma_inverse(&g, &p), &p).unwrap();
        prop_assert!(max_norm(&(back - g)) <= 1e-9 * max_norm(&g).max(1.0));
    }

    #[test]
    fn real_branch_round_trip(v in prop::collection::vec(-2.0..2.0f64, 16), p in params()) {
        let g = real_to_pibar4(&real4(&v));
        let bc = gamma_inverse_real(&g, &p).unwrap();
        prop_assert!(bc.is_real());
        prop_assert!(max_norm(&(gamma(&bc, &p).unwrap() - g)) <= 1e-9 * max_norm(&g).max(1.0));
    }

    #[test]
    fn pibar_real_round_trip(v in prop::collection::vec(-5.0..5.0f64, 16)) {
        let b = real4(&v);
        let a = real_to_pibar4(&b);
        prop_assert!(is_pibar4(&a, 1e-12));
        prop_assert!((pibar_to_real4(&a).unwrap() - b).amax() <= 1e-12 * b.amax().max(1.0));
    }

    #[test]
    fn gamma_ignores_row_operations(v in prop::collection::vec(-1.0..1.0f64, 64), w in prop::collection::vec(-1.0..1.0f64, 32)) {
        let p = BeamParams::default();
        let bc = bc_from(&v);
        let pm = mat4(&w) + Mat4::identity() * C64::new(3.0, 0.0);
        prop_assume!(is_wellposed(&bc, &p, 1e-6));
        let g1 = gamma(&bc, &p).unwrap();
        let g2 = gamma(&bc.left_multiply(&pm), &p).unwrap();
        prop_assert!(max_norm(&(g1 - g2)) <= 1e-8 * max_norm(&g1).max(1.0));
    }

    #[test]
    fn greens_pair_sums_to_omega_l2(v in prop::collection::vec(-1.0..1.0f64, 64), p in params()) {
        let bc = bc_from(&v);
        prop_assume!(is_wellposed(&bc, &p, 1e-6));
        let rep = greens_matrices(&bc, &p).unwrap();
        let sum = rep.g_minus + rep.g_plus;
        prop_assert!(max_norm(&(sum - constants().omega_l2)) <= 1e-9 * max_norm(&rep.g_plus).max(1.0));
    }

    #[test]
    fn chi_round_trip(re in -5.0..5.0f64, im in -5.0..5.0f64, k in 0.2..4.0f64) {
        let lam = C64::new(re, im);
        prop_assume!(lam.norm() > 1e-3 && (lam * k - 1.0).norm() > 1e-6);
        let kap = chi(lam, k).unwrap();
        prop_assert!(kap.arg() >= -1e-15 && kap.arg() < std::f64::consts::FRAC_PI_2 + 1e-15);
        prop_assert!((chi_inverse(kap, k) - lam).norm() <= 1e-9 * lam.norm().max(1.0));
    }

    #[test]
    fn x_rotation_and_conjugation(z in -3.0..3.0f64, r in 0.05..3.0f64, t in 0.0..std::f64::consts::FRAC_PI_2) {
        let kap = C64::from_polar(r, t);
        let c = constants();
        let x = x_closed(z, kap);
        let scale = max_norm(&x).max(1.0);
        prop_assert!(max_norm(&(x_closed(z, IM * kap) - x * c.lmat_inv)) <= 1e-10 * scale);
        prop_assert!(max_norm(&(c.r4 * x.map(|v| v.conj()) * c.r4 - x_closed(z, kap.conj()))) <= 1e-10 * scale);
    }

    #[test]
    fn y_is_pibar_for_real_lambda(lam in prop_oneof![-3.0..-0.05f64, 0.05..0.9f64, 1.1..4.0f64]) {
        let p = BeamParams::default();
        if let Ok(y) = y_matrix(C64::new(lam, 0.0), p.l, &p) {
            prop_assert!(is_pibar4(&y, 1e-9 * max_norm(&y).max(1.0)));
        }
    }

    #[test]
    fn rank_one_inverse_image_solves(v in prop::collection::vec(-1.0..1.0f64, 16), r in prop::collection::vec(-1.0..1.0f64, 4)) {
        let g0 = real4(&v);
        let r = Vector4::from_column_slice(&r);
        prop_assume!((g0 * r).norm() > 1e-6);
        let g = rank_one_inverse_image(&g0, &r).unwrap();
        prop_assert!((g * (g0 * r) - r).norm() <= 1e-12 * r.norm().max(1.0));
    }
}
