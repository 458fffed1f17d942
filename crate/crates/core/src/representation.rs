//! The representation Γ of equivalence classes of well-posed boundary
//! conditions by 4×4 matrices, and its constructive inverses.

use crate::boundary::{greens_matrices, require_wellposed, BoundaryCondition, GreensRep};
use crate::error::{Error, Result};
use crate::matrix_kit::{
    constants, max_norm, pibar_defect4, wronskian_w_inv, BeamParams, Mat4, Vec4, IDENTITY_TOL,
};

/// Γ(M) = M̃⁻¹M⁺W(l)𝓔 − diag(1, 0, 0, 1).
pub fn gamma(bc: &BoundaryCondition, params: &BeamParams) -> Result<Mat4> {
    let td = require_wellposed(bc, params)?;
    let c = constants();
    let sol = td.tilde.lu().solve(&td.tilde_plus).ok_or(Error::NotWellPosed { relative_det: 0.0 })?;
    Ok(sol * c.eps - c.d1001)
}

/// Γ(M) = (G_M⁺ − G_Q⁺)(ΩL²)⁻¹𝓔, with G_Q⁺ = diag(1, 0, 0, 1)·ΩL².
pub fn gamma_from_greens(rep: &GreensRep) -> Mat4 {
    let c = constants();
    (rep.g_plus - c.d1001 * c.omega_l2) * c.omega_l2_inv * c.eps
}

/// Green's matrices together with Γ(M).
pub fn greens_rep(bc: &BoundaryCondition, params: &BeamParams) -> Result<GreensRep> {
    let mut rep = greens_matrices(bc, params)?;
    rep.g_gamma = Some(gamma(bc, params)?);
    Ok(rep)
}

/// (Γ⁻(M), Γ⁺(M)) = (G_M⁻, G_M⁺).
pub fn gamma_pm(bc: &BoundaryCondition, params: &BeamParams) -> Result<(Mat4, Mat4)> {
    let rep = greens_matrices(bc, params)?;
    Ok((rep.g_minus, rep.g_plus))
}

/// [{diag(0,1,1,0) − G𝓔}W(−l)⁻¹ | {diag(1,0,0,1) + G𝓔}W(l)⁻¹], whose M̃ is the identity.
pub fn gamma_inverse(g: &Mat4, params: &BeamParams) -> BoundaryCondition {
    let c = constants();
    let ge = g * c.eps;
    let minus = (c.d0110 - ge) * wronskian_w_inv(params, -params.l);
    let plus = (c.d1001 + ge) * wronskian_w_inv(params, params.l);
    BoundaryCondition::from_blocks(&minus, &plus)
}

/// A real representative U·Γ⁻¹(G) for G ∈ π̄(4).
pub fn gamma_inverse_real(g: &Mat4, params: &BeamParams) -> Result<BoundaryCondition> {
    let defect = pibar_defect4(g);
    if defect > IDENTITY_TOL * max_norm(g).max(1.0) {
        return Err(Error::NotInPibar { defect });
    }
    let m = gamma_inverse(g, params).left_multiply(&constants().u4);
    let tol = IDENTITY_TOL * max_norm(m.matrix());
    m.into_real(tol)
}

fn check_pair(g_minus: &Mat4, g_plus: &Mat4) -> Result<()> {
    let ol2 = constants().omega_l2;
    let err = max_norm(&(g_minus + g_plus - ol2));
    if err > IDENTITY_TOL * max_norm(g_plus).max(1.0) {
        return Err(Error::Input(format!("G- + G+ differs from Omega L^2 by {err:e}")));
    }
    Ok(())
}

/// M^± = G^±(ΩL²)⁻¹W(±l)⁻¹ for a pair with G⁻ + G⁺ = ΩL².
pub fn from_greens_pair(g_minus: &Mat4, g_plus: &Mat4, params: &BeamParams) -> Result<BoundaryCondition> {
    check_pair(g_minus, g_plus)?;
    let c = constants();
    let minus = g_minus * c.omega_l2_inv * wronskian_w_inv(params, -params.l);
    let plus = g_plus * c.omega_l2_inv * wronskian_w_inv(params, params.l);
    Ok(BoundaryCondition::from_blocks(&minus, &plus))
}

/// U·G^±(ΩL²)⁻¹W(±l)⁻¹, real when G^± ∈ π̄(4).
pub fn real_from_greens_pair(g_minus: &Mat4, g_plus: &Mat4, params: &BeamParams) -> Result<BoundaryCondition> {
    for g in [g_minus, g_plus] {
        let defect = pibar_defect4(g);
        if defect > IDENTITY_TOL * max_norm(g).max(1.0) {
            return Err(Error::NotInPibar { defect });
        }
    }
    let m = from_greens_pair(g_minus, g_plus, params)?.left_multiply(&constants().u4);
    let tol = IDENTITY_TOL * max_norm(m.matrix());
    m.into_real(tol)
}

/// G𝓔{W(l)⁻¹𝓑⁺ − W(−l)⁻¹𝓑⁻} + diag(0,1,1,0)W(−l)⁻¹𝓑⁻ + diag(1,0,0,1)W(l)⁻¹𝓑⁺,
/// which vanishes exactly when the trace satisfies the condition Γ⁻¹(G).
pub fn boundary_form(g: &Mat4, params: &BeamParams, b_minus: &Vec4, b_plus: &Vec4) -> Vec4 {
    let c = constants();
    let left = wronskian_w_inv(params, -params.l) * b_minus;
    let right = wronskian_w_inv(params, params.l) * b_plus;
    g * c.eps * (right - left) + c.d0110 * left + c.d1001 * right
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{equivalent, is_wellposed, named_bc, random_invertible, random_wellposed, NamedBc, WELLPOSED_TOL};
    use crate::matrix_kit::{is_pibar4, real_to_pibar4, C64, IM};
    use rand::{Rng, SeedableRng};

    fn random_complex(rng: &mut impl Rng) -> Mat4 {
        Mat4::from_fn(|_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn gamma_of_q_vanishes() {
        for p in [BeamParams::default(), BeamParams::new(0.4, 2.5, 3.0).unwrap()] {
            let g = gamma(&named_bc(NamedBc::Q, &p), &p).unwrap();
            assert!(max_norm(&g) < 1e-10);
        }
    }

    #[test]
    fn clamped_fixture() {
        let p = BeamParams::default();
        let g = gamma(&named_bc(NamedBc::Clamped, &p), &p).unwrap();
        #[rustfmt::skip]
        let expected = Mat4::new(
            C64::new(2.61146999448179873e-01, 2.78163387690555826e-02), C64::new(-3.49441164927938641e-01, -3.49441164927938919e-01), C64::new(-3.88531846721787477e-01, -5.44931463619796122e-02), C64::new(1.78374244697141471e-01, 1.78374244697141887e-01),
            C64::new(-3.49441164927939085e-01, 3.49441164927938530e-01), C64::new(2.61146999448179984e-01, -2.78163387690550483e-02), C64::new(1.78374244697141859e-01, -1.78374244697141499e-01), C64::new(-3.88531846721787755e-01, 5.44931463619791681e-02),
            C64::new(-3.88531846721787422e-01, -5.44931463619797579e-02), C64::new(1.78374244697141471e-01, 1.78374244697141776e-01), C64::new(2.61146999448179928e-01, 2.78163387690555444e-02), C64::new(-3.49441164927938697e-01, -3.49441164927939196e-01),
            C64::new(1.78374244697141970e-01, -1.78374244697141277e-01), C64::new(-3.88531846721787477e-01, 5.44931463619790363e-02), C64::new(-3.49441164927939030e-01, 3.49441164927938530e-01), C64::new(2.61146999448180095e-01, -2.78163387690549442e-02),
        );
        assert!(max_norm(&(g - expected)) < 1e-12);
        assert!(is_pibar4(&g, 1e-12));
    }

    #[test]
    fn both_formulas_agree_and_respect_equivalence() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(41);
        let p = BeamParams::new(1.1, 0.9, 1.7).unwrap();
        for _ in 0..100 {
            let bc = random_wellposed(&mut rng, &p, false);
            let direct = gamma(&bc, &p).unwrap();
            let via = gamma_from_greens(&greens_matrices(&bc, &p).unwrap());
            let scale = max_norm(&direct).max(1.0);
            assert!(max_norm(&(direct - via)) <= 1e-10 * scale);
            let moved = gamma(&bc.left_multiply(&random_invertible(&mut rng, false)), &p).unwrap();
            assert!(max_norm(&(direct - moved)) <= 1e-9 * scale);
        }
    }

    #[test]
    fn inverse_round_trips() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(42);
        let p = BeamParams::default();
        for _ in 0..100 {
            let g = random_complex(&mut rng);
            let bc = gamma_inverse(&g, &p);
            assert!(is_wellposed(&bc, &p, WELLPOSED_TOL));
            assert!(max_norm(&(gamma(&bc, &p).unwrap() - g)) <= 1e-9);
        }
        let q_like = gamma_inverse(&Mat4::zeros(), &p);
        assert!(equivalent(&q_like, &named_bc(NamedBc::Q, &p), &p, 1e-10).unwrap());
        let clamped = named_bc(NamedBc::Clamped, &p);
        let back = gamma_inverse(&gamma(&clamped, &p).unwrap(), &p);
        assert!(equivalent(&back, &clamped, &p, 1e-9).unwrap());
    }

    #[test]
    fn real_inverse() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(43);
        let p = BeamParams::default();
        let q_real = gamma_inverse_real(&Mat4::zeros(), &p).unwrap();
        assert!(q_real.is_real());
        assert!(equivalent(&q_real, &named_bc(NamedBc::Q, &p), &p, 1e-10).unwrap());
        let eps = constants().eps;
        let e = gamma_inverse_real(&eps, &p).unwrap();
        assert!(e.is_real() && is_wellposed(&e, &p, WELLPOSED_TOL));
        assert!(max_norm(&(gamma(&e, &p).unwrap() - eps)) <= 1e-9);
        for _ in 0..100 {
            let b = nalgebra::Matrix4::<f64>::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            let g = real_to_pibar4(&b);
            let bc = gamma_inverse_real(&g, &p).unwrap();
            assert!(bc.is_real());
            assert!(max_norm(&(gamma(&bc, &p).unwrap() - g)) <= 1e-9);
        }
        assert!(matches!(gamma_inverse_real(&(Mat4::identity() * IM), &p), Err(Error::NotInPibar { .. })));
    }

    #[test]
    fn real_conditions_map_into_pibar() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(44);
        let p = BeamParams::default();
        for _ in 0..100 {
            let bc = random_wellposed(&mut rng, &p, true);
            assert!(is_pibar4(&gamma(&bc, &p).unwrap(), 1e-9));
        }
    }

    #[test]
    fn greens_pair_construction() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(45);
        let p = BeamParams::new(0.7, 1.6, 1.0).unwrap();
        let (gm, gp) = gamma_pm(&named_bc(NamedBc::Q, &p), &p).unwrap();
        assert!(max_norm(&(gm + gp - constants().omega_l2)) < 1e-10);
        for _ in 0..50 {
            let bc = random_wellposed(&mut rng, &p, false);
            let (gm, gp) = gamma_pm(&bc, &p).unwrap();
            let rebuilt = from_greens_pair(&gm, &gp, &p).unwrap();
            let td = crate::boundary::tilde(&rebuilt, &p);
            assert!(max_norm(&(td.tilde - Mat4::identity())) < 1e-9);
            let (gm2, gp2) = gamma_pm(&rebuilt, &p).unwrap();
            assert!(max_norm(&(gm2 - gm)) < 1e-9 && max_norm(&(gp2 - gp)) < 1e-9);
            let real_bc = random_wellposed(&mut rng, &p, true);
            let (rm, rp) = gamma_pm(&real_bc, &p).unwrap();
            let r = real_from_greens_pair(&rm, &rp, &p).unwrap();
            assert!(r.is_real() && equivalent(&r, &real_bc, &p, 1e-9).unwrap());
        }
        assert!(from_greens_pair(&Mat4::zeros(), &Mat4::zeros(), &p).is_err());
    }

    #[test]
    fn greens_rep_carries_gamma() {
        let p = BeamParams::default();
        let rep = greens_rep(&named_bc(NamedBc::Hinged, &p), &p).unwrap();
        let g = rep.g_gamma.unwrap();
        assert!(max_norm(&(g - gamma_from_greens(&rep))) < 1e-10);
    }
}
