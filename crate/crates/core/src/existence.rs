//! Real boundary conditions realizing a prescribed real eigenvalue.

use nalgebra::{Matrix4, Vector4};

use crate::boundary::BoundaryCondition;
use crate::error::{Error, Result};
use crate::matrix_kit::{pibar_to_real4, real_to_pibar4, sigma_ratio, BeamParams, Mat4, C64, ZERO};
use crate::representation::gamma_inverse_real;
use crate::spectral::{spectral_point_at, EigenBasis, SpectralPoint};

/// Below this σ_min/σ_max of X_λ(l), λ is treated as an eigenvalue for Q.
pub const SPEC_Q_GUARD: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct Construction {
    pub bc: BoundaryCondition,
    pub point: SpectralPoint,
    /// G = Γ(bc), in π̄(4).
    pub g: Mat4,
    pub y: Mat4,
    /// The standard basis vector used to seed the rank-one map.
    pub r: Vector4<f64>,
    /// σ_min/σ_max of G·Y_λ(l) − I.
    pub residual: f64,
}

/// Ĝ = r(Ĝ₀r)ᵀ/‖Ĝ₀r‖², the minimal-norm solution of Ĝ(Ĝ₀r) = r.
pub fn rank_one_inverse_image(g0hat: &Matrix4<f64>, r: &Vector4<f64>) -> Result<Matrix4<f64>> {
    let image = g0hat * r;
    let norm = image.norm();
    if norm < 1e-12 * g0hat.norm() * r.norm() || norm == 0.0 {
        return Err(Error::ZeroImage { norm });
    }
    Ok(r * image.transpose() / (norm * norm))
}

/// A real well-posed M with λ in the spectrum of its Green's operator.
pub fn construct_bc_for_eigenvalue(lambda: f64, params: &BeamParams) -> Result<Construction> {
    if lambda == 0.0 {
        return Err(Error::ZeroLambda);
    }
    if !lambda.is_finite() {
        return Err(Error::Input(format!("lambda = {lambda}")));
    }
    let lam = C64::new(lambda, 0.0);
    let basis = EigenBasis::new(lam, params)?;
    let (xp, _) = crate::spectral::x_pair_balanced(&basis, params.l);
    let ratio = sigma_ratio(&xp);
    if ratio < SPEC_Q_GUARD {
        return Err(Error::InSpecQ { lambda, ratio });
    }
    let y = crate::spectral::y_for_basis(&basis, params.l)?;
    let g0hat = pibar_to_real4(&y)?;
    let cutoff = 1e-8 * g0hat.norm();
    let r = (0..4)
        .map(|i| Vector4::from_fn(|j, _| if i == j { 1.0 } else { 0.0 }))
        .find(|r: &Vector4<f64>| (g0hat * r).norm() >= cutoff && (g0hat * r).norm() > 0.0)
        .ok_or(Error::ZeroImage { norm: g0hat.norm() })?;
    let ghat = rank_one_inverse_image(&g0hat, &r)?;
    let g = real_to_pibar4(&ghat);
    let bc = gamma_inverse_real(&g, params)?.with_name(format!("constructed(lambda={lambda})"));
    let residual = sigma_ratio_or_zero(&(g * y - Mat4::identity()));
    let point = spectral_point_at(&bc, params, lam)?;
    Ok(Construction { bc, point, g, y, r, residual })
}

fn sigma_ratio_or_zero(m: &Mat4) -> f64 {
    if m.iter().all(|z| *z == ZERO) {
        0.0
    } else {
        sigma_ratio(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::is_wellposed;
    use crate::matrix_kit::{is_pibar4, max_norm};
    use crate::representation::gamma;
    use rand::{Rng, SeedableRng};

    #[test]
    fn identity_and_e1() {
        let r = Vector4::new(1.0, 0.0, 0.0, 0.0);
        let g = rank_one_inverse_image(&Matrix4::identity(), &r).unwrap();
        assert_eq!(g, r * r.transpose());
    }

    #[test]
    fn random_rank_one() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(81);
        for _ in 0..100 {
            let g0 = Matrix4::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            let r = Vector4::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            let g = rank_one_inverse_image(&g0, &r).unwrap();
            assert!((g * (g0 * r) - r).norm() <= 1e-12);
        }
    }

    #[test]
    fn zero_image() {
        let r = Vector4::new(0.0, 1.0, 0.0, 0.0);
        assert!(matches!(rank_one_inverse_image(&Matrix4::zeros(), &r), Err(Error::ZeroImage { .. })));
    }

    #[test]
    fn constructed_bc_has_the_eigenvalue() {
        let p = BeamParams::default();
        for lambda in [2.0, -1.0, 3.0, 0.3, 1.0] {
            let c = construct_bc_for_eigenvalue(lambda, &p).unwrap();
            assert!(c.bc.is_real());
            assert!(is_wellposed(&c.bc, &p, 1e-10));
            assert!(is_pibar4(&c.g, 1e-12));
            assert!(c.residual <= 1e-8, "{lambda}: {}", c.residual);
            assert!(c.point.residual <= 1e-8, "{lambda}: {}", c.point.residual);
            assert!(max_norm(&(gamma(&c.bc, &p).unwrap() - c.g)) <= 1e-9);
        }
    }

    #[test]
    fn rejects_q_eigenvalues_and_zero() {
        let p = BeamParams::default();
        let mu1 = crate::spectral::spec_q(&p, 1).unwrap().mu[0];
        assert!(matches!(construct_bc_for_eigenvalue(mu1, &p), Err(Error::InSpecQ { .. })));
        assert!(matches!(construct_bc_for_eigenvalue(0.0, &p), Err(Error::ZeroLambda)));
    }
}
