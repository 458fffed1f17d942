use nalgebra::SVD;

use crate::boundary::BoundaryCondition;
use crate::error::Result;
use crate::matrix_kit::{constants, BeamParams, Mat4, Vec4, C64};
use crate::representation::gamma;

use super::basis::EigenBasis;
use super::xmatrix::{x_for_basis, x_pair_balanced, y_for_basis};

/// G(X(l) − X(−l)) + X(l).
pub fn char_matrix(g: &Mat4, x_plus: &Mat4, x_minus: &Mat4) -> Mat4 {
    g * (x_plus - x_minus) + x_plus
}

/// det[G_M{X_λ(l) − X_λ(−l)} + X_λ(l)], unscaled.
pub fn char_det(bc: &BoundaryCondition, params: &BeamParams, lambda: C64) -> Result<C64> {
    let g = gamma(bc, params)?;
    let basis = EigenBasis::new(lambda, params)?;
    let xp = x_for_basis(&basis, params.l);
    let xm = x_for_basis(&basis, -params.l);
    Ok(char_matrix(&g, &xp, &xm).determinant())
}

/// det(G_M·Y_λ(l) − I).
pub fn char_det_y(bc: &BoundaryCondition, params: &BeamParams, lambda: C64) -> Result<C64> {
    let g = gamma(bc, params)?;
    let basis = EigenBasis::new(lambda, params)?;
    let y = y_for_basis(&basis, params.l)?;
    Ok((g * y - Mat4::identity()).determinant())
}

/// The characteristic matrix at one λ in scale-free form.
///
/// `det` is D(λ) = det C·ΠS_j/(α⁶κ⁶·det W₀) on the exponential branch and det C
/// at λ = 1/k. D/ΠS_j is analytic in λ; D itself is continuous through 1/k,
/// shares the sign of D/ΠS_j and is real for real conditions and real λ.
///
/// `matrix` is C·B/(‖G‖+1) with each column divided by the norm of the matching
/// column of the stacked (X(l), X(−l))·B. B is the balance S for |κ|αl > 1 and
/// T⁻¹ otherwise.
#[derive(Debug, Clone)]
pub struct CharEval {
    pub lambda: C64,
    pub det: C64,
    pub matrix: Mat4,
    transform: Mat4,
    pub singular_values: [f64; 4],
}

impl CharEval {
    /// σ_min/σ_max of the normalized matrix.
    pub fn residual(&self) -> f64 {
        let s = self.singular_values;
        if s[0] == 0.0 {
            0.0
        } else {
            s[3] / s[0]
        }
    }

    /// Number of singular values at or below `tol`·σ_max.
    pub fn multiplicity(&self, tol: f64) -> usize {
        self.singular_values.iter().filter(|&&s| s <= tol * self.singular_values[0]).count()
    }

    /// Unit coefficient vector c in the y_λ basis for the smallest singular direction.
    pub fn null_vector(&self) -> Vec4 {
        let svd = SVD::new(self.matrix, false, true);
        let v_t = svd.v_t.expect("requested right singular vectors");
        let (imin, _) = svd.singular_values.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, &s)| {
            if s < acc.1 {
                (i, s)
            } else {
                acc
            }
        });
        let v = v_t.row(imin).adjoint();
        let c = self.transform * v;
        normalize_phase(c / C64::new(c.norm(), 0.0))
    }
}

/// Rotate so the largest entry is real and positive.
fn normalize_phase(c: Vec4) -> Vec4 {
    let big = c.iter().copied().fold(C64::new(0.0, 0.0), |acc, z| if z.norm() > acc.norm() { z } else { acc });
    if big.norm() == 0.0 {
        c
    } else {
        c * (big.conj() / big.norm())
    }
}

pub fn char_eval(g: &Mat4, basis: &EigenBasis) -> CharEval {
    let p = &basis.params;
    let (xp, xm, det, mut transform) = match basis.kappa() {
        Some(kap) => {
            let (xp, xm) = x_pair_balanced(basis, p.l);
            let norm = C64::new(p.alpha.powi(6), 0.0) * kap.powi(6) * constants().w0.determinant();
            let det = char_matrix(g, &xp, &xm).determinant() / norm;
            if kap.norm() * p.alpha * p.l > 1.0 {
                let shift = super::xmatrix::column_shifts(p.alpha * p.l, kap);
                let s = Mat4::from_diagonal(&Vec4::from_fn(|j, _| C64::new(shift[j].exp(), 0.0)));
                (xp, xm, det, s)
            } else {
                let t_inv = basis.taylor_transform().try_inverse().unwrap_or_else(Mat4::identity);
                (x_for_basis(basis, p.l) * t_inv, x_for_basis(basis, -p.l) * t_inv, det, t_inv)
            }
        }
        None => {
            let xp = x_for_basis(basis, p.l);
            let xm = x_for_basis(basis, -p.l);
            let det = char_matrix(g, &xp, &xm).determinant();
            (xp, xm, det, Mat4::identity())
        }
    };
    let mut matrix = char_matrix(g, &xp, &xm);
    for j in 0..4 {
        let n = (xp.column(j).norm_squared() + xm.column(j).norm_squared()).sqrt();
        if n > 0.0 {
            matrix.column_mut(j).unscale_mut(n);
            transform.column_mut(j).unscale_mut(n);
        }
    }
    let scale = (g.norm() + 1.0).recip();
    matrix *= C64::new(scale, 0.0);
    let sv = SVD::new(matrix, false, false).singular_values;
    let mut singular_values = [sv[0], sv[1], sv[2], sv[3]];
    singular_values.sort_by(|a, b| b.total_cmp(a));
    CharEval { lambda: basis.lambda, det, matrix, transform, singular_values }
}
