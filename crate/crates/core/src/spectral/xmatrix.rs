use crate::error::{Error, Result};
use crate::matrix_kit::{
    constants, exp_eps_omega, omega, powers_diag, sigma_ratio, wronskian_w_inv, BeamParams, Mat2, Mat4, Vec4, C64,
};

use super::basis::{factorial, EigenBasis};

/// Below this σ_min/σ_max the balanced X_λ(x) is treated as singular.
pub const SINGULAR_X_TOL: f64 = 1e-12;

/// X_λ(x) = diag(0,1,1,0)·W(−x)⁻¹W_λ(−x) + diag(1,0,0,1)·W(x)⁻¹W_λ(x), evaluated literally.
pub fn x_direct(basis: &EigenBasis, x: f64) -> Mat4 {
    let c = constants();
    let p = &basis.params;
    c.d0110 * wronskian_w_inv(p, -x) * basis.w_matrix(-x) + c.d1001 * wronskian_w_inv(p, x) * basis.w_matrix(x)
}

/// X(z, κ) = (1/4)e^{−𝓔Ωz}{diag(0,1,1,0)W₀*D_κW₀e^{−Ωκz} + diag(1,0,0,1)W₀*D_κW₀e^{Ωκz}}.
pub fn x_closed(z: f64, kappa: C64) -> Mat4 {
    x_closed_shifted(z, kappa, [0.0; 4])
}

/// Exponents −|Re(ω_jκ)z| of the positive column balance S with X(±z, κ)·S bounded.
pub fn column_shifts(z: f64, kappa: C64) -> [f64; 4] {
    std::array::from_fn(|j| -((omega(j as i32 + 1) * kappa).re * z).abs())
}

/// X(z, κ)·diag(e^{shift_j}), with the shift folded into the exponentials.
pub fn x_closed_shifted(z: f64, kappa: C64, shift: [f64; 4]) -> Mat4 {
    let c = constants();
    let a = c.w0.adjoint() * powers_diag(kappa) * c.w0;
    let e = |sign: f64| {
        Mat4::from_diagonal(&Vec4::from_fn(|j, _| (omega(j as i32 + 1) * kappa * (sign * z) + shift[j]).exp()))
    };
    exp_eps_omega(C64::new(-z, 0.0)) * (c.d0110 * a * e(-1.0) + c.d1001 * a * e(1.0)) * C64::new(0.25, 0.0)
}

/// p_n(z) = Σ_{r=0}^{n} ω₁^{n−r}z^r/r!.
pub fn p_n(n: usize, z: f64) -> C64 {
    let w1 = omega(1);
    (0..=n).map(|r| w1.powi((n - r) as i32) * (z.powi(r as i32) / factorial(r))).sum()
}

/// P(z), the polynomial-branch factor of X_{1/k}.
pub fn p_matrix(z: f64) -> Mat4 {
    let p: [C64; 4] = std::array::from_fn(|n| p_n(n, z));
    let q = p.map(|v| v.conj());
    Mat4::new(
        q[0], q[1], q[2], q[3], //
        p[0], -p[1], p[2], -p[3], //
        q[0], -q[1], q[2], -q[3], //
        p[0], p[1], p[2], p[3],
    )
}

pub fn p_plus(z: f64) -> Mat2 {
    let (p0, p2) = (p_n(0, z), p_n(2, z));
    Mat2::new(p0.conj(), p2.conj(), p0, p2)
}

pub fn p_minus(z: f64) -> Mat2 {
    let (p1, p3) = (p_n(1, z), p_n(3, z));
    Mat2::new(-p1.conj(), -p3.conj(), p1, p3)
}

/// X_{1/k}(x) = (1/4)e^{−𝓔Ωz}P(z)·diag(1,α,α²,α³)⁻¹ with z = αx.
pub fn x_degenerate(z: f64, alpha: f64) -> Mat4 {
    exp_eps_omega(C64::new(-z, 0.0)) * p_matrix(z) * powers_diag(C64::new(1.0 / alpha, 0.0)) * C64::new(0.25, 0.0)
}

/// X_λ(x) through the branch-specialized closed forms.
pub fn x_matrix(lambda: C64, x: f64, params: &BeamParams) -> Result<Mat4> {
    let basis = EigenBasis::new(lambda, params)?;
    Ok(x_for_basis(&basis, x))
}

pub(crate) fn x_for_basis(basis: &EigenBasis, x: f64) -> Mat4 {
    let z = basis.params.alpha * x;
    match basis.kappa() {
        Some(kap) => x_closed(z, kap),
        None => x_degenerate(z, basis.params.alpha),
    }
}

/// (X_λ(x)·S, X_λ(−x)·S) with a positive diagonal S that keeps both bounded.
pub(crate) fn x_pair_balanced(basis: &EigenBasis, x: f64) -> (Mat4, Mat4) {
    let z = basis.params.alpha * x;
    match basis.kappa() {
        Some(kap) => {
            let shift = column_shifts(z, kap);
            (x_closed_shifted(z, kap, shift), x_closed_shifted(-z, kap, shift))
        }
        None => (x_degenerate(z, basis.params.alpha), x_degenerate(-z, basis.params.alpha)),
    }
}

/// Y_λ(x) = X_λ(−x)X_λ(x)⁻¹ − I.
pub fn y_matrix(lambda: C64, x: f64, params: &BeamParams) -> Result<Mat4> {
    let basis = EigenBasis::new(lambda, params)?;
    y_for_basis(&basis, x)
}

pub(crate) fn y_for_basis(basis: &EigenBasis, x: f64) -> Result<Mat4> {
    let (xp, xm) = x_pair_balanced(basis, x);
    let ratio = sigma_ratio(&xp);
    if ratio < SINGULAR_X_TOL {
        return Err(Error::SingularX { ratio });
    }
    // Y = X(−x)X(x)⁻¹ − I, computed as the solution of Xᵀ(x)·Zᵀ = Xᵀ(−x).
    let zt = xp.transpose().lu().solve(&xm.transpose()).ok_or(Error::SingularX { ratio })?;
    Ok(zt.transpose() - Mat4::identity())
}

/// X_λ(±l) and, when X_λ(l) is invertible, Y_λ(l).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenMatrix {
    pub lambda: C64,
    pub x_at_l: Mat4,
    pub x_at_minus_l: Mat4,
    pub y: Option<Mat4>,
}

pub fn eigen_matrix(lambda: C64, params: &BeamParams) -> Result<EigenMatrix> {
    let basis = EigenBasis::new(lambda, params)?;
    Ok(EigenMatrix {
        lambda,
        x_at_l: x_for_basis(&basis, params.l),
        x_at_minus_l: x_for_basis(&basis, -params.l),
        y: y_for_basis(&basis, params.l).ok(),
    })
}
