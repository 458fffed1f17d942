//! Structured constant matrices, the Wronskian of the beam operator, the
//! conjugate-persymmetric algebra π̄(n) and the spectral parameter χ.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::OnceLock;

use nalgebra::{DMatrix, Matrix2, Matrix4, Vector4, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat4 = Matrix4<C64>;
pub type Vec4 = Vector4<C64>;
pub type Mat2 = Matrix2<C64>;
pub type ComplexMatrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const IM: C64 = C64::new(0.0, 1.0);

/// Default tolerance for exact algebraic identities evaluated in floating point.
pub const IDENTITY_TOL: f64 = 1e-10;

/// Relative distance of λk from 1 below which λ is treated as exactly 1/k.
pub const DEGENERATE_TOL: f64 = 1e-12;

/// ω_j = e^{iπ(2j−1)/4}, extended periodically to every integer j.
pub fn omega(j: i32) -> C64 {
    let s = FRAC_1_SQRT_2;
    match j.rem_euclid(4) {
        1 => C64::new(s, s),
        2 => C64::new(-s, s),
        3 => C64::new(-s, -s),
        _ => C64::new(s, -s),
    }
}

/// ε_j = ±1 with Re ω_j = ε_j/√2.
pub fn epsilon(j: i32) -> f64 {
    match j.rem_euclid(4) {
        1 | 0 => 1.0,
        _ => -1.0,
    }
}

/// Physical constants of the beam: half-length `l`, stiffness ratio `alpha` and
/// foundation spring density `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamParams {
    pub l: f64,
    pub alpha: f64,
    pub k: f64,
}

impl Default for BeamParams {
    fn default() -> Self {
        Self { l: 1.0, alpha: 1.0, k: 1.0 }
    }
}

impl BeamParams {
    pub fn new(l: f64, alpha: f64, k: f64) -> Result<Self> {
        let p = Self { l, alpha, k };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("l", self.l), ("alpha", self.alpha), ("k", self.k)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be finite and positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Intrinsic length L = 2lα.
    pub fn intrinsic_length(&self) -> f64 {
        2.0 * self.l * self.alpha
    }
}

/// The constant matrices shared by every other module.
#[derive(Debug, Clone)]
pub struct StructuredConstants {
    pub omega: [C64; 4],
    /// Ω = diag(ω₁, …, ω₄).
    pub big_omega: Mat4,
    /// W₀ = (ω_j^{i−1}).
    pub w0: Mat4,
    pub w0_inv: Mat4,
    pub r4: Mat4,
    pub r8: ComplexMatrix,
    /// Cyclic shift L.
    pub lmat: Mat4,
    pub lmat_inv: Mat4,
    pub l2: Mat4,
    /// 𝓔 = diag(1, −1, −1, 1).
    pub eps: Mat4,
    pub omega_l2: Mat4,
    pub omega_l2_inv: Mat4,
    pub u4: Mat4,
    pub v: Mat4,
    pub v_hat: Mat4,
    /// diag(0, 1, 1, 0)
    pub d0110: Mat4,
    /// diag(1, 0, 0, 1)
    pub d1001: Mat4,
}

pub fn build_constants() -> StructuredConstants {
    let om = [omega(1), omega(2), omega(3), omega(4)];
    let big_omega = Mat4::from_diagonal(&Vec4::from(om));
    let w0 = Mat4::from_fn(|i, j| om[j].powi(i as i32));
    let w0_inv = w0.adjoint().unscale(4.0);
    let r4 = reversal4();
    let lmat = Mat4::from_fn(|i, j| if j == (i + 1) % 4 { ONE } else { ZERO });
    let lmat_inv = lmat.transpose();
    let l2 = lmat * lmat;
    let eps = diag4([1.0, -1.0, -1.0, 1.0]);
    let omega_l2 = big_omega * l2;
    // (ΩL²)⁻¹ = L²Ω⁻¹ and Ω⁻¹ = conj(Ω).
    let omega_l2_inv = l2 * big_omega.map(|z| z.conj());
    let u4 = to_mat4(&u2n(2));
    let s = FRAC_1_SQRT_2;
    let v = Mat4::from_row_slice(&[
        s, 0.0, s, 0.0, //
        0.0, s, 0.0, s, //
        -s, 0.0, s, 0.0, //
        0.0, -s, 0.0, s,
    ].map(|x| C64::new(x, 0.0)));
    let v_hat = Mat4::from_row_slice(&[
        1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 1.0, 0.0, //
        0.0, 1.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0,
    ].map(|x| C64::new(x, 0.0)));
    StructuredConstants {
        omega: om,
        big_omega,
        w0,
        w0_inv,
        r4,
        r8: reversal(8),
        lmat,
        lmat_inv,
        l2,
        eps,
        omega_l2,
        omega_l2_inv,
        u4,
        v,
        v_hat,
        d0110: diag4([0.0, 1.0, 1.0, 0.0]),
        d1001: diag4([1.0, 0.0, 0.0, 1.0]),
    }
}

/// Process-wide immutable copy of [`build_constants`].
pub fn constants() -> &'static StructuredConstants {
    static CELL: OnceLock<StructuredConstants> = OnceLock::new();
    CELL.get_or_init(build_constants)
}

pub fn diag4(d: [f64; 4]) -> Mat4 {
    Mat4::from_diagonal(&Vec4::from(d.map(|x| C64::new(x, 0.0))))
}

/// diag(1, s, s², s³)
pub fn powers_diag(s: C64) -> Mat4 {
    Mat4::from_diagonal(&Vec4::new(ONE, s, s * s, s * s * s))
}

/// e^{Ωs} = diag(e^{ω_j s}).
pub fn exp_omega(s: C64) -> Mat4 {
    Mat4::from_diagonal(&Vec4::from_fn(|j, _| (omega(j as i32 + 1) * s).exp()))
}

/// e^{𝓔Ωz} = diag(e^{ε_j ω_j z}).
pub fn exp_eps_omega(z: C64) -> Mat4 {
    Mat4::from_diagonal(&Vec4::from_fn(|j, _| {
        let jj = j as i32 + 1;
        (omega(jj) * epsilon(jj) * z).exp()
    }))
}

fn reversal4() -> Mat4 {
    Mat4::from_fn(|i, j| if i + j == 3 { ONE } else { ZERO })
}

/// n×n reversal matrix (ones on the anti-diagonal).
pub fn reversal(n: usize) -> ComplexMatrix {
    DMatrix::from_fn(n, n, |i, j| if i + j + 1 == n { ONE } else { ZERO })
}

/// U_{2n} = (1/√2)·[[I_n, R_n], [iR_n, −iI_n]].
pub fn u2n(n: usize) -> ComplexMatrix {
    let s = FRAC_1_SQRT_2;
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, bj) = (i / n, j / n);
        let (ii, jj) = (i % n, j % n);
        let diag = ii == jj;
        let anti = ii + jj + 1 == n;
        let v = match (bi, bj) {
            (0, 0) if diag => ONE,
            (0, 1) if anti => ONE,
            (1, 0) if anti => IM,
            (1, 1) if diag => -IM,
            _ => ZERO,
        };
        v * s
    })
}

pub fn to_mat4(m: &ComplexMatrix) -> Mat4 {
    assert_eq!(m.shape(), (4, 4), "expected a 4x4 matrix");
    Mat4::from_fn(|i, j| m[(i, j)])
}

pub fn to_dyn(m: &Mat4) -> ComplexMatrix {
    DMatrix::from_fn(4, 4, |i, j| m[(i, j)])
}

pub fn max_norm<R, C, S>(m: &nalgebra::Matrix<C64, R, C, S>) -> f64
where
    R: nalgebra::Dim,
    C: nalgebra::Dim,
    S: nalgebra::RawStorage<C64, R, C>,
{
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// σ_min/σ_max of a 4×4 matrix; 0 for the zero matrix.
pub fn sigma_ratio(m: &Mat4) -> f64 {
    let sv = SVD::new(*m, false, false).singular_values;
    let max = sv.max();
    if max == 0.0 {
        0.0
    } else {
        sv.min() / max
    }
}

/// W(x) = diag(1, α, α², α³)·W₀·e^{Ωαx}; entry (i, j) is (ω_jα)^{i−1}e^{ω_jαx}.
pub fn wronskian_w(params: &BeamParams, x: f64) -> Mat4 {
    exp_basis_matrix(C64::new(params.alpha, 0.0), x)
}

/// W(x)⁻¹ = (1/4)·e^{−Ωαx}·W₀*·diag(1, α, α², α³)⁻¹.
pub fn wronskian_w_inv(params: &BeamParams, x: f64) -> Mat4 {
    let a = params.alpha;
    let c = constants();
    exp_omega(C64::new(-a * x, 0.0)) * c.w0_inv * powers_diag(C64::new(1.0 / a, 0.0))
}

/// The matrix with entries (ω_j s)^{i−1}e^{ω_j s x}: the Wronskian of the
/// exponential solutions e^{ω_j s x}.
pub fn exp_basis_matrix(s: C64, x: f64) -> Mat4 {
    Mat4::from_fn(|i, j| {
        let r = omega(j as i32 + 1) * s;
        r.powi(i as i32) * (r * x).exp()
    })
}

/// The vector y(x) = (e^{ω_j αx})_j.
pub fn y_vector(params: &BeamParams, x: f64) -> Vec4 {
    Vec4::from_fn(|j, _| (omega(j as i32 + 1) * params.alpha * x).exp())
}

/// ‖R·conj(A)·R − A‖_max for a square matrix of even order.
pub fn pibar_defect(a: &ComplexMatrix) -> f64 {
    let r = reversal(a.nrows());
    let image = &r * a.map(|z| z.conj()) * &r;
    max_norm(&(image - a))
}

pub fn pibar_defect4(a: &Mat4) -> f64 {
    let r = constants().r4;
    max_norm(&(r * a.map(|z| z.conj()) * r - a))
}

pub fn is_pibar(a: &ComplexMatrix, tol: f64) -> bool {
    a.is_square() && a.nrows().is_multiple_of(2) && pibar_defect(a) <= tol
}

pub fn is_pibar4(a: &Mat4, tol: f64) -> bool {
    pibar_defect4(a) <= tol
}

/// conj(U_{2n})·A·U_{2n}ᵀ, which is real exactly when A ∈ π̄(2n).
pub fn pibar_to_real(a: &ComplexMatrix) -> Result<DMatrix<f64>> {
    let n2 = a.nrows();
    if !a.is_square() || !n2.is_multiple_of(2) {
        return Err(Error::Shape { expected: "square matrix of even order".into(), got: format!("{}x{}", n2, a.ncols()) });
    }
    let scale = max_norm(a).max(1.0);
    let defect = pibar_defect(a);
    if defect > 1e-10 * scale {
        return Err(Error::NotInPibar { defect });
    }
    let u = u2n(n2 / 2);
    let b = u.map(|z| z.conj()) * a * u.transpose();
    let leak = b.iter().fold(0.0f64, |acc, z| acc.max(z.im.abs()));
    if leak > 1e-10 * scale {
        return Err(Error::Consistency(format!("real image has imaginary part {leak:e}")));
    }
    Ok(b.map(|z| z.re))
}

/// U_{2n}ᵀ·B·conj(U_{2n}), the inverse of [`pibar_to_real`].
pub fn real_to_pibar(b: &DMatrix<f64>) -> Result<ComplexMatrix> {
    let n2 = b.nrows();
    if !b.is_square() || !n2.is_multiple_of(2) {
        return Err(Error::Shape { expected: "square matrix of even order".into(), got: format!("{}x{}", n2, b.ncols()) });
    }
    let u = u2n(n2 / 2);
    Ok(u.transpose() * b.map(|x| C64::new(x, 0.0)) * u.map(|z| z.conj()))
}

pub fn pibar_to_real4(a: &Mat4) -> Result<nalgebra::Matrix4<f64>> {
    let b = pibar_to_real(&to_dyn(a))?;
    Ok(nalgebra::Matrix4::from_fn(|i, j| b[(i, j)]))
}

pub fn real_to_pibar4(b: &nalgebra::Matrix4<f64>) -> Mat4 {
    let u = constants().u4;
    u.transpose() * b.map(|x| C64::new(x, 0.0)) * u.map(|z| z.conj())
}

pub fn is_degenerate_lambda(lambda: C64, k: f64) -> bool {
    (lambda * k - 1.0).norm() <= DEGENERATE_TOL
}

/// χ(λ) = r^{1/4}e^{iθ/4} where 1 − 1/(λk) = re^{iθ}, θ ∈ [0, 2π).
pub fn chi(lambda: C64, k: f64) -> Result<C64> {
    if lambda == ZERO || is_degenerate_lambda(lambda, k) {
        return Err(Error::DegenerateLambda { lambda: format!("{lambda}") });
    }
    let q = ONE - (lambda * k).inv();
    let mut theta = q.arg();
    if theta < 0.0 {
        theta += 2.0 * PI;
    }
    Ok(C64::from_polar(q.norm().powf(0.25), theta / 4.0))
}

/// λ = 1/(k(1 − κ⁴)).
pub fn chi_inverse(kappa: C64, k: f64) -> C64 {
    (k * (ONE - kappa.powi(4))).inv()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn close(a: &Mat4, b: &Mat4, tol: f64) -> bool {
        max_norm(&(a - b)) <= tol
    }

    #[test]
    fn omega_values_and_periodicity() {
        let s = FRAC_1_SQRT_2;
        assert!((omega(1) - C64::new(s, s)).norm() < 1e-15);
        for j in -6..10 {
            assert!((omega(j).powi(4) + ONE).norm() < 1e-14);
            assert!((omega(j + 1) - IM * omega(j)).norm() < 1e-15);
            assert!((omega(j + 4) - omega(j)).norm() < 1e-15);
            assert!((omega(j).conj() - omega(j).inv()).norm() < 1e-15);
            assert!((omega(j).re - epsilon(j) * s).abs() < 1e-15);
            assert!((omega(j).im - epsilon(j - 1) * s).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_identities() {
        let c = build_constants();
        let id = Mat4::identity();
        let om4 = c.big_omega.pow(4);
        assert!(close(&(om4 + id), &Mat4::zeros(), 1e-14));
        assert!(close(&c.big_omega.map(|z| z.conj()), &c.big_omega.try_inverse().unwrap(), 1e-14));
        assert!(close(&(c.w0 * c.w0_inv), &id, 1e-14));
        assert!(close(&(c.r4 * c.big_omega), &(c.big_omega.map(|z| z.conj()) * c.r4), 1e-14));
        assert!(close(&(c.w0 * c.r4), &c.w0.map(|z| z.conj()), 1e-14));
        assert!(close(&(c.lmat * c.big_omega * c.lmat_inv), &(c.big_omega * IM), 1e-14));
        assert!(close(&(c.l2 * c.big_omega), &(-c.big_omega * c.l2), 1e-14));
        assert!(close(&c.u4.map(|z| z.conj()), &(c.u4 * c.r4), 1e-14));
        assert!(close(&(c.u4 * c.u4.adjoint()), &id, 1e-14));
        assert!((c.v.determinant() - ONE).norm() < 1e-14);
        assert!((c.v_hat.determinant() + ONE).norm() < 1e-14);
        assert!(close(&(c.omega_l2 * c.omega_l2_inv), &id, 1e-14));
    }

    #[test]
    fn u2n_is_unitary() {
        for n in 1..=4 {
            let u = u2n(n);
            let err = max_norm(&(&u * u.adjoint() - DMatrix::identity(2 * n, 2 * n)));
            assert!(err < 1e-14, "n = {n}: {err}");
            let r = reversal(2 * n);
            assert!(max_norm(&(u.map(|z| z.conj()) - &u * r)) < 1e-14);
        }
    }

    #[test]
    fn u4_matches_displayed_rows() {
        let s = FRAC_1_SQRT_2;
        let u = constants().u4 / C64::new(s, 0.0);
        let expected = Mat4::new(
            ONE, ZERO, ZERO, ONE, //
            ZERO, ONE, ONE, ZERO, //
            ZERO, IM, -IM, ZERO, //
            IM, ZERO, ZERO, -IM,
        );
        assert!(close(&u, &expected, 1e-14));
    }

    #[test]
    fn l_squared_reflects_y() {
        let c = constants();
        let p = BeamParams::new(0.7, 1.3, 2.0).unwrap();
        for x in [-0.7, -0.2, 0.0, 0.45] {
            let lhs = c.l2 * y_vector(&p, x);
            assert!(max_norm(&(lhs - y_vector(&p, -x))) < 1e-14);
        }
    }

    #[test]
    fn wronskian_examples() {
        let p = BeamParams::default();
        let c = constants();
        assert!(close(&wronskian_w(&p, 0.0), &c.w0, 1e-15));
        assert!(close(&wronskian_w_inv(&p, 0.0), &(c.w0.adjoint() / C64::new(4.0, 0.0)), 1e-15));
        for x in [-1.0, 0.3, 2.0] {
            let w = wronskian_w(&p, x);
            assert!(close(&(w * wronskian_w_inv(&p, x)), &Mat4::identity(), 1e-12));
            assert!(close(&(w * c.r4), &w.map(|z| z.conj()), 1e-14));
        }
        let p2 = BeamParams::new(1.0, 2.0, 1.0).unwrap();
        assert!((wronskian_w_inv(&p2, 0.0)[(0, 0)] - C64::new(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn wronskian_entries() {
        let p = BeamParams::new(1.0, 1.7, 1.0).unwrap();
        let x = 0.4;
        let w = wronskian_w(&p, x);
        for i in 0..4 {
            for j in 0..4 {
                let r = omega(j as i32 + 1) * 1.7;
                let e = r.powi(i as i32) * (r * x).exp();
                assert!((w[(i, j)] - e).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn wronskian_inverse_matches_numeric_inverse() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let alpha = rng.gen_range(0.2..3.0);
            let x = rng.gen_range(-6.0..6.0) / alpha;
            let p = BeamParams::new(1.0, alpha, 1.0).unwrap();
            let numeric = wronskian_w(&p, x).try_inverse().unwrap();
            let closed = wronskian_w_inv(&p, x);
            let scale = max_norm(&closed).max(1.0);
            assert!(max_norm(&(numeric - closed)) <= 1e-12 * scale);
        }
    }

    #[test]
    fn pibar_examples() {
        let c = constants();
        assert!(is_pibar4(&c.big_omega, 1e-14));
        assert!(is_pibar4(&c.l2, 1e-14));
        assert!(is_pibar4(&c.eps, 1e-14));
        assert!(!is_pibar4(&(Mat4::identity() * IM), 1e-10));
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let mut a = Mat4::zeros();
        for i in 0..2 {
            for j in 0..4 {
                let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                a[(i, j)] = z;
                a[(3 - i, 3 - j)] = z.conj();
            }
        }
        assert!(is_pibar4(&a, 1e-14));
    }

    #[test]
    fn pibar_to_real_examples() {
        let id = DMatrix::<C64>::identity(4, 4);
        let b = pibar_to_real(&id).unwrap();
        assert!((b - DMatrix::<f64>::identity(4, 4)).amax() < 1e-15);
        let zero = DMatrix::<C64>::zeros(4, 4);
        assert!(pibar_to_real(&zero).unwrap().amax() == 0.0);
        let om = to_dyn(&constants().big_omega);
        let bo = pibar_to_real(&om).unwrap();
        let det_b = bo.determinant();
        let det_o = om.determinant();
        assert!(det_o.im.abs() < 1e-14);
        assert!((det_b - det_o.re).abs() < 1e-13);
        assert!(matches!(pibar_to_real(&(id * IM)), Err(Error::NotInPibar { .. })));
    }

    #[test]
    fn real_to_pibar_round_trip() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for n in [1usize, 2] {
            for _ in 0..100 {
                let b = DMatrix::<f64>::from_fn(2 * n, 2 * n, |_, _| rng.gen_range(-2.0..2.0));
                let a = real_to_pibar(&b).unwrap();
                assert!(is_pibar(&a, 1e-12));
                let back = pibar_to_real(&a).unwrap();
                assert!((back - &b).amax() <= 1e-12);
            }
        }
        let id = DMatrix::<f64>::identity(4, 4);
        assert!(max_norm(&(real_to_pibar(&id).unwrap() - DMatrix::<C64>::identity(4, 4))) < 1e-15);
    }

    #[test]
    fn chi_examples() {
        let k = 1.0;
        let kap = chi(C64::new(2.0, 0.0), k).unwrap();
        assert!((kap - C64::new(0.5f64.powf(0.25), 0.0)).norm() < 1e-15);
        let kap = chi(C64::new(-1.0, 0.0), k).unwrap();
        assert!((kap - C64::new(2f64.powf(0.25), 0.0)).norm() < 1e-15);
        assert!(matches!(chi(ZERO, k), Err(Error::DegenerateLambda { .. })));
        assert!(matches!(chi(ONE, k), Err(Error::DegenerateLambda { .. })));
        let kap = chi(C64::new(0.5, 0.0), 1.0).unwrap();
        assert!((kap.arg() - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn chi_round_trip() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        for _ in 0..50 {
            let k = rng.gen_range(0.3..3.0);
            let lam = C64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)) / k;
            let kap = chi(lam, k).unwrap();
            let q = ONE - (lam * k).inv();
            assert!((kap.powi(4) - q).norm() <= 1e-12 * q.norm().max(1.0));
            assert!(kap.arg() >= 0.0 && kap.arg() < PI / 2.0);
            assert!((chi_inverse(kap, k) - lam).norm() <= 1e-12 * lam.norm().max(1.0));
        }
    }
}
