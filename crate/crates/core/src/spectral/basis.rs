use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix_kit::{chi, constants, exp_basis_matrix, is_degenerate_lambda, omega, powers_diag, BeamParams, Mat4, Vec4, C64, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "lowercase")]
pub enum Branch {
    Generic { kappa: [f64; 2] },
    Degenerate,
}

/// Solutions y_{λ,j} of u⁗ = α⁴(1/(λk) − 1)u: e^{ω_jκαx}, or x^{j−1}/(j−1)! at λ = 1/k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenBasis {
    pub lambda: C64,
    pub params: BeamParams,
    kappa: Option<C64>,
}

impl EigenBasis {
    pub fn new(lambda: C64, params: &BeamParams) -> Result<Self> {
        if lambda == ZERO {
            return Err(Error::ZeroLambda);
        }
        let kappa = if is_degenerate_lambda(lambda, params.k) { None } else { Some(chi(lambda, params.k)?) };
        Ok(Self { lambda, params: *params, kappa })
    }

    /// κ = χ(λ), or `None` on the polynomial branch.
    pub fn kappa(&self) -> Option<C64> {
        self.kappa
    }

    pub fn branch(&self) -> Branch {
        match self.kappa {
            Some(k) => Branch::Generic { kappa: [k.re, k.im] },
            None => Branch::Degenerate,
        }
    }

    pub fn y(&self, x: f64) -> Vec4 {
        match self.kappa {
            Some(kap) => {
                let s = kap * self.params.alpha;
                Vec4::from_fn(|j, _| (omega(j as i32 + 1) * s * x).exp())
            }
            None => Vec4::new(C64::new(1.0, 0.0), C64::new(x, 0.0), C64::new(x * x / 2.0, 0.0), C64::new(x.powi(3) / 6.0, 0.0)),
        }
    }

    /// Wronskian W_λ(x) of the basis.
    pub fn w_matrix(&self, x: f64) -> Mat4 {
        match self.kappa {
            Some(kap) => exp_basis_matrix(kap * self.params.alpha, x),
            None => Mat4::from_fn(|i, j| {
                if j < i {
                    ZERO
                } else {
                    let n = (j - i) as i32;
                    C64::new(x.powi(n) / factorial(n as usize), 0.0)
                }
            }),
        }
    }

    /// T = diag(1,α,α²,α³)·diag(1,κ,κ²,κ³)·W₀, with y_λ ≈ y_{1/k}·T near λ = 1/k;
    /// the identity on the polynomial branch.
    pub fn taylor_transform(&self) -> Mat4 {
        match self.kappa {
            Some(kap) => powers_diag(kap * self.params.alpha) * constants().w0,
            None => Mat4::identity(),
        }
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|v| v as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix_kit::max_norm;

    #[test]
    fn generic_wronskian_at_zero() {
        let p = BeamParams::new(1.0, 1.5, 1.0).unwrap();
        let b = EigenBasis::new(C64::new(2.0, 0.0), &p).unwrap();
        let kap = b.kappa().unwrap();
        let w = b.w_matrix(0.0);
        for i in 0..4 {
            for j in 0..4 {
                let e = (omega(j as i32 + 1) * kap * 1.5).powi(i as i32);
                assert!((w[(i, j)] - e).norm() < 1e-14);
            }
        }
        assert!(max_norm(&(w - b.taylor_transform())) < 1e-14);
    }

    #[test]
    fn degenerate_basis() {
        let p = BeamParams::new(1.0, 1.0, 2.0).unwrap();
        let b = EigenBasis::new(C64::new(0.5, 0.0), &p).unwrap();
        assert_eq!(b.branch(), Branch::Degenerate);
        let y = b.y(0.7);
        assert!((y[1] - C64::new(0.7, 0.0)).norm() == 0.0);
        assert!((y[3] - C64::new(0.7f64.powi(3) / 6.0, 0.0)).norm() < 1e-16);
        let w = b.w_matrix(0.7);
        assert_eq!(w[(1, 0)], ZERO);
        assert!((w[(1, 3)] - C64::new(0.245, 0.0)).norm() < 1e-15);
        assert!(matches!(EigenBasis::new(ZERO, &p), Err(Error::ZeroLambda)));
    }

    #[test]
    fn wronskian_rows_are_derivatives() {
        let p = BeamParams::new(1.0, 1.2, 1.0).unwrap();
        let b = EigenBasis::new(C64::new(0.3, 0.2), &p).unwrap();
        let h = 1e-5;
        let x = 0.4;
        let d = (b.y(x + h) - b.y(x - h)) / C64::new(2.0 * h, 0.0);
        let w = b.w_matrix(x);
        for j in 0..4 {
            assert!((d[j] - w[(1, j)]).norm() < 1e-8);
            assert!((b.y(x)[j] - w[(0, j)]).norm() < 1e-15);
        }
    }
}
