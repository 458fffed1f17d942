use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix_kit::{BeamParams, Mat4, C64};

use super::basis::EigenBasis;
use super::chardet::char_eval;

/// Eigenvalues of the operator with the Q conditions, the zeros of det X_λ(l) in (0, 1/k),
/// in decreasing order and split alternately into μ (even eigenfunctions first) and ν.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpecQ {
    pub roots: Vec<f64>,
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
}

fn lambda_of(s: f64, k: f64) -> f64 {
    1.0 / (k * (1.0 + s.powi(4)))
}

fn det_q(s: f64, params: &BeamParams) -> Result<f64> {
    let basis = EigenBasis::new(C64::new(lambda_of(s, params.k), 0.0), params)?;
    Ok(char_eval(&Mat4::zeros(), &basis).det.re)
}

/// The first `count` values of each of μ and ν.
pub fn spec_q(params: &BeamParams, count: usize) -> Result<SpecQ> {
    if count == 0 {
        return Err(Error::Input("count must be positive".into()));
    }
    let want = 2 * count;
    let ds = (std::f64::consts::PI / (64.0 * params.intrinsic_length())).min(0.02);
    let mut roots = Vec::with_capacity(want);
    let mut s0 = 1e-3;
    let mut f0 = det_q(s0, params)?;
    let max_steps = 10_000_000usize;
    let mut steps = 0;
    while roots.len() < want {
        steps += 1;
        if steps > max_steps {
            return Err(Error::Consistency(format!("found only {} roots", roots.len())));
        }
        let s1 = s0 + ds;
        let f1 = det_q(s1, params)?;
        if f0 == 0.0 {
            roots.push(lambda_of(s0, params.k));
        } else if f0 * f1 < 0.0 {
            let (mut lo, mut hi, mut flo) = (s0, s1, f0);
            while hi - lo > 4.0 * f64::EPSILON * hi {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let fm = det_q(mid, params)?;
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (fm < 0.0) == (flo < 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push(lambda_of(0.5 * (lo + hi), params.k));
        }
        s0 = s1;
        f0 = f1;
    }
    let mu = roots.iter().step_by(2).copied().collect();
    let nu = roots.iter().skip(1).step_by(2).copied().collect();
    Ok(SpecQ { roots, mu, nu })
}
