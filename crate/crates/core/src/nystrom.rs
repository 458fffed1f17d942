//! Nyström discretization of 𝒦_M, used as an independent spectral oracle.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::boundary::{require_wellposed, BoundaryCondition};
use crate::error::{Error, Result};
use crate::greens::{GreensKernel, QuadratureRule};
use crate::matrix_kit::{y_vector, BeamParams, ComplexMatrix, Vec4, C64};

pub const DEFAULT_NODES: usize = 400;

/// A_ij = G_M(x_i, x_j)·w_j.
pub fn nystrom_matrix(bc: &BoundaryCondition, params: &BeamParams, rule: &QuadratureRule) -> Result<ComplexMatrix> {
    require_wellposed(bc, params)?;
    if (rule.half_length() - params.l).abs() > 1e-12 * params.l {
        return Err(Error::Input(format!("quadrature rule is on [-{0}, {0}] but l = {1}", rule.half_length(), params.l)));
    }
    let kern = GreensKernel::new(bc, params)?;
    Ok(assemble(&kern, rule))
}

fn assemble(kern: &GreensKernel, rule: &QuadratureRule) -> ComplexMatrix {
    let n = rule.len();
    let ys: Vec<Vec4> = rule.nodes.iter().map(|&x| y_vector(&kern.params, x)).collect();
    let upper: Vec<Vec4> = ys.iter().map(|y| kern.rep.g_plus * y).collect();
    let lower: Vec<Vec4> = ys.iter().map(|y| -(kern.rep.g_minus * y)).collect();
    let s = kern.scale();
    DMatrix::from_fn(n, n, |i, j| {
        let v = if rule.nodes[i] <= rule.nodes[j] { &upper[j] } else { &lower[j] };
        ys[i].dot(v) * (s * rule.weights[j])
    })
}

/// One Nyström eigenvalue with its residual ‖Av − λv‖/‖v‖ and, when available,
/// the relative change on doubling the node count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NystromEigen {
    pub lambda: C64,
    pub residual: f64,
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NystromReport {
    pub nodes: usize,
    pub symmetric: bool,
    pub eigenvalues: Vec<NystromEigen>,
}

/// Whether every imaginary part is below 1e-12 of the largest entry.
fn is_real(a: &ComplexMatrix) -> bool {
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    a.iter().all(|z| z.im.abs() <= 1e-12 * scale)
}

/// Whether the kernel samples G(x_i, x_j) are symmetric.
fn kernel_is_symmetric(a: &ComplexMatrix, rule: &QuadratureRule) -> bool {
    let n = a.nrows();
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    (0..n).all(|i| {
        (0..i).all(|j| (a[(i, j)] / rule.weights[j] - a[(j, i)] / rule.weights[i]).norm() * rule.weights[i].min(rule.weights[j]) <= 1e-12 * scale)
    })
}

/// All eigenvalues of a Nyström matrix, by decreasing modulus.
pub fn nystrom_eigenvalues(a: &ComplexMatrix, rule: &QuadratureRule) -> Result<(Vec<C64>, bool)> {
    let n = a.nrows();
    let symmetric = is_real(a) && kernel_is_symmetric(a, rule);
    let mut eig: Vec<C64> = if symmetric {
        let sw: Vec<f64> = rule.weights.iter().map(|w| w.sqrt()).collect();
        let b = DMatrix::from_fn(n, n, |i, j| {
            let v = 0.5 * (a[(i, j)].re / rule.weights[j] + a[(j, i)].re / rule.weights[i]);
            sw[i] * v * sw[j]
        });
        SymmetricEigen::new(b).eigenvalues.iter().map(|&v| C64::new(v, 0.0)).collect()
    } else if is_real(a) {
        let b = a.map(|z| z.re);
        nalgebra::linalg::Schur::new(b).complex_eigenvalues().iter().copied().collect()
    } else {
        nalgebra::linalg::Schur::new(a.clone())
            .eigenvalues()
            .ok_or_else(|| Error::Consistency("complex Schur form is not triangular".into()))?
            .iter()
            .copied()
            .collect()
    };
    eig.sort_by(|p, q| q.norm().total_cmp(&p.norm()).then(q.re.total_cmp(&p.re)).then(q.im.total_cmp(&p.im)));
    Ok((eig, symmetric))
}

/// ‖Av − λv‖/‖v‖ for v from two steps of shifted inverse iteration.
pub fn eigen_residual(a: &ComplexMatrix, lambda: C64) -> f64 {
    let n = a.nrows();
    let shift = lambda + C64::new(1e-10 * lambda.norm().max(1e-300), 0.0);
    let mut m = a.clone();
    for i in 0..n {
        m[(i, i)] -= shift;
    }
    let lu = m.lu();
    let mut v = DVector::from_fn(n, |i, _| C64::new(1.0 + (i as f64 * 0.37).sin(), 0.0));
    for _ in 0..2 {
        match lu.solve(&v) {
            Some(w) if w.norm() > 0.0 && w.iter().all(|z| z.is_finite()) => v = &w / C64::new(w.norm(), 0.0),
            _ => return 0.0,
        }
    }
    (a * &v - &v * lambda).norm()
}

/// Top `top` eigenvalues by modulus at `nodes` quadrature nodes.
pub fn nystrom_spectrum(bc: &BoundaryCondition, params: &BeamParams, nodes: usize, top: usize) -> Result<Vec<C64>> {
    let rule = QuadratureRule::with_nodes(params.l, nodes)?;
    let a = nystrom_matrix(bc, params, &rule)?;
    let (mut eig, _) = nystrom_eigenvalues(&a, &rule)?;
    eig.truncate(top);
    Ok(eig)
}

/// Top eigenvalues with residuals and, if `doubling`, deltas against 2·nodes.
pub fn nystrom_report(bc: &BoundaryCondition, params: &BeamParams, nodes: usize, top: usize, doubling: bool) -> Result<NystromReport> {
    let rule = QuadratureRule::with_nodes(params.l, nodes)?;
    let a = nystrom_matrix(bc, params, &rule)?;
    let (mut eig, symmetric) = nystrom_eigenvalues(&a, &rule)?;
    eig.truncate(top);
    let fine = if doubling { Some(nystrom_spectrum(bc, params, 2 * nodes, 2 * top + 4)?) } else { None };
    let eigenvalues = eig
        .iter()
        .map(|&lambda| {
            let delta = fine.as_ref().map(|f| {
                f.iter().map(|&m| (m - lambda).norm() / m.norm().max(f64::MIN_POSITIVE)).fold(f64::INFINITY, f64::min)
            });
            NystromEigen { lambda, residual: eigen_residual(&a, lambda), delta }
        })
        .collect();
    Ok(NystromReport { nodes, symmetric, eigenvalues })
}

/// Relative distance from λ to the nearest value in `spectrum`.
pub fn nearest_relative(spectrum: &[C64], lambda: C64) -> f64 {
    spectrum
        .iter()
        .map(|&m| (m - lambda).norm() / lambda.norm().max(f64::MIN_POSITIVE))
        .fold(f64::INFINITY, f64::min)
}
