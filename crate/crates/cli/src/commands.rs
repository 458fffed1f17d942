use beam_bvp::boundary::{greens_matrices, tilde, BoundaryCondition, BoundaryConditionJson, WELLPOSED_TOL};
use beam_bvp::existence::construct_bc_for_eigenvalue;
use beam_bvp::greens::{apply_k_at_points, boundary_trace, de_residual, kernel, GridFunction, QuadratureRule};
use beam_bvp::json::{complex_pair, MatrixJson};
use beam_bvp::matrix_kit::{BeamParams, Mat4, C64};
use beam_bvp::nystrom::{nearest_relative, nystrom_report, nystrom_spectrum};
use beam_bvp::representation::{gamma, gamma_inverse, gamma_inverse_real};
use beam_bvp::spectral::{scan_real_spectrum, spec_q, spectral_point_at, ScanWarning, SpectralPoint};
use serde::{Deserialize, Serialize};

use crate::io::{CliError, CliResult};

#[derive(Serialize)]
pub struct Wellposed {
    pub wellposed: bool,
    pub det_tilde: [f64; 2],
    pub relative_det: f64,
}

pub fn wellposed(bc: &BoundaryCondition, p: &BeamParams) -> Wellposed {
    let t = tilde(bc, p);
    let relative_det = t.relative_det();
    Wellposed { wellposed: relative_det > WELLPOSED_TOL, det_tilde: complex_pair(t.det_tilde), relative_det }
}

#[derive(Serialize)]
pub struct Greens {
    pub g_minus: MatrixJson,
    pub g_plus: MatrixJson,
    pub gamma: MatrixJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<[f64; 2]>,
}

pub fn greens(bc: &BoundaryCondition, p: &BeamParams, at: Option<(f64, f64)>) -> CliResult<Greens> {
    let rep = greens_matrices(bc, p)?;
    let g = gamma(bc, p)?;
    let kernel = at.map(|(x, xi)| kernel(bc, p, x, xi)).transpose()?.map(complex_pair);
    Ok(Greens {
        g_minus: MatrixJson::from_mat4(&rep.g_minus),
        g_plus: MatrixJson::from_mat4(&rep.g_plus),
        gamma: MatrixJson::from_mat4(&g),
        kernel,
    })
}

pub fn gamma_matrix(bc: &BoundaryCondition, p: &BeamParams) -> CliResult<MatrixJson> {
    Ok(MatrixJson::from_mat4(&gamma(bc, p)?))
}

pub fn gamma_inv(g: &Mat4, p: &BeamParams, real: bool) -> CliResult<BoundaryConditionJson> {
    let bc = if real { gamma_inverse_real(g, p)? } else { gamma_inverse(g, p) };
    Ok(BoundaryConditionJson::from(&bc))
}

#[derive(Serialize)]
pub struct PointJson {
    pub n: usize,
    pub lambda: [f64; 2],
    pub k_lambda: [f64; 2],
    pub residual: f64,
    pub multiplicity: usize,
    pub c: Vec<[f64; 2]>,
    pub char_det_y: Option<[f64; 2]>,
}

impl PointJson {
    fn new(n: usize, pt: &SpectralPoint, p: &BeamParams) -> Self {
        Self {
            n,
            lambda: complex_pair(pt.lambda),
            k_lambda: complex_pair(pt.lambda * p.k),
            residual: pt.residual,
            multiplicity: pt.multiplicity,
            c: pt.c.iter().map(|&z| complex_pair(z)).collect(),
            char_det_y: pt.char_det_y.map(complex_pair),
        }
    }
}

#[derive(Serialize)]
pub struct Spectrum {
    pub points: Vec<PointJson>,
    pub warnings: Vec<ScanWarning>,
}

pub fn spectrum(bc: &BoundaryCondition, p: &BeamParams, interval: (f64, f64), count: Option<usize>, grid: usize) -> CliResult<Spectrum> {
    let rep = scan_real_spectrum(bc, p, interval, grid)?;
    let mut pts = rep.points;
    pts.sort_by(|a, b| b.lambda.norm().total_cmp(&a.lambda.norm()));
    if let Some(c) = count {
        pts.truncate(c);
    }
    Ok(Spectrum { points: pts.iter().enumerate().map(|(i, q)| PointJson::new(i + 1, q, p)).collect(), warnings: rep.warnings })
}

pub fn spectrum_rows(s: &Spectrum) -> Vec<(usize, f64, f64, f64)> {
    s.points.iter().map(|q| (q.n, q.lambda[0], q.k_lambda[0], q.residual)).collect()
}

#[derive(Serialize)]
pub struct SpecQJson {
    pub intrinsic_length: f64,
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
    pub k_mu: Vec<f64>,
    pub k_nu: Vec<f64>,
    #[serde(skip)]
    pub rows: Vec<(usize, f64, f64, f64)>,
}

pub fn specq(p: &BeamParams, count: usize) -> CliResult<SpecQJson> {
    let s = spec_q(p, count)?;
    let q = beam_bvp::boundary::named_bc(beam_bvp::boundary::NamedBc::Q, p);
    let rows = s
        .roots
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let res = spectral_point_at(&q, p, C64::new(r, 0.0)).map(|pt| pt.residual)?;
            Ok((i + 1, r, r * p.k, res))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(SpecQJson {
        intrinsic_length: p.intrinsic_length(),
        k_mu: s.mu.iter().map(|v| v * p.k).collect(),
        k_nu: s.nu.iter().map(|v| v * p.k).collect(),
        mu: s.mu,
        nu: s.nu,
        rows,
    })
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum Load {
    Uniform,
    Linear,
    Cosine,
    Gaussian,
}

impl Load {
    fn eval(self, x: f64, l: f64) -> f64 {
        match self {
            Load::Uniform => 1.0,
            Load::Linear => x / l,
            Load::Cosine => (std::f64::consts::PI * x / (2.0 * l)).cos(),
            Load::Gaussian => (-(x / (0.2 * l)).powi(2)).exp(),
        }
    }
}

#[derive(Serialize)]
pub struct Solution {
    pub x: Vec<f64>,
    pub u: Vec<[f64; 2]>,
    pub de_residual: f64,
    pub boundary_residual: f64,
}

pub fn solve(bc: &BoundaryCondition, p: &BeamParams, load: Load, nodes: usize, points: usize) -> CliResult<Solution> {
    if points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let rule = QuadratureRule::with_nodes(p.l, nodes)?;
    let w = GridFunction::from_fn(&rule, |x| C64::new(load.eval(x, p.l), 0.0));
    let x: Vec<f64> = (0..points).map(|i| -p.l + 2.0 * p.l * i as f64 / (points - 1) as f64).collect();
    let u = apply_k_at_points(bc, p, &w, &x)?;
    let boundary_residual = bc.apply(&boundary_trace(bc, p, &w)?).norm();
    Ok(Solution { x, u: u.into_iter().map(complex_pair).collect(), de_residual: de_residual(bc, p, &w)?, boundary_residual })
}

#[derive(Deserialize)]
pub struct ConstructInput {
    pub lambda: f64,
    #[serde(default)]
    pub params: Option<BeamParams>,
}

#[derive(Serialize)]
pub struct NystromMatch {
    pub nodes: usize,
    pub nearest: [f64; 2],
    pub relative_error: f64,
    pub matched: bool,
}

#[derive(Serialize)]
pub struct Verification {
    pub char_det_y: Option<[f64; 2]>,
    pub residual: f64,
    pub nystrom_match: Option<NystromMatch>,
}

#[derive(Serialize)]
pub struct Construct {
    pub lambda: f64,
    pub k_lambda: f64,
    pub bc: BoundaryConditionJson,
    pub c: Vec<[f64; 2]>,
    pub verification: Verification,
}

pub fn construct(lambda: f64, p: &BeamParams, nodes: Option<usize>) -> CliResult<Construct> {
    let c = construct_bc_for_eigenvalue(lambda, p)?;
    let nystrom_match = nodes
        .map(|n| -> CliResult<NystromMatch> {
            let ny = nystrom_spectrum(&c.bc, p, n, 40)?;
            let target = C64::new(lambda, 0.0);
            let nearest = ny.iter().copied().min_by(|a, b| (a - target).norm().total_cmp(&(b - target).norm())).unwrap_or_default();
            let relative_error = nearest_relative(&ny, target);
            Ok(NystromMatch { nodes: n, nearest: complex_pair(nearest), relative_error, matched: relative_error <= 1e-4 })
        })
        .transpose()?;
    Ok(Construct {
        lambda,
        k_lambda: lambda * p.k,
        bc: BoundaryConditionJson::from(&c.bc),
        c: c.point.c.iter().map(|&z| complex_pair(z)).collect(),
        verification: Verification { char_det_y: c.point.char_det_y.map(complex_pair), residual: c.residual, nystrom_match },
    })
}

#[derive(Serialize)]
pub struct OracleEigen {
    pub lambda: [f64; 2],
    pub k_lambda: [f64; 2],
    pub residual: f64,
    pub delta: Option<f64>,
}

#[derive(Serialize)]
pub struct Oracle {
    pub nodes: usize,
    pub symmetric: bool,
    pub eigenvalues: Vec<OracleEigen>,
}

pub fn oracle(bc: &BoundaryCondition, p: &BeamParams, nodes: usize, top: usize, doubling: bool) -> CliResult<Oracle> {
    let rep = nystrom_report(bc, p, nodes, top, doubling)?;
    Ok(Oracle {
        nodes: rep.nodes,
        symmetric: rep.symmetric,
        eigenvalues: rep
            .eigenvalues
            .iter()
            .map(|e| OracleEigen {
                lambda: complex_pair(e.lambda),
                k_lambda: complex_pair(e.lambda * p.k),
                residual: e.residual,
                delta: e.delta,
            })
            .collect(),
    })
}
