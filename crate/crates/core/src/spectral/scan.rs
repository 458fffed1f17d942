use serde::Serialize;

use crate::boundary::{BoundaryCondition, require_wellposed};
use crate::error::{Error, Result};
use crate::greens::{GridFunction, QuadratureRule};
use crate::matrix_kit::{BeamParams, Mat4, Vec4, C64};
use crate::representation::gamma;

use super::basis::EigenBasis;
use super::chardet::{char_eval, char_matrix, CharEval};
use super::xmatrix::{x_closed_shifted, y_for_basis};

/// An eigenvalue with its coefficient vector c (‖c‖ = 1) in the y_λ basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPoint {
    pub lambda: C64,
    pub c: Vec4,
    /// σ_min/σ_max of the normalized characteristic matrix.
    pub residual: f64,
    pub multiplicity: usize,
    pub char_det_y: Option<C64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    /// Minimum number of samples per real piece.
    pub grid: usize,
    /// Largest residual accepted as an eigenvalue.
    pub accept_tol: f64,
    /// Singular-value ratio counted towards multiplicity.
    pub multiplicity_tol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { grid: 4000, accept_tol: 1e-6, multiplicity_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanWarning {
    pub lambda: f64,
    pub residual: f64,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScanReport {
    pub points: Vec<SpectralPoint>,
    pub warnings: Vec<ScanWarning>,
}

/// Real pieces on which κ has a fixed phase, with coordinate s = |κ|.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Piece {
    Negative,
    Inside,
    Outside,
}

impl Piece {
    fn lambda(self, s: f64, k: f64) -> f64 {
        match self {
            Piece::Inside => 1.0 / (k * (1.0 + s.powi(4))),
            Piece::Outside | Piece::Negative => 1.0 / (k * (1.0 - s.powi(4))),
        }
    }

    fn coordinate(self, lambda: f64, k: f64) -> f64 {
        match self {
            Piece::Inside => (1.0 / (lambda * k) - 1.0).powf(0.25),
            Piece::Outside | Piece::Negative => (1.0 - 1.0 / (lambda * k)).powf(0.25),
        }
    }
}

const S_FLOOR: f64 = 1e-3;
const S_CEIL: f64 = 1e3;
const LAMBDA_FLOOR: f64 = 1e-10;

pub fn scan_real_spectrum(bc: &BoundaryCondition, params: &BeamParams, interval: (f64, f64), grid: usize) -> Result<ScanReport> {
    scan_real_spectrum_with(bc, params, interval, &ScanOptions { grid, ..ScanOptions::default() })
}

pub fn scan_real_spectrum_with(
    bc: &BoundaryCondition,
    params: &BeamParams,
    interval: (f64, f64),
    opts: &ScanOptions,
) -> Result<ScanReport> {
    require_wellposed(bc, params)?;
    let (a, b) = interval;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::Input(format!("invalid interval [{a}, {b}]")));
    }
    let g = gamma(bc, params)?;
    let real = bc.is_real();
    let k = params.k;
    let inv_k = 1.0 / k;
    let floor = LAMBDA_FLOOR / k;
    let mut report = ScanReport::default();

    let mut ranges = Vec::new();
    if a < 0.0 {
        ranges.push((Piece::Negative, a, b.min(-floor)));
    }
    if b > 0.0 && a < inv_k {
        ranges.push((Piece::Inside, a.max(floor), b.min(inv_k)));
    }
    if b > inv_k {
        ranges.push((Piece::Outside, a.max(inv_k), b));
    }
    for (piece, lo, hi) in ranges {
        if lo >= hi {
            continue;
        }
        let mut s0 = piece.coordinate(lo, k);
        let mut s1 = piece.coordinate(hi, k);
        if s0 > s1 {
            std::mem::swap(&mut s0, &mut s1);
        }
        let (s0, s1) = match piece {
            Piece::Negative => (s0.max(1.0 + 1e-12), s1.min(S_CEIL)),
            _ => (s0.max(S_FLOOR), s1.min(S_CEIL)),
        };
        if s0 < s1 {
            scan_piece(&g, params, piece, (s0, s1), real, opts, &mut report)?;
        }
    }
    if a <= inv_k && inv_k <= b {
        let basis = EigenBasis::new(C64::new(inv_k, 0.0), params)?;
        let e = char_eval(&g, &basis);
        if e.residual() <= opts.accept_tol {
            report.points.push(make_point(&g, &basis, &e, opts));
        }
    }
    report.points.sort_by(|p, q| q.lambda.re.total_cmp(&p.lambda.re));
    report.points.dedup_by(|p, q| (p.lambda - q.lambda).norm() <= 1e-10 * q.lambda.norm().max(1e-300));
    Ok(report)
}

fn eval_at(g: &Mat4, params: &BeamParams, piece: Piece, s: f64) -> Result<(EigenBasis, CharEval)> {
    let lam = piece.lambda(s, params.k);
    let basis = EigenBasis::new(C64::new(lam, 0.0), params)?;
    let e = char_eval(g, &basis);
    Ok((basis, e))
}

fn scan_piece(
    g: &Mat4,
    params: &BeamParams,
    piece: Piece,
    (s0, s1): (f64, f64),
    real: bool,
    opts: &ScanOptions,
    report: &mut ScanReport,
) -> Result<()> {
    let spacing = std::f64::consts::PI / params.intrinsic_length().max(1e-6);
    let n = opts.grid.max(((s1 - s0) / spacing * 32.0).ceil() as usize).max(8);
    let ss: Vec<f64> = (0..=n).map(|i| s0 + (s1 - s0) * i as f64 / n as f64).collect();
    let vals: Vec<C64> = ss.iter().map(|&s| eval_at(g, params, piece, s).map(|(_, e)| e.det)).collect::<Result<_>>()?;
    let value = |s: f64| -> Result<C64> { Ok(eval_at(g, params, piece, s)?.1.det) };
    let k = params.k;

    if real {
        for i in 0..n {
            let (fa, fb) = (vals[i].re, vals[i + 1].re);
            if fa == 0.0 {
                push_root(g, params, piece, ss[i], opts, report)?;
            } else if fa * fb < 0.0 {
                let (mut lo, mut hi, mut flo) = (ss[i], ss[i + 1], fa);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if hi - lo <= 4.0 * f64::EPSILON * hi || mid <= lo || mid >= hi {
                        break;
                    }
                    let fm = value(mid)?.re;
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
                push_root(g, params, piece, polish(g, params, piece, lo, hi)?, opts, report)?;
            }
        }
    }
    // Touching zeros: interior minima of |D| whose neighbours share its sign.
    for i in 1..n {
        let (m0, m1, m2) = (vals[i - 1].norm(), vals[i].norm(), vals[i + 1].norm());
        if !(m1 < m0 && m1 < m2) {
            continue;
        }
        if real && (vals[i - 1].re * vals[i].re < 0.0 || vals[i].re * vals[i + 1].re < 0.0) {
            continue;
        }
        let s = golden_min(|s| value(s).map(|v| v.norm()), ss[i - 1], ss[i + 1])?;
        let (basis, e) = eval_at(g, params, piece, s)?;
        if e.residual() <= opts.accept_tol {
            report.points.push(make_point(g, &basis, &e, opts));
        } else if value(s)?.norm() < 1e-3 * m0.max(m2) {
            report.warnings.push(ScanWarning {
                lambda: piece.lambda(s, k),
                residual: e.residual(),
                message: "characteristic determinant nearly touches zero without a sign change".into(),
            });
        }
    }
    Ok(())
}

/// Pick the point in [lo, hi] with the smallest characteristic residual.
fn polish(g: &Mat4, params: &BeamParams, piece: Piece, lo: f64, hi: f64) -> Result<f64> {
    let mut best = (0.5 * (lo + hi), f64::INFINITY);
    for s in [lo, 0.5 * (lo + hi), hi] {
        let r = eval_at(g, params, piece, s)?.1.residual();
        if r < best.1 {
            best = (s, r);
        }
    }
    Ok(best.0)
}

fn push_root(g: &Mat4, params: &BeamParams, piece: Piece, s: f64, opts: &ScanOptions, report: &mut ScanReport) -> Result<()> {
    let (basis, e) = eval_at(g, params, piece, s)?;
    if e.residual() <= opts.accept_tol {
        report.points.push(make_point(g, &basis, &e, opts));
    } else {
        report.warnings.push(ScanWarning {
            lambda: basis.lambda.re,
            residual: e.residual(),
            message: "sign change with a large characteristic residual".into(),
        });
    }
    Ok(())
}

fn make_point(g: &Mat4, basis: &EigenBasis, e: &CharEval, opts: &ScanOptions) -> SpectralPoint {
    let char_det_y = y_for_basis(basis, basis.params.l).ok().map(|y| (g * y - Mat4::identity()).determinant());
    SpectralPoint {
        lambda: basis.lambda,
        c: e.null_vector(),
        residual: e.residual(),
        multiplicity: e.multiplicity(opts.multiplicity_tol).max(1),
        char_det_y,
    }
}

fn golden_min<F: FnMut(f64) -> Result<f64>>(mut f: F, mut a: f64, mut b: f64) -> Result<f64> {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * b.abs().max(1.0) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// Normalized determinant with the column balance frozen, analytic in λ.
fn frozen_det(g: &Mat4, params: &BeamParams, lambda: C64, shift: [f64; 4]) -> Result<C64> {
    let basis = EigenBasis::new(lambda, params)?;
    match basis.kappa() {
        Some(kap) => {
            let z = params.alpha * params.l;
            let cm = char_matrix(g, &x_closed_shifted(z, kap, shift), &x_closed_shifted(-z, kap, shift));
            let norm = C64::new(params.alpha.powi(6), 0.0) * kap.powi(6) * crate::matrix_kit::constants().w0.determinant();
            Ok(cm.determinant() / norm)
        }
        None => Ok(char_eval(g, &basis).det),
    }
}

/// Complex eigenvalues in a rectangle: minima of |D| on a grid refined by the secant method.
pub fn search_complex_spectrum(
    bc: &BoundaryCondition,
    params: &BeamParams,
    re: (f64, f64),
    im: (f64, f64),
    grid: (usize, usize),
    accept_tol: f64,
) -> Result<Vec<SpectralPoint>> {
    require_wellposed(bc, params)?;
    let g = gamma(bc, params)?;
    let (nx, ny) = (grid.0.max(3), grid.1.max(3));
    let at = |i: usize, j: usize| {
        C64::new(re.0 + (re.1 - re.0) * i as f64 / (nx - 1) as f64, im.0 + (im.1 - im.0) * j as f64 / (ny - 1) as f64)
    };
    let mut mags = vec![vec![f64::INFINITY; ny]; nx];
    for (i, row) in mags.iter_mut().enumerate() {
        for (j, m) in row.iter_mut().enumerate() {
            let lam = at(i, j);
            if let Ok(b) = EigenBasis::new(lam, params) {
                *m = char_eval(&g, &b).det.norm();
            }
        }
    }
    let opts = ScanOptions { accept_tol, ..ScanOptions::default() };
    let h = C64::new((re.1 - re.0) / (nx - 1) as f64, 0.0) * 0.1;
    let mut out: Vec<SpectralPoint> = Vec::new();
    for i in 1..nx - 1 {
        for j in 1..ny - 1 {
            let m = mags[i][j];
            let is_min = (i - 1..=i + 1).all(|a| (j - 1..=j + 1).all(|b| (a == i && b == j) || mags[a][b] > m));
            if !is_min {
                continue;
            }
            let start = at(i, j);
            let Some(kap) = EigenBasis::new(start, params)?.kappa() else { continue };
            let shift = super::xmatrix::column_shifts(params.alpha * params.l, kap);
            let (mut x0, mut x1) = (start, start + h);
            let Ok(mut f0) = frozen_det(&g, params, x0, shift) else { continue };
            let Ok(mut f1) = frozen_det(&g, params, x1, shift) else { continue };
            for _ in 0..60 {
                let denom = f1 - f0;
                if denom.norm() == 0.0 {
                    break;
                }
                let x2 = x1 - f1 * (x1 - x0) / denom;
                if !x2.is_finite() || x2.norm() == 0.0 {
                    break;
                }
                x0 = x1;
                f0 = f1;
                x1 = x2;
                match frozen_det(&g, params, x1, shift) {
                    Ok(v) => f1 = v,
                    Err(_) => break,
                }
                if (x1 - x0).norm() <= 1e-14 * x1.norm().max(1e-300) {
                    break;
                }
            }
            let Ok(basis) = EigenBasis::new(x1, params) else { continue };
            let e = char_eval(&g, &basis);
            if e.residual() <= accept_tol && !out.iter().any(|p| (p.lambda - x1).norm() <= 1e-9 * x1.norm()) {
                out.push(make_point(&g, &basis, &e, &opts));
            }
        }
    }
    out.sort_by(|p, q| q.lambda.norm().total_cmp(&p.lambda.norm()));
    Ok(out)
}

/// u(x) = y_λ(x)ᵀc at each node of `rule`.
pub fn eigenfunction(params: &BeamParams, point: &SpectralPoint, rule: &QuadratureRule) -> Result<GridFunction> {
    let basis = EigenBasis::new(point.lambda, params)?;
    Ok(GridFunction::from_fn(rule, |x| (basis.y(x).transpose() * point.c)[0]))
}

/// u(x) = y_λ(x)ᵀc at arbitrary points.
pub fn eigenfunction_at(params: &BeamParams, point: &SpectralPoint, xs: &[f64]) -> Result<Vec<C64>> {
    let basis = EigenBasis::new(point.lambda, params)?;
    Ok(xs.iter().map(|&x| (basis.y(x).transpose() * point.c)[0]).collect())
}

/// Characteristic residual and null vector at a given λ, without root finding.
pub fn spectral_point_at(bc: &BoundaryCondition, params: &BeamParams, lambda: C64) -> Result<SpectralPoint> {
    require_wellposed(bc, params)?;
    let g = gamma(bc, params)?;
    let basis = EigenBasis::new(lambda, params)?;
    let e = char_eval(&g, &basis);
    Ok(make_point(&g, &basis, &e, &ScanOptions::default()))
}
