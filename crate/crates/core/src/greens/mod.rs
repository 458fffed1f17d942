//! The Green's kernel G_M(x, ξ), the integral operator 𝒦_M by split composite
//! quadrature, boundary traces and the differential-equation residual.

mod quadrature;

pub use quadrature::{GridFunction, Panel, QuadratureRule};

use std::f64::consts::{FRAC_PI_4, SQRT_2};

use nalgebra::SVector;

use crate::boundary::{greens_matrices, BoundaryCondition, GreensRep};
use crate::error::{Error, Result};
use crate::matrix_kit::{constants, wronskian_w, y_vector, BeamParams, Mat4, Vec4, C64};

/// G_M(x, ξ) with the Green's matrices of one boundary condition cached.
#[derive(Debug, Clone)]
pub struct GreensKernel {
    pub params: BeamParams,
    pub rep: GreensRep,
    scale: f64,
}

impl GreensKernel {
    pub fn new(bc: &BoundaryCondition, params: &BeamParams) -> Result<Self> {
        Ok(Self::from_rep(greens_matrices(bc, params)?, params))
    }

    pub fn from_rep(rep: GreensRep, params: &BeamParams) -> Self {
        Self { params: *params, rep, scale: params.alpha / (4.0 * params.k) }
    }

    /// α/(4k)
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn eval(&self, x: f64, xi: f64) -> C64 {
        self.eval_y(&y_vector(&self.params, x), &y_vector(&self.params, xi), x <= xi)
    }

    /// Kernel from precomputed y(x), y(ξ): the G⁺ branch when x ≤ ξ.
    pub fn eval_y(&self, yx: &Vec4, yxi: &Vec4, upper: bool) -> C64 {
        if upper {
            (yx.transpose() * self.rep.g_plus * yxi)[0] * self.scale
        } else {
            -(yx.transpose() * self.rep.g_minus * yxi)[0] * self.scale
        }
    }

    /// 𝒦_M[w](x) with the panel containing x split at x.
    pub fn apply_at(&self, w: &GridFunction, x: f64) -> C64 {
        let rule = &w.rule;
        let yx = y_vector(&self.params, x);
        let p = rule.panel_of(x);
        let mut acc = C64::new(0.0, 0.0);
        for (q, panel) in rule.panels().iter().enumerate() {
            if q == p {
                continue;
            }
            for j in panel.start..panel.start + rule.order() {
                let xj = rule.nodes[j];
                let yj = y_vector(&self.params, xj);
                acc += self.eval_y(&yx, &yj, x <= xj) * w.values[j] * rule.weights[j];
            }
        }
        let panel = rule.panels()[p];
        for (a, b, upper) in [(panel.a, x, false), (x, panel.b, true)] {
            for (s, ws) in rule.sub_rule(a, b) {
                let ys = y_vector(&self.params, s);
                acc += self.eval_y(&yx, &ys, upper) * interpolate_in(w, p, s) * ws;
            }
        }
        acc
    }

    /// f(x_i) = −G⁻∫₋ₗ^{x_i} y w + G⁺∫_{x_i}^l y w at every node.
    pub fn f_at_nodes(&self, w: &GridFunction) -> Vec<Vec4> {
        let rule = &w.rule;
        let ys: Vec<Vec4> = rule.nodes.iter().map(|&x| y_vector(&self.params, x)).collect();
        let panel_moments: Vec<Vec4> = rule
            .panels()
            .iter()
            .map(|panel| {
                (panel.start..panel.start + rule.order()).fold(Vec4::zeros(), |acc, j| acc + ys[j] * (w.values[j] * rule.weights[j]))
            })
            .collect();
        let np = panel_moments.len();
        let mut before = vec![Vec4::zeros(); np];
        let mut after = vec![Vec4::zeros(); np];
        for p in 1..np {
            before[p] = before[p - 1] + panel_moments[p - 1];
        }
        for p in (0..np - 1).rev() {
            after[p] = after[p + 1] + panel_moments[p + 1];
        }
        let mut out = Vec::with_capacity(rule.len());
        for (p, panel) in rule.panels().iter().enumerate() {
            for i in panel.start..panel.start + rule.order() {
                let x = rule.nodes[i];
                let partial = |a: f64, b: f64| {
                    rule.sub_rule(a, b).fold(Vec4::zeros(), |acc, (s, ws)| {
                        acc + y_vector(&self.params, s) * (interpolate_in(w, p, s) * ws)
                    })
                };
                let left = before[p] + partial(panel.a, x);
                let right = after[p] + partial(x, panel.b);
                out.push(-self.rep.g_minus * left + self.rep.g_plus * right);
            }
        }
        out
    }
}

fn interpolate_in(w: &GridFunction, p: usize, s: f64) -> C64 {
    let start = w.rule.panels()[p].start;
    w.rule.interpolation_weights(p, s).iter().enumerate().map(|(j, &c)| w.values[start + j] * c).sum()
}

fn check_domain(params: &BeamParams, x: f64) -> Result<()> {
    let slack = 1e-12 * params.l;
    if x.is_finite() && x.abs() <= params.l + slack {
        Ok(())
    } else {
        Err(Error::OutOfDomain { value: x, l: params.l })
    }
}

fn check_rule(params: &BeamParams, w: &GridFunction) -> Result<()> {
    let l = w.rule.half_length();
    if (l - params.l).abs() > 1e-12 * params.l {
        return Err(Error::Input(format!("quadrature rule is on [-{l}, {l}] but l = {}", params.l)));
    }
    Ok(())
}

pub fn kernel(bc: &BoundaryCondition, params: &BeamParams, x: f64, xi: f64) -> Result<C64> {
    check_domain(params, x)?;
    check_domain(params, xi)?;
    Ok(GreensKernel::new(bc, params)?.eval(x, xi))
}

/// The infinite-beam kernel (α/2k)·e^{−α|x−ξ|/√2}·sin(α|x−ξ|/√2 + π/4).
pub fn closed_form_kernel(params: &BeamParams, x: f64, xi: f64) -> C64 {
    let s = params.alpha * (x - xi).abs() / SQRT_2;
    C64::new(params.alpha / (2.0 * params.k) * (-s).exp() * (s + FRAC_PI_4).sin(), 0.0)
}

pub fn apply_k(bc: &BoundaryCondition, params: &BeamParams, w: &GridFunction) -> Result<GridFunction> {
    check_rule(params, w)?;
    let kern = GreensKernel::new(bc, params)?;
    let values = w.rule.nodes.iter().map(|&x| kern.apply_at(w, x)).collect();
    Ok(GridFunction { rule: w.rule.clone(), values })
}

/// 𝒦_M[w] at arbitrary points of [−l, l].
pub fn apply_k_at_points(bc: &BoundaryCondition, params: &BeamParams, w: &GridFunction, xs: &[f64]) -> Result<Vec<C64>> {
    check_rule(params, w)?;
    for &x in xs {
        check_domain(params, x)?;
    }
    let kern = GreensKernel::new(bc, params)?;
    Ok(xs.iter().map(|&x| kern.apply_at(w, x)).collect())
}

/// ∫ y(ξ)w(ξ)dξ with the global rule.
pub fn moments(params: &BeamParams, w: &GridFunction) -> Vec4 {
    w.rule
        .nodes
        .iter()
        .zip(&w.rule.weights)
        .zip(&w.values)
        .fold(Vec4::zeros(), |acc, ((&x, &wt), &v)| acc + y_vector(params, x) * (v * wt))
}

/// (𝓑⁻; 𝓑⁺) of 𝒦_M[w], from 𝓑^± = ∓(α/4k)·W(±l)·G^∓·∫y w.
pub fn boundary_trace(bc: &BoundaryCondition, params: &BeamParams, w: &GridFunction) -> Result<SVector<C64, 8>> {
    check_rule(params, w)?;
    let kern = GreensKernel::new(bc, params)?;
    Ok(trace_from_moments(&kern, &moments(params, w)))
}

pub(crate) fn trace_from_moments(kern: &GreensKernel, m: &Vec4) -> SVector<C64, 8> {
    let p = &kern.params;
    let s = C64::new(kern.scale(), 0.0);
    let minus = wronskian_w(p, -p.l) * kern.rep.g_plus * m * s;
    let plus = -(wronskian_w(p, p.l) * kern.rep.g_minus * m * s);
    SVector::<C64, 8>::from_fn(|i, _| if i < 4 { minus[i] } else { plus[i - 4] })
}

/// (u, u′, u″, u‴) of u = 𝒦_M[w] at each node, from u⁽ⁿ⁾ = (αⁿ⁺¹/4k)·yᵀΩⁿf.
pub fn derivatives_at_nodes(bc: &BoundaryCondition, params: &BeamParams, w: &GridFunction) -> Result<Vec<[C64; 4]>> {
    check_rule(params, w)?;
    let kern = GreensKernel::new(bc, params)?;
    let om = constants().big_omega;
    let fs = kern.f_at_nodes(w);
    Ok(w.rule
        .nodes
        .iter()
        .zip(&fs)
        .map(|(&x, f)| {
            let y = y_vector(params, x);
            let mut out = [C64::new(0.0, 0.0); 4];
            let mut omn = Mat4::identity();
            for (n, slot) in out.iter_mut().enumerate() {
                *slot = (y.transpose() * omn * f)[0] * (params.alpha.powi(n as i32 + 1) / (4.0 * params.k));
                omn *= om;
            }
            out
        })
        .collect())
}

/// max over nodes of |u⁽⁴⁾ + α⁴u − (α⁴/k)w| for u = 𝒦_M[w], with u⁽⁴⁾ from
/// u⁽⁴⁾ = (α⁵/4k)·yᵀΩ⁴f + (α⁴/4k)·yᵀΩ³f′ and f′ = −ΩL²·y·w.
pub fn de_residual(bc: &BoundaryCondition, params: &BeamParams, w: &GridFunction) -> Result<f64> {
    check_rule(params, w)?;
    let kern = GreensKernel::new(bc, params)?;
    let u = apply_k(bc, params, w)?;
    let c = constants();
    let om3 = c.big_omega.pow(3);
    let om4 = om3 * c.big_omega;
    let a4 = params.alpha.powi(4);
    let fs = kern.f_at_nodes(w);
    let mut worst = 0.0f64;
    for (i, &x) in w.rule.nodes.iter().enumerate() {
        let y = y_vector(params, x);
        let fprime = -(c.omega_l2 * y) * w.values[i];
        let u4 = (y.transpose() * om4 * fs[i])[0] * (params.alpha.powi(5) / (4.0 * params.k))
            + (y.transpose() * om3 * fprime)[0] * (a4 / (4.0 * params.k));
        let r = u4 + u.values[i] * a4 - w.values[i] * (a4 / params.k);
        worst = worst.max(r.norm());
    }
    Ok(worst)
}
