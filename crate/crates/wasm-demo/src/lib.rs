//! Browser bindings. Each export takes plain numbers and strings and returns a
//! JSON document; the pure `*_json` functions behind them also run natively.

use beam_bvp::boundary::{named_bc, BoundaryCondition, BoundaryConditionJson, NamedBc};
use beam_bvp::existence::construct_bc_for_eigenvalue;
use beam_bvp::greens::{apply_k_at_points, kernel, GridFunction, QuadratureRule};
use beam_bvp::matrix_kit::{BeamParams, C64};
use beam_bvp::nystrom::{nearest_relative, nystrom_spectrum};
use beam_bvp::spectral::{scan_real_spectrum, spec_q};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

type Out = Result<Value, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn params(l: f64, alpha: f64, k: f64) -> Result<BeamParams, String> {
    BeamParams::new(l, alpha, k).map_err(err)
}

/// `q`, `clamped`, `free`, `hinged`, or a boundary-condition JSON document.
fn condition(text: &str, p: &BeamParams) -> Result<BoundaryCondition, String> {
    let text = text.trim();
    if !text.starts_with('{') {
        return text.parse::<NamedBc>().map(|name| named_bc(name, p)).map_err(err);
    }
    let j: BoundaryConditionJson = serde_json::from_str(text).map_err(err)?;
    BoundaryCondition::try_from(j).map_err(err)
}

fn grid(l: f64, points: usize) -> Vec<f64> {
    let n = points.max(2);
    (0..n).map(|i| -l + 2.0 * l * i as f64 / (n - 1) as f64).collect()
}

pub fn kernel_json(bc: &str, l: f64, alpha: f64, k: f64, xi: f64, points: usize) -> Out {
    let p = params(l, alpha, k)?;
    let bc = condition(bc, &p)?;
    let xs = grid(p.l, points);
    let g = xs.iter().map(|&x| kernel(&bc, &p, x, xi).map(|z| z.re)).collect::<Result<Vec<_>, _>>().map_err(err)?;
    let rule = QuadratureRule::with_nodes(p.l, 120).map_err(err)?;
    let ones = GridFunction::from_fn(&rule, |_| C64::new(1.0, 0.0));
    let u: Vec<f64> = apply_k_at_points(&bc, &p, &ones, &xs).map_err(err)?.iter().map(|z| z.re).collect();
    Ok(json!({ "x": xs, "kernel": g, "deflection": u }))
}

pub fn spectrum_json(bc: &str, l: f64, alpha: f64, k: f64, a: f64, b: f64) -> Out {
    let p = params(l, alpha, k)?;
    let bc = condition(bc, &p)?;
    let rep = scan_real_spectrum(&bc, &p, (a, b), 4000).map_err(err)?;
    let points: Vec<Value> = rep.points.iter().map(|q| json!({ "lambda": q.lambda.re, "residual": q.residual, "multiplicity": q.multiplicity })).collect();
    Ok(json!({ "points": points, "warnings": rep.warnings }))
}

pub fn spec_q_json(l: f64, alpha: f64, k: f64, count: usize) -> Out {
    let p = params(l, alpha, k)?;
    let s = spec_q(&p, count).map_err(err)?;
    Ok(json!({ "intrinsic_length": p.intrinsic_length(), "mu": s.mu, "nu": s.nu }))
}

pub fn construct_json(lambda: f64, l: f64, alpha: f64, k: f64, nodes: usize) -> Out {
    let p = params(l, alpha, k)?;
    let c = construct_bc_for_eigenvalue(lambda, &p).map_err(err)?;
    let check = if nodes > 0 {
        let ny = nystrom_spectrum(&c.bc, &p, nodes, 40).map_err(err)?;
        json!({ "nodes": nodes, "relative_error": nearest_relative(&ny, C64::new(lambda, 0.0)) })
    } else {
        Value::Null
    };
    Ok(json!({ "lambda": lambda, "bc": BoundaryConditionJson::from(&c.bc), "residual": c.residual, "nystrom": check }))
}

fn export(r: Out) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

/// Kernel G(x, xi) and the deflection under a unit load, sampled at `points` nodes.
#[wasm_bindgen]
pub fn kernel_and_deflection(bc: &str, l: f64, alpha: f64, k: f64, xi: f64, points: usize) -> Result<String, JsError> {
    export(kernel_json(bc, l, alpha, k, xi, points))
}

#[wasm_bindgen]
pub fn spectrum(bc: &str, l: f64, alpha: f64, k: f64, a: f64, b: f64) -> Result<String, JsError> {
    export(spectrum_json(bc, l, alpha, k, a, b))
}

#[wasm_bindgen]
pub fn spec_q_values(l: f64, alpha: f64, k: f64, count: usize) -> Result<String, JsError> {
    export(spec_q_json(l, alpha, k, count))
}

/// Real boundary condition with `lambda` as an eigenvalue, checked by Nystrom with `nodes` nodes.
#[wasm_bindgen]
pub fn construct(lambda: f64, l: f64, alpha: f64, k: f64, nodes: usize) -> Result<String, JsError> {
    export(construct_json(lambda, l, alpha, k, nodes))
}
