use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};
use crate::matrix_kit::C64;

/// Gauss–Legendre nodes and weights on [−1, 1], ascending.
pub(crate) fn reference_rule(order: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = GaussLegendre::new(NonZeroUsize::new(order).expect("order must be positive"));
    let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    /// Index of the panel's first node in the global rule.
    pub start: usize,
}

/// Composite Gauss–Legendre rule on [−l, l] with equal panels.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    l: f64,
    order: usize,
    panels: Vec<Panel>,
    ref_nodes: Vec<f64>,
    ref_weights: Vec<f64>,
    bary: Vec<f64>,
}

impl QuadratureRule {
    pub fn composite(l: f64, panels: usize, order: usize) -> Result<Self> {
        if !(l.is_finite() && l > 0.0) || panels == 0 || order == 0 {
            return Err(Error::Input(format!("invalid quadrature: l={l}, panels={panels}, order={order}")));
        }
        let (ref_nodes, ref_weights) = reference_rule(order);
        let h = 2.0 * l / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        let mut ps = Vec::with_capacity(panels);
        for p in 0..panels {
            let a = -l + h * p as f64;
            let b = if p + 1 == panels { l } else { a + h };
            ps.push(Panel { a, b, start: p * order });
            for (t, w) in ref_nodes.iter().zip(&ref_weights) {
                nodes.push(0.5 * (a + b) + 0.5 * (b - a) * t);
                weights.push(0.5 * (b - a) * w);
            }
        }
        let bary = barycentric_weights(&ref_nodes);
        Ok(Self { nodes, weights, l, order, panels: ps, ref_nodes, ref_weights, bary })
    }

    /// A rule with exactly `n` nodes, preferring 10-point panels.
    pub fn with_nodes(l: f64, n: usize) -> Result<Self> {
        const ORDERS: [usize; 9] = [10, 12, 8, 9, 11, 7, 6, 5, 4];
        if let Some(&q) = ORDERS.iter().find(|&&q| n >= q && n.is_multiple_of(q)) {
            return Self::composite(l, n / q, q);
        }
        if (1..=40).contains(&n) {
            return Self::composite(l, 1, n);
        }
        Err(Error::Input(format!("node count {n} has no panel order in 4..=12")))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn half_length(&self) -> f64 {
        self.l
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }

    /// Index of the panel containing `x` (clamped to the interval).
    pub fn panel_of(&self, x: f64) -> usize {
        let h = 2.0 * self.l / self.panels.len() as f64;
        let p = ((x + self.l) / h).floor();
        (p.max(0.0) as usize).min(self.panels.len() - 1)
    }

    /// Gauss nodes and weights of the panel rule mapped to [a, b].
    pub fn sub_rule(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        self.ref_nodes.iter().zip(&self.ref_weights).map(move |(t, w)| (mid + half * t, half * w))
    }

    /// Lagrange interpolation weights at `x` for the nodes of panel `p`.
    pub fn interpolation_weights(&self, p: usize, x: f64) -> Vec<f64> {
        let panel = self.panels[p];
        let t = (2.0 * x - (panel.a + panel.b)) / (panel.b - panel.a);
        let mut out = vec![0.0; self.order];
        if let Some(j) = self.ref_nodes.iter().position(|&r| r == t) {
            out[j] = 1.0;
            return out;
        }
        let mut total = 0.0;
        for (j, (&r, &bw)) in self.ref_nodes.iter().zip(&self.bary).enumerate() {
            out[j] = bw / (t - r);
            total += out[j];
        }
        out.iter_mut().for_each(|v| *v /= total);
        out
    }

    /// Σ weight_i·f(node_i).
    pub fn integrate<F: FnMut(f64) -> C64>(&self, mut f: F) -> C64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| f(x) * w).sum()
    }
}

fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    nodes
        .iter()
        .enumerate()
        .map(|(j, &xj)| {
            let prod: f64 = nodes.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &xk)| xj - xk).product();
            1.0 / prod
        })
        .collect()
}

/// Values of a function on the nodes of a quadrature rule.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub rule: QuadratureRule,
    pub values: Vec<C64>,
}

impl GridFunction {
    pub fn new(rule: QuadratureRule, values: Vec<C64>) -> Result<Self> {
        if values.len() != rule.len() {
            return Err(Error::Shape { expected: format!("{} values", rule.len()), got: format!("{}", values.len()) });
        }
        Ok(Self { rule, values })
    }

    pub fn from_fn<F: FnMut(f64) -> C64>(rule: &QuadratureRule, f: F) -> Self {
        let values = rule.nodes.iter().copied().map(f).collect();
        Self { rule: rule.clone(), values }
    }

    pub fn zeros(rule: &QuadratureRule) -> Self {
        Self { rule: rule.clone(), values: vec![C64::new(0.0, 0.0); rule.len()] }
    }

    /// Panel-wise polynomial interpolant evaluated at `x`.
    pub fn interpolate(&self, x: f64) -> C64 {
        let p = self.rule.panel_of(x);
        let start = self.rule.panels[p].start;
        self.rule
            .interpolation_weights(p, x)
            .iter()
            .enumerate()
            .map(|(j, &c)| self.values[start + j] * c)
            .sum()
    }

    pub fn norm_inf(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rule: self.rule.clone(), values: self.values.iter().map(|v| v * s).collect() }
    }

    pub fn axpy(&self, a: C64, other: &GridFunction) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(x, y)| x + a * y).collect();
        Self { rule: self.rule.clone(), values }
    }
}
