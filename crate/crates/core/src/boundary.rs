//! Two-point boundary conditions M = (M⁻ | M⁺), well-posedness and the
//! Green's matrices G_M^±.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SVD};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::MatrixJson;
use crate::matrix_kit::{constants, max_norm, wronskian_w, BeamParams, ComplexMatrix, Mat4, C64, ZERO};

/// Default relative threshold for |det M̃| / ‖M̃‖₂⁴.
pub const WELLPOSED_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCondition {
    m: ComplexMatrix,
    name: Option<String>,
}

impl BoundaryCondition {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.shape() != (4, 8) {
            return Err(Error::Shape { expected: "4x8".into(), got: format!("{}x{}", m.nrows(), m.ncols()) });
        }
        if m.iter().any(|z| !z.is_finite()) {
            return Err(Error::Input("boundary matrix entries must be finite".into()));
        }
        Ok(Self { m, name: None })
    }

    pub fn from_blocks(minus: &Mat4, plus: &Mat4) -> Self {
        let m = DMatrix::from_fn(4, 8, |i, j| if j < 4 { minus[(i, j)] } else { plus[(i, j - 4)] });
        Self { m, name: None }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn minus(&self) -> Mat4 {
        Mat4::from_fn(|i, j| self.m[(i, j)])
    }

    pub fn plus(&self) -> Mat4 {
        Mat4::from_fn(|i, j| self.m[(i, j + 4)])
    }

    /// True when every entry has an exactly zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.m.iter().all(|z| z.im == 0.0)
    }

    /// The equivalent condition P·M.
    pub fn left_multiply(&self, p: &Mat4) -> Self {
        Self::from_blocks(&(p * self.minus()), &(p * self.plus()))
    }

    /// Zero every imaginary part with magnitude at most `tol`; fails if a larger one remains.
    pub fn into_real(mut self, tol: f64) -> Result<Self> {
        let worst = self.m.iter().fold(0.0f64, |acc, z| acc.max(z.im.abs()));
        if worst > tol {
            return Err(Error::Consistency(format!("boundary matrix has imaginary part {worst:e}")));
        }
        self.m.iter_mut().for_each(|z| z.im = 0.0);
        Ok(self)
    }

    /// The 4-vector M·𝓑, with 𝓑 stacked as (𝓑⁻; 𝓑⁺).
    pub fn apply(&self, trace: &nalgebra::SVector<C64, 8>) -> nalgebra::Vector4<C64> {
        let mut out = nalgebra::Vector4::zeros();
        for i in 0..4 {
            out[i] = (0..8).map(|j| self.m[(i, j)] * trace[j]).sum();
        }
        out
    }
}

/// Wire format `{"M": <4x8 matrix>, "name": optional}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryConditionJson {
    #[serde(rename = "M")]
    pub m: MatrixJson,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub name: Option<String>,
}

impl From<&BoundaryCondition> for BoundaryConditionJson {
    fn from(bc: &BoundaryCondition) -> Self {
        Self { m: MatrixJson::from_matrix(&bc.m), name: bc.name.clone() }
    }
}

impl TryFrom<BoundaryConditionJson> for BoundaryCondition {
    type Error = Error;

    fn try_from(j: BoundaryConditionJson) -> Result<Self> {
        let mut bc = BoundaryCondition::new(j.m.to_matrix()?)?;
        bc.name = j.name;
        Ok(bc)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TildeDecomposition {
    pub tilde_minus: Mat4,
    pub tilde_plus: Mat4,
    pub tilde: Mat4,
    pub det_tilde: C64,
}

impl TildeDecomposition {
    /// |det M̃| / ‖M̃‖₂⁴, a scale-free measure in [0, 1].
    pub fn relative_det(&self) -> f64 {
        let smax = SVD::new(self.tilde, false, false).singular_values.max();
        if smax == 0.0 {
            0.0
        } else {
            self.det_tilde.norm() / smax.powi(4)
        }
    }
}

pub fn tilde(bc: &BoundaryCondition, params: &BeamParams) -> TildeDecomposition {
    let tilde_minus = bc.minus() * wronskian_w(params, -params.l);
    let tilde_plus = bc.plus() * wronskian_w(params, params.l);
    let tilde = tilde_minus + tilde_plus;
    TildeDecomposition { tilde_minus, tilde_plus, tilde, det_tilde: tilde.determinant() }
}

pub fn is_wellposed(bc: &BoundaryCondition, params: &BeamParams, tol: f64) -> bool {
    tilde(bc, params).relative_det() > tol
}

pub(crate) fn require_wellposed(bc: &BoundaryCondition, params: &BeamParams) -> Result<TildeDecomposition> {
    let td = tilde(bc, params);
    let rel = td.relative_det();
    if rel > WELLPOSED_TOL {
        Ok(td)
    } else {
        Err(Error::NotWellPosed { relative_det: rel })
    }
}

/// The pair (G_M⁻, G_M⁺) and, once computed, the representation matrix Γ(M).
#[derive(Debug, Clone, PartialEq)]
pub struct GreensRep {
    pub g_minus: Mat4,
    pub g_plus: Mat4,
    pub g_gamma: Option<Mat4>,
}

/// G_M^± = M̃⁻¹M̃^±ΩL².
pub fn greens_matrices(bc: &BoundaryCondition, params: &BeamParams) -> Result<GreensRep> {
    let td = require_wellposed(bc, params)?;
    let lu = td.tilde.lu();
    let ol2 = constants().omega_l2;
    let solve = |rhs: Mat4| lu.solve(&rhs).ok_or(Error::NotWellPosed { relative_det: 0.0 });
    let g_minus = solve(td.tilde_minus * ol2)?;
    let g_plus = solve(td.tilde_plus * ol2)?;
    Ok(GreensRep { g_minus, g_plus, g_gamma: None })
}

/// Equivalence of boundary conditions, decided through G⁺.
pub fn equivalent(a: &BoundaryCondition, b: &BoundaryCondition, params: &BeamParams, tol: f64) -> Result<bool> {
    let ga = greens_matrices(a, params)?;
    let gb = greens_matrices(b, params)?;
    Ok(max_norm(&(ga.g_plus - gb.g_plus)) <= tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedBc {
    Q,
    Clamped,
    Free,
    Hinged,
}

impl NamedBc {
    pub const ALL: [NamedBc; 4] = [NamedBc::Q, NamedBc::Clamped, NamedBc::Free, NamedBc::Hinged];

    pub fn as_str(&self) -> &'static str {
        match self {
            NamedBc::Q => "q",
            NamedBc::Clamped => "clamped",
            NamedBc::Free => "free",
            NamedBc::Hinged => "hinged",
        }
    }
}

impl fmt::Display for NamedBc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NamedBc {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "q" => Ok(NamedBc::Q),
            "clamped" => Ok(NamedBc::Clamped),
            "free" => Ok(NamedBc::Free),
            "hinged" => Ok(NamedBc::Hinged),
            other => Err(Error::Input(format!("unknown boundary condition '{other}'"))),
        }
    }
}

fn selector(components: [usize; 4]) -> ComplexMatrix {
    let mut m = DMatrix::from_element(4, 8, ZERO);
    for (row, &col) in components.iter().enumerate() {
        m[(row, col)] = C64::new(1.0, 0.0);
    }
    m
}

/// The boundary condition Q of the infinite-beam kernel, or a unit-selector
/// condition on the trace vector (u(−l), u′(−l), u″(−l), u‴(−l), u(l), …).
pub fn named_bc(name: NamedBc, params: &BeamParams) -> BoundaryCondition {
    let a = params.alpha;
    let m = match name {
        NamedBc::Q => {
            let r = |v: [f64; 8]| v.map(|x| C64::new(x, 0.0));
            let rows = [
                r([0.0, a * a, -SQRT_2 * a, 1.0, 0.0, 0.0, 0.0, 0.0]),
                r([SQRT_2 * a.powi(3), -a * a, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]),
                r([0.0, 0.0, 0.0, 0.0, 0.0, a * a, SQRT_2 * a, 1.0]),
                r([0.0, 0.0, 0.0, 0.0, -SQRT_2 * a.powi(3), -a * a, 0.0, 1.0]),
            ];
            DMatrix::from_fn(4, 8, |i, j| rows[i][j])
        }
        NamedBc::Clamped => selector([0, 1, 4, 5]),
        NamedBc::Free => selector([2, 3, 6, 7]),
        NamedBc::Hinged => selector([0, 2, 4, 6]),
    };
    BoundaryCondition { m, name: Some(name.as_str().to_string()) }
}

/// A Gaussian 4×8 condition (real or complex entries), redrawn until well-posed.
pub fn random_wellposed<R: Rng + ?Sized>(rng: &mut R, params: &BeamParams, real: bool) -> BoundaryCondition {
    loop {
        let m = DMatrix::from_fn(4, 8, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = if real { 0.0 } else { rng.sample(StandardNormal) };
            C64::new(re, im)
        });
        let bc = BoundaryCondition { m, name: None };
        if is_wellposed(&bc, params, WELLPOSED_TOL) {
            return bc;
        }
    }
}

/// A Gaussian 4×4 matrix with condition number below 1e3.
pub fn random_invertible<R: Rng + ?Sized>(rng: &mut R, real: bool) -> Mat4 {
    loop {
        let p = Mat4::from_fn(|_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = if real { 0.0 } else { rng.sample(StandardNormal) };
            C64::new(re, im)
        });
        if crate::matrix_kit::sigma_ratio(&p) > 1e-3 {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix_kit::{diag4, exp_eps_omega, is_pibar4, omega, IM, ONE};
    use rand::SeedableRng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn q_tilde_closed_form(p: &BeamParams) -> Mat4 {
        let s = C64::new(FRAC_1_SQRT_2, 0.0);
        let u_hat = Mat4::new(
            ZERO, IM, -IM, ZERO, //
            ZERO, ONE, ONE, ZERO, //
            IM, ZERO, ZERO, -IM, //
            -ONE, ZERO, ZERO, -ONE,
        ) * s;
        u_hat * exp_eps_omega(C64::new(p.alpha * p.l, 0.0)) * C64::new(4.0 * p.alpha.powi(3), 0.0)
    }

    #[test]
    fn q_tilde_matches_closed_form() {
        for (l, a) in [(1.0, 1.0), (0.5, 2.0), (1.7, 0.6)] {
            let p = BeamParams::new(l, a, 1.3).unwrap();
            let td = tilde(&named_bc(NamedBc::Q, &p), &p);
            let expected = q_tilde_closed_form(&p);
            assert!(max_norm(&(td.tilde - expected)) <= 1e-12 * max_norm(&expected));
            let inv = td.tilde.try_inverse().unwrap();
            assert!(max_norm(&(inv * td.tilde_minus - diag4([0.0, 1.0, 1.0, 0.0]))) < 1e-10);
            assert!(max_norm(&(inv * td.tilde_plus - diag4([1.0, 0.0, 0.0, 1.0]))) < 1e-10);
            assert_eq!(td.tilde, td.tilde_minus + td.tilde_plus);
        }
    }

    #[test]
    fn zero_minus_block() {
        let p = BeamParams::default();
        let bc = BoundaryCondition::from_blocks(&Mat4::zeros(), &Mat4::identity());
        assert_eq!(tilde(&bc, &p).tilde_minus, Mat4::zeros());
    }

    #[test]
    fn wellposedness_of_named_conditions() {
        let p = BeamParams::default();
        for name in NamedBc::ALL {
            assert!(is_wellposed(&named_bc(name, &p), &p, WELLPOSED_TOL), "{name}");
        }
        let zero = BoundaryCondition::new(DMatrix::from_element(4, 8, ZERO)).unwrap();
        assert!(!is_wellposed(&zero, &p, WELLPOSED_TOL));
        assert!(matches!(greens_matrices(&zero, &p), Err(Error::NotWellPosed { .. })));
    }

    #[test]
    fn clamped_tilde_determinant() {
        let p = BeamParams::default();
        let td = tilde(&named_bc(NamedBc::Clamped, &p), &p);
        // Rows of M̃ are rows 1, 2 of W(−l) and rows 1, 2 of W(l).
        let w_m = wronskian_w(&p, -1.0);
        let w_p = wronskian_w(&p, 1.0);
        let direct = Mat4::from_fn(|i, j| if i < 2 { w_m[(i, j)] } else { w_p[(i - 2, j)] });
        assert!((td.det_tilde - direct.determinant()).norm() < 1e-13);
        assert!(td.det_tilde.norm() > 1.0);
    }

    #[test]
    fn greens_matrices_of_q() {
        let p = BeamParams::new(0.8, 1.4, 2.0).unwrap();
        let g = greens_matrices(&named_bc(NamedBc::Q, &p), &p).unwrap();
        let mut gm = Mat4::zeros();
        gm[(1, 3)] = omega(2);
        gm[(2, 0)] = omega(3);
        let mut gp = Mat4::zeros();
        gp[(0, 2)] = omega(1);
        gp[(3, 1)] = omega(4);
        assert!(max_norm(&(g.g_minus - gm)) < 1e-10);
        assert!(max_norm(&(g.g_plus - gp)) < 1e-10);
    }

    #[test]
    fn greens_sum_and_invariance() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(21);
        let p = BeamParams::new(1.0, 1.2, 0.7).unwrap();
        for _ in 0..100 {
            let bc = random_wellposed(&mut rng, &p, false);
            let g = greens_matrices(&bc, &p).unwrap();
            assert!(max_norm(&(g.g_minus + g.g_plus - constants().omega_l2)) < 1e-10);
            let pm = random_invertible(&mut rng, false);
            let g2 = greens_matrices(&bc.left_multiply(&pm), &p).unwrap();
            assert!(max_norm(&(g.g_plus - g2.g_plus)) < 1e-9);
            assert!(max_norm(&(g.g_minus - g2.g_minus)) < 1e-9);
        }
    }

    #[test]
    fn real_conditions_give_pibar_greens_matrices() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(22);
        let p = BeamParams::default();
        for _ in 0..100 {
            let bc = random_wellposed(&mut rng, &p, true);
            assert!(bc.is_real());
            let g = greens_matrices(&bc, &p).unwrap();
            assert!(is_pibar4(&g.g_minus, 1e-9));
            assert!(is_pibar4(&g.g_plus, 1e-9));
        }
    }

    #[test]
    fn equivalence() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(23);
        let p = BeamParams::default();
        let q = named_bc(NamedBc::Q, &p);
        let pq = q.left_multiply(&random_invertible(&mut rng, false));
        assert!(equivalent(&q, &pq, &p, 1e-10).unwrap());
        assert!(equivalent(&q, &q, &p, 0.0).unwrap());
        assert!(!equivalent(&q, &named_bc(NamedBc::Clamped, &p), &p, 1e-6).unwrap());
    }

    #[test]
    fn named_entries() {
        let p = BeamParams::default();
        let q = named_bc(NamedBc::Q, &p);
        assert!((q.matrix()[(1, 0)] - C64::new(SQRT_2, 0.0)).norm() < 1e-15);
        let p2 = BeamParams::new(1.0, 2.0, 1.0).unwrap();
        let q2 = named_bc(NamedBc::Q, &p2);
        assert_eq!(q2.matrix()[(1, 0)].re, SQRT_2 * 8.0);
        assert_eq!(q2.matrix()[(3, 5)].re, -4.0);
        let c = named_bc(NamedBc::Clamped, &p);
        for (row, col) in [0usize, 1, 4, 5].iter().enumerate() {
            for j in 0..8 {
                let expected = if j == *col { 1.0 } else { 0.0 };
                assert_eq!(c.matrix()[(row, j)].re, expected);
            }
        }
        assert!(q.is_real() && c.is_real());
        assert_eq!("Hinged".parse::<NamedBc>().unwrap(), NamedBc::Hinged);
    }

    #[test]
    fn json_round_trip() {
        let p = BeamParams::default();
        let q = named_bc(NamedBc::Q, &p);
        let j = BoundaryConditionJson::from(&q);
        let text = serde_json::to_string(&j).unwrap();
        assert!(text.starts_with("{\"M\":"));
        let back: BoundaryConditionJson = serde_json::from_str(&text).unwrap();
        assert_eq!(BoundaryCondition::try_from(back).unwrap(), q);
    }
}
