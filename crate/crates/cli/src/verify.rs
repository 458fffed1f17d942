use beam_bvp::boundary::{greens_matrices, named_bc, random_invertible, random_wellposed, tilde, NamedBc};
use beam_bvp::existence::construct_bc_for_eigenvalue;
use beam_bvp::greens::{boundary_trace, closed_form_kernel, de_residual, kernel, GridFunction, QuadratureRule};
use beam_bvp::matrix_kit::{
    constants, diag4, is_pibar4, max_norm, pibar_defect4, real_to_pibar4, BeamParams, Mat4, C64, IM,
};
use beam_bvp::nystrom::{nearest_relative, nystrom_spectrum};
use beam_bvp::representation::{gamma, gamma_inverse, gamma_inverse_real};
use beam_bvp::spectral::{
    p_matrix, p_minus, p_plus, scan_real_spectrum, spec_q, x_closed, x_degenerate, x_matrix, y_matrix, EigenBasis,
};
use rand::{Rng, SeedableRng};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub value: f64,
    pub tolerance: f64,
}

fn rel(a: &Mat4, b: &Mat4) -> f64 {
    max_norm(&(a - b)) / max_norm(b).max(1.0)
}

fn conj(m: &Mat4) -> Mat4 {
    m.map(|z| z.conj())
}

struct Suite(Vec<CheckResult>);

impl Suite {
    fn check(&mut self, name: &'static str, value: f64, tolerance: f64) {
        self.0.push(CheckResult { name, pass: value <= tolerance, value, tolerance });
    }
}

pub fn run() -> Vec<CheckResult> {
    let c = constants();
    let id = Mat4::identity();
    let p = BeamParams::default();
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    let mut s = Suite(Vec::new());

    s.check("W0 inverse equals W0*/4", rel(&(c.w0 * c.w0.adjoint() * C64::new(0.25, 0.0)), &id), 1e-14);
    s.check("Omega^4 = -I", max_norm(&(c.big_omega.pow(4) + id)), 1e-14);
    s.check("R Omega R = conj Omega", max_norm(&(c.r4 * c.big_omega * c.r4 - conj(&c.big_omega))), 1e-14);
    s.check("L Omega L^-1 = i Omega", max_norm(&(c.lmat * c.big_omega * c.lmat_inv - c.big_omega * IM)), 1e-14);
    s.check("L^2 Omega = -Omega L^2", max_norm(&(c.l2 * c.big_omega + c.big_omega * c.l2)), 1e-14);
    s.check("U4 unitary and conj U4 = U4 R", max_norm(&(c.u4 * c.u4.adjoint() - id)).max(max_norm(&(conj(&c.u4) - c.u4 * c.r4))), 1e-14);

    let q = named_bc(NamedBc::Q, &p);
    let kq = (0..50)
        .flat_map(|i| (0..50).map(move |j| (-1.0 + i as f64 / 24.5, -1.0 + j as f64 / 24.5)))
        .map(|(x, xi)| (kernel(&q, &p, x, xi).unwrap() - closed_form_kernel(&p, x, xi)).norm())
        .fold(0.0, f64::max);
    s.check("Q kernel equals the infinite-beam kernel", kq, 1e-12);
    let td = tilde(&q, &p);
    let inv = td.tilde.try_inverse().unwrap_or(id);
    s.check("Q splits as diag(0,1,1,0) + diag(1,0,0,1)", max_norm(&(inv * td.tilde_minus - diag4([0.0, 1.0, 1.0, 0.0]))), 1e-10);
    s.check("Gamma(Q) = 0", max_norm(&gamma(&q, &p).unwrap()), 1e-10);

    let mut sum = 0.0f64;
    let mut inv_row = 0.0f64;
    let mut trip = 0.0f64;
    let mut trip_real = 0.0f64;
    let mut real_ok = true;
    let mut pibar = 0.0f64;
    for _ in 0..50 {
        let bc = random_wellposed(&mut rng, &p, false);
        let g = greens_matrices(&bc, &p).unwrap();
        sum = sum.max(rel(&(g.g_minus + g.g_plus), &c.omega_l2));
        let row = bc.left_multiply(&random_invertible(&mut rng, false));
        inv_row = inv_row.max(rel(&gamma(&row, &p).unwrap(), &gamma(&bc, &p).unwrap()));
        let gc = Mat4::from_fn(|_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        trip = trip.max(rel(&gamma(&gamma_inverse(&gc, &p), &p).unwrap(), &gc));
        let gr = real_to_pibar4(&nalgebra::Matrix4::from_fn(|_, _| rng.gen_range(-1.0..1.0)));
        let back = gamma_inverse_real(&gr, &p).unwrap();
        real_ok &= back.is_real();
        trip_real = trip_real.max(rel(&gamma(&back, &p).unwrap(), &gr));
        let real_bc = random_wellposed(&mut rng, &p, true);
        let gg = gamma(&real_bc, &p).unwrap();
        pibar = pibar.max(pibar_defect4(&gg) / max_norm(&gg).max(1.0));
    }
    s.check("G- + G+ = Omega L^2", sum, 1e-10);
    s.check("Gamma is invariant under row operations", inv_row, 1e-9);
    s.check("Gamma inverse round trip", trip, 1e-9);
    s.check("real-branch Gamma inverse round trip", trip_real, 1e-9);
    s.check("real-branch output is exactly real", if real_ok { 0.0 } else { 1.0 }, 0.0);
    s.check("real conditions give Gamma in pibar(4)", pibar, 1e-9);

    let mut rot = 0.0f64;
    let mut refl = 0.0f64;
    let mut diff = 0.0f64;
    let mut ypib = 0.0f64;
    for _ in 0..50 {
        let z = rng.gen_range(-3.0..3.0);
        let kap = C64::from_polar(rng.gen_range(0.05..3.0), rng.gen_range(0.0..std::f64::consts::FRAC_PI_2));
        let x = x_closed(z, kap);
        rot = rot.max(rel(&x_closed(z, IM * kap), &(x * c.lmat_inv)));
        refl = refl.max(rel(&(c.r4 * conj(&x) * c.r4), &x_closed(z, kap.conj())));
        let lam = C64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-1.0..1.0));
        let xp = rng.gen_range(-1.0..1.0);
        let b = EigenBasis::new(lam, &p).unwrap();
        let lhs = x_matrix(lam, xp, &p).unwrap() - x_matrix(lam, -xp, &p).unwrap();
        let w = |x: f64| beam_bvp::matrix_kit::wronskian_w_inv(&p, x) * b.w_matrix(x);
        diff = diff.max(rel(&lhs, &(c.eps * (w(xp) - w(-xp)))));
        let real_lam = rng.gen_range(-3.0..4.0);
        if let Ok(y) = y_matrix(C64::new(real_lam, 0.0), p.l, &p) {
            ypib = ypib.max(pibar_defect4(&y) / max_norm(&y).max(1.0));
        }
    }
    s.check("X(z, i kappa) = X(z, kappa) L^-1", rot, 1e-10);
    s.check("R conj X(z, kappa) R = X(z, conj kappa)", refl, 1e-10);
    s.check("X(x) - X(-x) difference identity", diff, 1e-10);
    s.check("Y_lambda(l) in pibar(4) for real lambda", ypib, 1e-9);

    let mut block = 0.0f64;
    let mut detf = 0.0f64;
    for z in [-1.0, 0.0, 0.7, 2.5] {
        let lhs = c.v * p_matrix(z) * c.v_hat;
        let (pp, pm) = (p_plus(z), p_minus(z));
        let s2 = std::f64::consts::SQRT_2;
        let mut want = Mat4::zeros();
        for i in 0..2 {
            for j in 0..2 {
                want[(i, j)] = pp[(i, j)] * s2;
                want[(i + 2, j + 2)] = pm[(i, j)] * s2;
            }
        }
        block = block.max(rel(&lhs, &want));
        let det = x_degenerate(z, 1.3).determinant();
        let formula = -(-2.0 * s2 * z).exp() / (64.0 * 1.3f64.powi(6)) * pp.determinant() * pm.determinant();
        detf = detf.max((det - formula).norm() / formula.norm());
    }
    s.check("V P V^ block factorization", block, 1e-10);
    s.check("det X at lambda = 1/k factorization", detf, 1e-10);

    let sq = spec_q(&p, 3).unwrap();
    let inside = sq.roots.iter().all(|&r| r > 0.0 && r < 1.0 / p.k);
    s.check("Spec K_Q lies in (0, 1/k)", if inside { 0.0 } else { 1.0 }, 0.0);
    let ny_q = nystrom_spectrum(&q, &p, 400, 8).unwrap();
    let dq = sq.roots.iter().map(|&r| nearest_relative(&ny_q, C64::new(r, 0.0))).fold(0.0, f64::max);
    s.check("Spec K_Q matches the Nystrom oracle", dq, 1e-6);

    let clamped = named_bc(NamedBc::Clamped, &p);
    let roots = scan_real_spectrum(&clamped, &p, (1e-4, 1.0), 4000).unwrap().points;
    let ny = nystrom_spectrum(&clamped, &p, 400, 10).unwrap();
    let dc = roots.iter().take(5).map(|r| nearest_relative(&ny, r.lambda)).fold(0.0, f64::max);
    s.check("clamped roots match the Nystrom oracle", if roots.len() >= 5 { dc } else { f64::INFINITY }, 1e-5);

    let rule = QuadratureRule::with_nodes(p.l, 200).unwrap();
    let w = GridFunction::from_fn(&rule, |x| C64::new((2.0 * x).cos() + x * x, 0.0));
    let de = de_residual(&clamped, &p, &w).unwrap();
    let mb = clamped.apply(&boundary_trace(&clamped, &p, &w).unwrap()).norm();
    s.check("K_M[w] solves the beam equation", de, 1e-6);
    s.check("K_M[w] satisfies the boundary condition", mb, 1e-9);

    let mut worst = 0.0f64;
    for lambda in [-1.0, 2.0, 3.0] {
        worst = worst.max(match construct_bc_for_eigenvalue(lambda, &p) {
            Ok(cons) if cons.bc.is_real() && is_pibar4(&cons.g, 1e-12) => {
                let ny = nystrom_spectrum(&cons.bc, &p, 400, 40).unwrap();
                nearest_relative(&ny, C64::new(lambda, 0.0))
            }
            _ => f64::INFINITY,
        });
    }
    s.check("constructed real conditions realize lambda = -1, 2, 3", worst, 1e-4);
    s.0
}

pub fn table(results: &[CheckResult]) -> String {
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for r in results {
        let status = if r.pass { "PASS" } else { "FAIL" };
        out.push_str(&format!("{:<width$}: {status}  ({:.2e} <= {:.0e})\n", r.name, r.value, r.tolerance));
    }
    out
}
