use beam_bvp::boundary::{named_bc, random_wellposed, BoundaryCondition, NamedBc};
use beam_bvp::greens::{apply_k_at_points, boundary_trace, de_residual, kernel, GridFunction, QuadratureRule};
use beam_bvp::matrix_kit::{BeamParams, C64};
use rand::SeedableRng;

fn load(x: f64) -> C64 {
    C64::new((2.0 * x).cos() + x * x, 0.3 * (x - 0.2).sin())
}

/// ∫ G_M(x, ξ)w(ξ)dξ by double-exponential quadrature on each side of x.
fn reference(bc: &BoundaryCondition, p: &BeamParams, x: f64) -> C64 {
    let part = |a: f64, b: f64, im: bool| {
        if b - a <= 0.0 {
            return 0.0;
        }
        quadrature::integrate(
            |xi| {
                let v = kernel(bc, p, x, xi).unwrap() * load(xi);
                if im {
                    v.im
                } else {
                    v.re
                }
            },
            a,
            b,
            1e-14,
        )
        .integral
    };
    let re = part(-p.l, x, false) + part(x, p.l, false);
    let im = part(-p.l, x, true) + part(x, p.l, true);
    C64::new(re, im)
}

fn conditions(p: &BeamParams) -> Vec<BoundaryCondition> {
    let mut rng = rand::rngs::StdRng::seed_from_u64(17);
    vec![
        named_bc(NamedBc::Q, p),
        named_bc(NamedBc::Clamped, p),
        named_bc(NamedBc::Free, p),
        random_wellposed(&mut rng, p, true),
        random_wellposed(&mut rng, p, false),
    ]
}

#[test]
fn apply_k_matches_adaptive_quadrature() {
    for p in [BeamParams::default(), BeamParams::new(1.5, 0.8, 2.0).unwrap()] {
        let rule = QuadratureRule::with_nodes(p.l, 200).unwrap();
        let w = GridFunction::from_fn(&rule, load);
        let xs = [-p.l, -0.77 * p.l, -0.1 * p.l, 0.0, 0.333 * p.l, rule.nodes[57], p.l];
        for bc in conditions(&p) {
            let got = apply_k_at_points(&bc, &p, &w, &xs).unwrap();
            for (&x, g) in xs.iter().zip(&got) {
                let e = reference(&bc, &p, x);
                assert!((g - e).norm() <= 1e-10 * e.norm().max(1.0), "{:?} x={x}: {g} vs {e}", bc.name());
            }
        }
    }
}

#[test]
fn clamped_solution_by_finite_differences() {
    let p = BeamParams::new(1.0, 1.4, 0.7).unwrap();
    let bc = named_bc(NamedBc::Clamped, &p);
    let rule = QuadratureRule::with_nodes(p.l, 200).unwrap();
    let real_load = |x: f64| C64::new((2.0 * x).cos() + x * x, 0.0);
    let w = GridFunction::from_fn(&rule, real_load);
    let u = |xs: &[f64]| apply_k_at_points(&bc, &p, &w, xs).unwrap();

    let ends = u(&[-1.0, 1.0]);
    assert!(ends.iter().all(|z| z.norm() <= 1e-13), "{ends:?}");
    let h = 1e-4;
    let d = u(&[-1.0 + h, -1.0 + 2.0 * h, 1.0 - h, 1.0 - 2.0 * h]);
    for (v1, v2) in [(d[0], d[1]), (d[2], d[3])] {
        let slope = (4.0 * v1 - v2) / (2.0 * h);
        assert!(slope.norm() <= 1e-6, "{slope}");
    }

    let h = 0.01;
    let a4 = p.alpha.powi(4);
    for x in [-0.6, -0.2, 0.15, 0.5] {
        let v = u(&[x - 2.0 * h, x - h, x, x + h, x + 2.0 * h]);
        let u4 = (v[0] - v[1] * 4.0 + v[2] * 6.0 - v[3] * 4.0 + v[4]) / h.powi(4);
        let r = u4 + v[2] * a4 - real_load(x) * (a4 / p.k);
        assert!(r.norm() <= 1e-3 * (a4 / p.k), "x={x}: {r}");
    }
}

#[test]
fn boundary_condition_and_equation_hold() {
    let p = BeamParams::default();
    let rule = QuadratureRule::with_nodes(p.l, 200).unwrap();
    let w = GridFunction::from_fn(&rule, load);
    for bc in conditions(&p) {
        let trace = boundary_trace(&bc, &p, &w).unwrap();
        let mb = bc.apply(&trace);
        let scale = bc.matrix().iter().map(|z| z.norm()).fold(0.0, f64::max) * trace.norm();
        assert!(mb.norm() <= 1e-9 * scale.max(1.0), "{:?}: {}", bc.name(), mb.norm());
        let r = de_residual(&bc, &p, &w).unwrap();
        assert!(r <= 1e-6, "{:?}: {r}", bc.name());
    }
}
