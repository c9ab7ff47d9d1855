use std::f64::consts::PI;

use neumann_core::discretize::{p_norm, project_constraint, rayleigh_quotient, relative_constraint};
use neumann_core::eigensolver::{solve, sweep_p, upper_bound_certificate, SolverOptions};
use neumann_core::geometry::build_mesh;
use neumann_core::{Domain, ScalarField};

fn interval() -> Domain {
    Domain::interval(0.0, 1.0).unwrap()
}

/// First nontrivial Neumann eigenvalue of the unit interval.
fn closed_form_1d(p: f64) -> f64 {
    (p - 1.0).powf(1.0 / p) * 2.0 * PI / (p * (PI / p).sin())
}

#[test]
fn interval_p2_error_shrinks_under_refinement() {
    let d = interval();
    let opts = SolverOptions::default();
    let errors: Vec<f64> = [16.0, 32.0, 64.0]
        .iter()
        .map(|n| {
            let m = build_mesh(&d, 1.0 / n).unwrap();
            (solve(&d, &m, 2.0, &opts).unwrap().lambda_p - PI).abs()
        })
        .collect();
    for w in errors.windows(2) {
        assert!(w[1] <= 0.6 * w[0], "{errors:?}");
    }
}

#[test]
fn interval_sweep_follows_the_closed_form() {
    let d = interval();
    let m = build_mesh(&d, 1.0 / 128.0).unwrap();
    let report = sweep_p(&d, &m, &[2.0, 4.0, 8.0, 16.0, 32.0, 64.0], &SolverOptions::default()).unwrap();
    assert!(report.complete);
    for r in &report.results {
        let exact = closed_form_1d(r.p);
        assert!((r.lambda_p - exact).abs() <= 0.02 * exact, "p = {}: {} vs {exact}", r.p, r.lambda_p);
        assert!((p_norm(&r.u, r.p, &m).unwrap() - 1.0).abs() <= 1e-9);
        assert!(relative_constraint(&r.u, r.p, &m).unwrap().abs() <= 1e-10);
        assert!(r.lambda_p > 0.0);
    }
    assert!(report.verdicts["pw_holds"] && report.verdicts["warm_start_continuity"]);
}

#[test]
fn converged_solves_are_stationary() {
    let d = Domain::rectangle([0.0, 0.0], [2.0, 1.0]).unwrap();
    let m = build_mesh(&d, 0.1).unwrap();
    for p in [2.0, 4.0] {
        let r = solve(&d, &m, p, &SolverOptions::default()).unwrap();
        assert!(r.converged && r.euler_residual <= 1e-3, "p = {p}: {}", r.euler_residual);
        assert!(r.trace.windows(2).all(|w| w[1].rayleigh <= w[0].rayleigh));
    }
}

#[test]
fn minimizer_beats_certificates_everywhere() {
    let d = Domain::convex_polygon(vec![[0.0, 0.0], [1.0, 0.0], [0.3, 0.8]]).unwrap();
    let m = build_mesh(&d, 0.05).unwrap();
    for p in [2.0, 8.0] {
        let r = solve(&d, &m, p, &SolverOptions::default()).unwrap();
        for x0 in [[0.0, 0.0], [1.0, 0.0], [0.3, 0.8], d.centroid(), [0.5, 0.2]] {
            let bound = upper_bound_certificate(&m, &d, x0, p).unwrap();
            assert!(r.lambda_p <= bound + 1e-9, "p = {p}, x0 = {x0:?}");
        }
        let bumps = ScalarField::from_fn(&m, |x| (7.0 * x[0]).sin() + x[1] * x[1]).unwrap();
        let w = project_constraint(&bumps, p, &m).unwrap();
        assert!(r.lambda_p <= rayleigh_quotient(&w, p, &m).unwrap() + 1e-9);
    }
}

#[test]
fn identical_seeds_give_identical_bits() {
    let d = Domain::disk([0.3, -0.2], 0.8).unwrap();
    let m = build_mesh(&d, 0.1).unwrap();
    let opts = SolverOptions {
        seed: 17,
        ..SolverOptions::default()
    };
    let a = solve(&d, &m, 6.0, &opts).unwrap();
    let b = solve(&d, &m, 6.0, &opts).unwrap();
    assert_eq!(a.lambda_p.to_bits(), b.lambda_p.to_bits());
    assert!(a.u.values().iter().zip(b.u.values()).all(|(x, y)| x.to_bits() == y.to_bits()));
    assert_eq!(a.trace, b.trace);
}
