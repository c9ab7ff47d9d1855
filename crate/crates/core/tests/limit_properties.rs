//! Qualitative behaviour of computed eigenfunctions as `p` grows, on a few
//! convex domains.

use neumann_core::analysis::{distance_inequality_check, property_checks};
use neumann_core::eigensolver::{sweep_p, SolverOptions};
use neumann_core::geometry::{build_mesh, intrinsic_diameter};
use neumann_core::Domain;

fn suite() -> Vec<(&'static str, Domain)> {
    let hexagon = (0..6)
        .map(|k| {
            let t = k as f64 * std::f64::consts::PI / 3.0;
            [t.cos(), 0.8 * t.sin()]
        })
        .collect();
    vec![
        ("square", Domain::rectangle([-1.0, -1.0], [1.0, 1.0]).unwrap()),
        ("rectangle", Domain::rectangle([0.0, 0.0], [2.0, 1.0]).unwrap()),
        ("triangle", Domain::convex_polygon(vec![[0.0, 0.0], [1.0, 0.0], [0.3, 0.8]]).unwrap()),
        ("hexagon", Domain::convex_polygon(hexagon).unwrap()),
    ]
}

#[test]
fn symmetry_improves_and_distance_inequality_holds() {
    let opts = SolverOptions {
        restarts: 1,
        ..SolverOptions::default()
    };
    for (name, d) in suite() {
        let m = build_mesh(&d, intrinsic_diameter(&d) / 20.0).unwrap();
        let report = sweep_p(&d, &m, &[2.0, 4.0, 8.0, 16.0, 32.0, 64.0], &opts).unwrap();
        assert!(report.complete, "{name}");
        let asym = |p: f64| {
            let r = report.results.iter().find(|r| r.p == p).unwrap();
            property_checks(r, &d, &m).unwrap().get("sup_inf_symmetry").unwrap().measured
        };
        // both sit at round-off level when the mesh is exactly antisymmetric
        assert!(asym(64.0) <= asym(16.0) + 1e-12, "{name}: {} > {}", asym(64.0), asym(16.0));

        let last = report.results.last().unwrap();
        let dist = distance_inequality_check(&last.u, last.lambda_p, &m).unwrap();
        assert!(dist.applicable && dist.holds, "{name}: {dist:?}");
        let verdicts = property_checks(last, &d, &m).unwrap();
        assert!(verdicts.passed("sign_change") && verdicts.passed("no_closed_nodal_domain"), "{name}");
    }
}
