use neumann_core::geometry::{build_mesh, geodesic_distance, geometry_report, inradius, intrinsic_diameter};
use neumann_core::{Domain, Point};
use proptest::prelude::*;

/// Points on an ellipse at sorted angles: always a convex polygon.
fn convex_polygon(angles: &[f64], a: f64, b: f64, offset: Point) -> Option<Domain> {
    let mut t: Vec<f64> = angles.to_vec();
    t.sort_by(f64::total_cmp);
    t.dedup_by(|x, y| (*x - *y).abs() < 0.05);
    if t.len() < 3 || t[0] + std::f64::consts::TAU - t[t.len() - 1] < 0.05 {
        return None;
    }
    let v: Vec<Point> = t
        .iter()
        .map(|s| [offset[0] + a * s.cos(), offset[1] + b * s.sin()])
        .collect();
    Domain::convex_polygon(v).ok()
}

fn vertex_diameter(v: &[Point]) -> f64 {
    let mut d = 0.0f64;
    for x in v {
        for y in v {
            d = d.max((x[0] - y[0]).hypot(x[1] - y[1]));
        }
    }
    d
}

fn polygon_strategy() -> impl Strategy<Value = Option<Domain>> {
    (
        prop::collection::vec(0.0f64..std::f64::consts::TAU, 3..9),
        0.5f64..3.0,
        0.5f64..3.0,
        -5.0f64..5.0,
        -5.0f64..5.0,
    )
        .prop_map(|(t, a, b, x, y)| convex_polygon(&t, a, b, [x, y]))
}

fn vertices(d: &Domain) -> Vec<Point> {
    match d.shape() {
        neumann_core::Shape::ConvexPolygon { vertices } => vertices.clone(),
        _ => unreachable!(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn convex_diameter_is_the_vertex_maximum(d in polygon_strategy()) {
        let Some(d) = d else { return Ok(()) };
        let diam = intrinsic_diameter(&d);
        prop_assert!((diam - vertex_diameter(&vertices(&d))).abs() <= 1e-12 * diam.max(1.0));
    }

    #[test]
    fn inradius_fits_in_the_diameter_and_ball_dominates(d in polygon_strategy()) {
        let Some(d) = d else { return Ok(()) };
        let g = geometry_report(&d);
        prop_assert!(2.0 * g.inradius <= g.diameter * (1.0 + 1e-12));
        prop_assert!(g.lambda_inf_neumann <= g.lambda_inf_dirichlet + 1e-12);
        prop_assert!(g.lambda_inf_neumann <= 1.0 / g.isodiametric_ball_radius + 1e-12);
    }

    #[test]
    fn scaling_is_exact(d in polygon_strategy(), t in 0.1f64..10.0) {
        let Some(d) = d else { return Ok(()) };
        let s = d.scaled(t).unwrap();
        let (g, gs) = (geometry_report(&d), geometry_report(&s));
        prop_assert!((gs.diameter - t * g.diameter).abs() <= 1e-12 * gs.diameter);
        prop_assert!((inradius(&s) - t * inradius(&d)).abs() <= 1e-3 * gs.inradius);
        prop_assert!((gs.lambda_inf_neumann - g.lambda_inf_neumann / t).abs() <= 1e-12 * gs.lambda_inf_neumann);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn mesh_measures_and_geodesic_lipschitz(d in polygon_strategy(), k in 0usize..3) {
        let Some(d) = d else { return Ok(()) };
        let h = intrinsic_diameter(&d) / 10.0;
        let m = build_mesh(&d, h).unwrap();
        let area = d.volume();
        let cells: f64 = m.cell_measures().iter().sum();
        let weights: f64 = m.vertex_weights().iter().sum();
        prop_assert!(m.cell_measures().iter().all(|&c| c > 0.0));
        prop_assert!((cells - area).abs() <= 1e-9 * area);
        prop_assert!((weights - area).abs() <= 1e-9 * area);
        prop_assert!(m.max_edge_length() <= 1.5 * h);

        let v = vertices(&d);
        let x0 = v[k % v.len()];
        let dist = geodesic_distance(&d, x0, &m).unwrap();
        let xs = m.vertices();
        for c in 0..m.num_cells() {
            let cell = m.cell(c);
            for i in 0..cell.len() {
                let (a, b) = (cell[i], cell[(i + 1) % cell.len()]);
                let edge = (xs[a][0] - xs[b][0]).hypot(xs[a][1] - xs[b][1]);
                prop_assert!((dist.values()[a] - dist.values()[b]).abs() <= edge + 1e-12);
            }
        }
    }
}

#[test]
fn nonconvex_geodesic_is_lipschitz_and_bends() {
    let l = Domain::simple_polygon(vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]]).unwrap();
    let m = build_mesh(&l, 0.1).unwrap();
    let dist = geodesic_distance(&l, [2.0, 0.0], &m).unwrap();
    let xs = m.vertices();
    for c in 0..m.num_cells() {
        let cell = m.cell(c);
        for i in 0..3 {
            let (a, b) = (cell[i], cell[(i + 1) % 3]);
            let edge = (xs[a][0] - xs[b][0]).hypot(xs[a][1] - xs[b][1]);
            assert!((dist.values()[a] - dist.values()[b]).abs() <= edge + 1e-12);
        }
    }
    let far = m.nearest_vertex([0.0, 2.0]);
    assert!((dist.values()[far] - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-9);
}
