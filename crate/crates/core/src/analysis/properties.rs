use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::residuals::ZERO_BAND;
use crate::discretize::{cell_gradients, max_abs, ScalarField};
use crate::eigensolver::EigenResult;
use crate::geometry::{diameter, Domain, Mesh, Point, Shape};
use crate::Result;

/// Largest admissible `|max u + min u| / max u`.
pub const SYMMETRY_TOL: f64 = 0.05;
/// Hot spots must lie within this many mesh sizes of a diameter endpoint.
pub const HOTSPOT_MESH_SIZES: f64 = 3.0;
/// Relative tolerance of the cone-slope check.
pub const SLOPE_TOL: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Verdict {
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
}

/// Named verdicts, each with the measured quantity and its threshold.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct PropertyVerdicts {
    pub verdicts: BTreeMap<String, Verdict>,
}

impl PropertyVerdicts {
    pub fn get(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.get(name)
    }

    pub fn passed(&self, name: &str) -> bool {
        self.get(name).is_some_and(|v| v.passed)
    }

    pub fn all_passed(&self) -> bool {
        self.verdicts.values().all(|v| v.passed)
    }

    fn put(&mut self, name: &str, passed: bool, measured: f64, threshold: f64) {
        self.verdicts.insert(
            name.to_string(),
            Verdict {
                passed,
                measured,
                threshold,
            },
        );
    }
}

fn argmax_argmin(values: &[f64]) -> (usize, usize) {
    let (mut imax, mut imin) = (0, 0);
    for (i, &v) in values.iter().enumerate() {
        if v > values[imax] {
            imax = i;
        }
        if v < values[imin] {
            imin = i;
        }
    }
    (imax, imin)
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Diameter endpoint pairs used as hot-spot targets. A disk has a circle of
/// them; the pair through the point of the circle closest to `near` is used.
fn endpoint_pairs(domain: &Domain, near: Point) -> Vec<(Point, Point)> {
    match domain.shape() {
        Shape::Disk { center, radius } => {
            let d = [near[0] - center[0], near[1] - center[1]];
            let n = d[0].hypot(d[1]);
            let e = if n > 0.0 { [d[0] / n, d[1] / n] } else { [1.0, 0.0] };
            vec![(
                [center[0] + radius * e[0], center[1] + radius * e[1]],
                [center[0] - radius * e[0], center[1] - radius * e[1]],
            )]
        }
        _ => diameter(domain, None).pairs,
    }
}

/// Components of `{ sign * u > eps }` (edge-connected) that contain no
/// boundary vertex.
fn closed_components(values: &[f64], mesh: &Mesh, sign: f64, eps: f64) -> usize {
    let inside = |v: usize| sign * values[v] > eps;
    let mut seen = vec![false; values.len()];
    let mut closed = 0;
    let mut stack = Vec::new();
    for start in 0..values.len() {
        if seen[start] || !inside(start) {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut touches = false;
        while let Some(v) = stack.pop() {
            touches |= mesh.is_boundary(v);
            for &w in mesh.neighbors(v) {
                if !seen[w] && inside(w) {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if !touches {
            closed += 1;
        }
    }
    closed
}

/// Median absolute slope of `u` along the segment `a -> b`, sampled at 129
/// points inside the segment (ends trimmed by 2%); `None` if the segment
/// leaves the mesh.
fn median_slope(values: &[f64], mesh: &Mesh, a: Point, b: Point) -> Option<f64> {
    const N: usize = 129;
    let mut samples = Vec::with_capacity(N);
    for k in 0..N {
        let t = 0.02 + 0.96 * k as f64 / (N - 1) as f64;
        let x = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
        samples.push((t, mesh.interpolate(values, x)?));
    }
    let len = dist(a, b);
    let mut slopes: Vec<f64> = samples
        .windows(2)
        .map(|w| ((w[1].1 - w[0].1) / ((w[1].0 - w[0].0) * len)).abs())
        .collect();
    slopes.sort_by(f64::total_cmp);
    Some(slopes[slopes.len() / 2])
}

/// Qualitative properties of a computed eigenfunction.
///
/// `sign_change`, `sup_inf_symmetry`, `hotspot_on_boundary`,
/// `hotspot_at_diameter_endpoints`, `no_closed_nodal_domain` and
/// `cone_slope` (the median slope along the diameter against
/// `lambda_p max|u|`). The cone slope is only measured when the diameter
/// segment lies in the mesh; otherwise it fails with a `NaN` measurement.
pub fn property_checks(res: &EigenResult, domain: &Domain, mesh: &Mesh) -> Result<PropertyVerdicts> {
    res.u.check(mesh)?;
    let u = res.u.values();
    let m = max_abs(u);
    let (imax, imin) = argmax_argmin(u);
    let (umax, umin) = (u[imax], u[imin]);
    let mut out = PropertyVerdicts::default();

    let change = if m > 0.0 { umax.min(-umin) / m } else { 0.0 };
    out.put("sign_change", umin < 0.0 && umax > 0.0, change, 0.0);

    let asym = if umax > 0.0 { (umax + umin).abs() / umax } else { f64::INFINITY };
    out.put("sup_inf_symmetry", asym <= SYMMETRY_TOL, asym, SYMMETRY_TOL);

    let on_boundary = mesh.is_boundary(imax) as u8 + mesh.is_boundary(imin) as u8;
    out.put("hotspot_on_boundary", on_boundary == 2, on_boundary as f64, 2.0);

    let (xmax, xmin) = (mesh.vertices()[imax], mesh.vertices()[imin]);
    let pairs = endpoint_pairs(domain, xmax);
    let mut best = (f64::INFINITY, pairs[0]);
    for &(a, b) in &pairs {
        let d = dist(xmax, a).max(dist(xmin, b)).min(dist(xmax, b).max(dist(xmin, a)));
        if d < best.0 {
            best = (d, (a, b));
        }
    }
    let hot_tol = HOTSPOT_MESH_SIZES * mesh.h();
    out.put("hotspot_at_diameter_endpoints", best.0 <= hot_tol, best.0, hot_tol);

    let eps = ZERO_BAND * m;
    let closed = closed_components(u, mesh, 1.0, eps) + closed_components(u, mesh, -1.0, eps);
    out.put("no_closed_nodal_domain", closed == 0, closed as f64, 0.0);

    let target = res.lambda_p * m;
    let (a, b) = best.1;
    match median_slope(u, mesh, a, b) {
        Some(s) => {
            let rel = (s - target).abs() / target;
            out.put("cone_slope", rel <= SLOPE_TOL, rel, SLOPE_TOL);
        }
        None => out.put("cone_slope", false, f64::NAN, SLOPE_TOL),
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DistanceCheck {
    /// `false` when `u` has no nonpositive (or no positive) vertex.
    pub applicable: bool,
    pub holds: bool,
    /// `min (|x - x0| - v(x))` over the tested pairs, with `v` rescaled so
    /// that `max v = 1 / lambda`.
    pub min_slack: f64,
    pub tol: f64,
    pub worst_pair: Option<(Point, Point)>,
}

/// Check `|x - x0| >= v(x) - tol` for every vertex `x` with `v(x) >= 0` and
/// every `x0` with `v(x0) <= 0`, where `v = u / (lambda max u)` and
/// `tol = 3 h max|grad v|`.
pub fn distance_inequality_check(u: &ScalarField, lambda: f64, mesh: &Mesh) -> Result<DistanceCheck> {
    u.check(mesh)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(crate::Error::arg("lambda", "must be positive"));
    }
    let umax = u.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let inapplicable = DistanceCheck {
        applicable: false,
        holds: false,
        min_slack: f64::NAN,
        tol: f64::NAN,
        worst_pair: None,
    };
    if !(umax > 0.0) {
        return Ok(inapplicable);
    }
    let scale = 1.0 / (lambda * umax);
    let v: Vec<f64> = u.values().iter().map(|x| x * scale).collect();
    let xs = mesh.vertices();
    let pos: Vec<usize> = (0..v.len()).filter(|&i| v[i] >= 0.0).collect();
    let neg: Vec<usize> = (0..v.len()).filter(|&i| v[i] <= 0.0).collect();
    if neg.is_empty() {
        return Ok(inapplicable);
    }
    let mut grads = Vec::new();
    cell_gradients(&v, mesh, &mut grads);
    let gmax = grads.iter().fold(0.0f64, |m, g| m.max(g[0].hypot(g[1])));
    let tol = HOTSPOT_MESH_SIZES * mesh.h() * gmax;
    let mut worst = (f64::INFINITY, None);
    for &i in &pos {
        for &j in &neg {
            let slack = dist(xs[i], xs[j]) - v[i];
            if slack < worst.0 {
                worst = (slack, Some((xs[i], xs[j])));
            }
        }
    }
    Ok(DistanceCheck {
        applicable: true,
        holds: worst.0 >= -tol,
        min_slack: worst.0,
        tol,
        worst_pair: worst.1,
    })
}
