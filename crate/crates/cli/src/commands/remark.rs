//! The affine field `u = x1` on the square `(-1, 1)^2` solves the limiting
//! problem with `lambda = 1` only: smaller values break the boundary
//! condition at `x1 = 1`, larger ones the interior equation where
//! `u > 1 / lambda`.

use std::collections::BTreeMap;
use std::path::Path;

use neumann_core::analysis::{infinity_residuals, PointResidual, Region};
use neumann_core::geometry::build_mesh;
use neumann_core::{Domain, ScalarField};
use serde::Serialize;

use crate::output::{create_dir, write_json};
use crate::spec::DomainSpec;
use crate::{Failure, Status};

pub const REMARK_LAMBDAS: [f64; 3] = [0.5, 1.0, 1.3];
/// Fits of an affine field are exact, so only round-off needs slack.
pub const REMARK_TOL: f64 = 1e-8;
pub const REMARK_H: f64 = 0.1;

#[derive(Debug, Clone, Serialize)]
pub struct RemarkEntry {
    pub lambda: f64,
    pub expected_pass: bool,
    pub pass: bool,
    pub n_points: usize,
    pub n_skipped: usize,
    pub max_interior_violation: f64,
    pub max_boundary_violation: f64,
    /// `interior`, `boundary`, `interior+boundary`, or `null` on a pass.
    pub failure_location: Option<String>,
    pub worst_interior: Option<PointResidual>,
    pub worst_boundary: Option<PointResidual>,
    /// Largest residual on each open edge, keyed `x1=-1`, `x1=1`, `x2=-1`,
    /// `x2=1`. Corners are left out.
    pub edge_violations: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RemarkReport {
    pub domain: DomainSpec,
    pub field: String,
    pub h: f64,
    pub tol: f64,
    pub entries: Vec<RemarkEntry>,
    /// Pass at `lambda = 1` and failure at every other value.
    pub pass: bool,
}

pub fn remark_report(h: f64) -> Result<RemarkReport, Failure> {
    let square = Domain::rectangle([-1.0, -1.0], [1.0, 1.0]).map_err(Failure::numerical)?;
    let mesh = build_mesh(&square, h).map_err(|e| Failure::input(format!("--h: {e}")))?;
    let u = ScalarField::from_fn(&mesh, |x| x[0]).map_err(Failure::numerical)?;
    let mut entries = Vec::new();
    for lambda in REMARK_LAMBDAS {
        let r = infinity_residuals(&u, lambda, &mesh, REMARK_TOL).map_err(Failure::numerical)?;
        let worst_interior = r
            .points
            .iter()
            .filter(|q| q.region != Region::Boundary)
            .fold(None, |best: Option<&PointResidual>, q| match best {
                Some(b) if b.residual >= q.residual => Some(b),
                _ => Some(q),
            })
            .cloned();
        let worst_boundary = r.worst(Region::Boundary).cloned();
        let mut edge_violations = BTreeMap::new();
        for q in r.points.iter().filter(|q| q.region == Region::Boundary) {
            let [x, y] = q.location;
            let on = |t: f64| (t.abs() - 1.0).abs() < 1e-12;
            let key = match (on(x), on(y)) {
                (true, false) => format!("x1={}", x.signum()),
                (false, true) => format!("x2={}", y.signum()),
                _ => continue,
            };
            let e = edge_violations.entry(key).or_insert(0.0f64);
            *e = e.max(q.residual);
        }
        let failure_location = match (r.max_interior_violation > REMARK_TOL, r.max_boundary_violation > REMARK_TOL) {
            (false, false) => None,
            (true, false) => Some("interior".to_string()),
            (false, true) => Some("boundary".to_string()),
            (true, true) => Some("interior+boundary".to_string()),
        };
        entries.push(RemarkEntry {
            lambda,
            expected_pass: lambda == 1.0,
            pass: r.pass,
            n_points: r.n_points,
            n_skipped: r.n_skipped,
            max_interior_violation: r.max_interior_violation,
            max_boundary_violation: r.max_boundary_violation,
            failure_location,
            worst_interior,
            worst_boundary,
            edge_violations,
        });
    }
    let pass = entries.iter().all(|e| e.pass == e.expected_pass);
    Ok(RemarkReport {
        domain: DomainSpec::from(&square),
        field: "x1".into(),
        h,
        tol: REMARK_TOL,
        entries,
        pass,
    })
}

/// Write `remark.json`; success iff the scan passes exactly at `lambda = 1`.
pub fn verify_remark(h: f64, out: &Path) -> Result<Status, Failure> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Failure::input(format!("--h: must be positive, got {h}")));
    }
    let report = remark_report(h)?;
    create_dir(out)?;
    write_json(&out.join("remark.json"), &report)?;
    Ok(if report.pass {
        Status::Success
    } else {
        Status::NumericalFailure
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failure_locations() {
        let r = remark_report(REMARK_H).unwrap();
        assert!(r.pass);
        let loc: Vec<Option<&str>> = r.entries.iter().map(|e| e.failure_location.as_deref()).collect();
        assert_eq!(loc, [Some("boundary"), None, Some("interior")]);
        let edges = &r.entries[0].edge_violations;
        assert!(edges["x1=1"] > 0.4 && edges["x1=-1"] > 0.4);
        assert!(edges["x2=1"] <= REMARK_TOL && edges["x2=-1"] <= REMARK_TOL);
        let i = r.entries[2].worst_interior.as_ref().unwrap();
        assert!(i.location[0] > 1.0 / 1.3 && i.location[0] < 1.0);
    }
}
