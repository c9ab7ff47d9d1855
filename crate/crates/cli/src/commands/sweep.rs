use std::collections::BTreeMap;
use std::fmt::Write as _;

use neumann_core::analysis::{
    distance_inequality_check, infinity_residuals, property_checks, BandCheck, DistanceCheck, PropertyVerdicts,
};
use neumann_core::eigensolver::{sweep_p, Extrapolation};
use neumann_core::geometry::build_mesh;
use neumann_core::{EigenResult, Mesh, SolverOptions, SweepReport};
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::{create_dir, mesh_checksum, p_label, write_csv, write_json, write_text};
use crate::spec::{load_domain, DomainSpec};
use crate::{Failure, Status};

/// Tolerance of the limiting-equation residual on the largest-`p` solution.
/// The discrete eigenfunction is only close to a viscosity solution, so the
/// report is diagnostic and does not enter `verdicts.json`.
pub const LIMIT_RESIDUAL_TOL: f64 = 0.1;

#[derive(Serialize)]
struct MeshInfo {
    vertices: usize,
    cells: usize,
    max_edge_length: f64,
    checksum: String,
}

#[derive(Serialize)]
struct PEntry {
    p: f64,
    lambda_p: f64,
    pw_bound: f64,
    iterations: usize,
    converged: bool,
    euler_residual: f64,
    final_constraint: f64,
    initial_rayleigh: f64,
    candidates: Vec<f64>,
    restart_spread: f64,
    /// `null` for the first exponent.
    warm_start_ratio: f64,
    field_file: Option<String>,
    trace_file: Option<String>,
}

#[derive(Serialize)]
struct SweepFile {
    domain: DomainSpec,
    h: f64,
    mesh: MeshInfo,
    p_schedule: Vec<f64>,
    solver: SolverOptions,
    lambda_inf_exact: f64,
    lambda_inf_estimate: f64,
    extrapolation: Extrapolation,
    complete: bool,
    failure: Option<String>,
    results: Vec<PEntry>,
    verdicts: BTreeMap<String, bool>,
}

#[derive(Serialize)]
struct PropertiesFile {
    p: f64,
    verdicts: PropertyVerdicts,
    distance_inequality: DistanceCheck,
}

#[derive(Serialize)]
struct ResidualsFile {
    p: f64,
    lambda: f64,
    /// `u` is rescaled to `max |u| = 1` before the check.
    tol: f64,
    epsilon: f64,
    n_points: usize,
    n_skipped: usize,
    max_interior_violation: f64,
    max_boundary_violation: f64,
    pass: bool,
    band_checks: Vec<BandCheck>,
}

fn trace_log(res: &EigenResult) -> String {
    let mut s = String::from("iteration rayleigh step constraint\n");
    for t in &res.trace {
        let _ = writeln!(s, "{} {} {:e} {:e}", t.iteration, t.rayleigh, t.step, t.constraint);
    }
    s
}

fn field_rows(res: &EigenResult, mesh: &Mesh) -> Vec<(usize, f64, f64, f64)> {
    mesh.vertices()
        .iter()
        .zip(res.u.values())
        .enumerate()
        .map(|(i, (x, u))| (i, x[0], x[1], *u))
        .collect()
}

/// Run the configured sweep and write its artifacts into `cfg.output_dir`:
///
/// - `sweep.json`: per-exponent results, extrapolation and sweep verdicts
/// - `verdicts.json`: flat map of every boolean verdict
/// - `plotdata.csv`: `p, lambda_p, pw_bound, lambda_inf_exact`
/// - `field_p<p>.csv`, `trace_p<p>.log`: eigenfunctions and solver traces
/// - `properties.json`, `residuals.json`, `residuals.csv`: checks on the
///   largest exponent
///
/// Status 1 when a solve failed; everything computed up to then is written.
pub fn run_sweep(cfg: &RunConfig) -> Result<Status, Failure> {
    let domain = load_domain(&cfg.domain_path)?;
    let mesh = build_mesh(&domain, cfg.h).map_err(|e| Failure::input(format!("field `h`: {e}")))?;
    let report = sweep_p(&domain, &mesh, &cfg.p_schedule, &cfg.solver).map_err(Failure::input)?;
    let out = &cfg.output_dir;
    create_dir(out)?;

    let mut results = Vec::with_capacity(report.results.len());
    for (i, r) in report.results.iter().enumerate() {
        let label = p_label(r.p);
        let field_file = cfg.check("fields").then(|| format!("field_p{label}.csv"));
        let trace_file = cfg.check("traces").then(|| format!("trace_p{label}.log"));
        if let Some(f) = &field_file {
            write_csv(&out.join(f), &["vertex", "x", "y", "u"], &field_rows(r, &mesh))?;
        }
        if let Some(f) = &trace_file {
            write_text(&out.join(f), &trace_log(r))?;
        }
        results.push(PEntry {
            p: r.p,
            lambda_p: r.lambda_p,
            pw_bound: report.pw_bounds[i],
            iterations: r.iterations,
            converged: r.converged,
            euler_residual: r.euler_residual,
            final_constraint: r.final_constraint,
            initial_rayleigh: r.initial_rayleigh,
            candidates: r.candidates.clone(),
            restart_spread: report.restart_spreads[i],
            warm_start_ratio: report.warm_start_ratios[i],
            field_file,
            trace_file,
        });
    }
    let plot: Vec<(f64, f64, f64, f64)> = report
        .results
        .iter()
        .zip(&report.pw_bounds)
        .map(|(r, b)| (r.p, r.lambda_p, *b, report.lambda_inf_exact))
        .collect();
    write_csv(&out.join("plotdata.csv"), &["p", "lambda_p", "pw_bound", "lambda_inf_exact"], &plot)?;

    let mut verdicts = report.verdicts.clone();
    let mut problems = Vec::new();
    if let Some(last) = report.results.last() {
        if cfg.check("properties") {
            match properties(last, &domain, &mesh) {
                Ok(file) => {
                    for (name, v) in &file.verdicts.verdicts {
                        verdicts.insert(name.clone(), v.passed);
                    }
                    let d = &file.distance_inequality;
                    verdicts.insert("distance_inequality".into(), d.applicable && d.holds);
                    write_json(&out.join("properties.json"), &file)?;
                }
                Err(e) => problems.push(format!("property checks: {e}")),
            }
        }
        if cfg.check("residuals") {
            if let Err(e) = residuals(last, &mesh, out) {
                problems.push(format!("limit residuals: {e}"));
            }
        }
    }

    let SweepReport {
        lambda_inf_exact,
        lambda_inf_estimate,
        extrapolation,
        complete,
        failure,
        verdicts: sweep_verdicts,
        ..
    } = report;
    let failure = match (failure, problems.is_empty()) {
        (f, true) => f,
        (None, false) => Some(problems.join("; ")),
        (Some(f), false) => Some(format!("{f}; {}", problems.join("; "))),
    };
    let file = SweepFile {
        domain: DomainSpec::from(&domain),
        h: cfg.h,
        mesh: MeshInfo {
            vertices: mesh.num_vertices(),
            cells: mesh.num_cells(),
            max_edge_length: mesh.max_edge_length(),
            checksum: mesh_checksum(&mesh),
        },
        p_schedule: cfg.p_schedule.clone(),
        solver: cfg.solver.clone(),
        lambda_inf_exact,
        lambda_inf_estimate,
        extrapolation,
        complete: complete && problems.is_empty(),
        failure,
        results,
        verdicts: sweep_verdicts,
    };
    write_json(&out.join("sweep.json"), &file)?;
    write_json(&out.join("verdicts.json"), &verdicts)?;
    Ok(if file.complete {
        Status::Success
    } else {
        Status::NumericalFailure
    })
}

fn properties(
    res: &EigenResult,
    domain: &neumann_core::Domain,
    mesh: &Mesh,
) -> neumann_core::Result<PropertiesFile> {
    Ok(PropertiesFile {
        p: res.p,
        verdicts: property_checks(res, domain, mesh)?,
        distance_inequality: distance_inequality_check(&res.u, res.lambda_p, mesh)?,
    })
}

fn residuals(res: &EigenResult, mesh: &Mesh, out: &std::path::Path) -> Result<(), Failure> {
    let u = res.u.scaled(1.0 / res.u.max_abs());
    let r = infinity_residuals(&u, res.lambda_p, mesh, LIMIT_RESIDUAL_TOL).map_err(Failure::numerical)?;
    let rows: Vec<(f64, f64, &str, f64)> = r
        .points
        .iter()
        .map(|q| (q.location[0], q.location[1], q.region.as_str(), q.residual))
        .collect();
    write_csv(&out.join("residuals.csv"), &["x", "y", "region", "residual"], &rows)?;
    write_json(
        &out.join("residuals.json"),
        &ResidualsFile {
            p: res.p,
            lambda: r.lambda,
            tol: r.tol,
            epsilon: r.epsilon,
            n_points: r.n_points,
            n_skipped: r.n_skipped,
            max_interior_violation: r.max_interior_violation,
            max_boundary_violation: r.max_boundary_violation,
            pass: r.pass,
            band_checks: r.band_checks,
        },
    )
}
