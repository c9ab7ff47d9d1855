use std::path::Path;

use neumann_core::geometry::geometry_report;
use serde::Serialize;

use crate::output::{create_dir, write_csv};
use crate::spec::{parse_domain, DomainSpec};
use crate::{Failure, Status};

/// Absolute tolerance for the equality `2 / diam = 1 / R`.
pub const EQUALITY_TOL: f64 = 1e-12;

pub const SCAN_HEADER: [&str; 11] = [
    "name",
    "kind",
    "diam",
    "inradius",
    "volume",
    "lambda_inf_neumann",
    "lambda_inf_dirichlet",
    "lambda_inf_ball",
    "neumann_le_dirichlet",
    "neumann_le_ball",
    "note",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    /// File stem of the spec.
    pub name: String,
    pub kind: String,
    pub diam: f64,
    pub inradius: f64,
    pub volume: f64,
    pub lambda_inf_neumann: f64,
    pub lambda_inf_dirichlet: f64,
    /// Limit eigenvalue of the ball with the same volume.
    pub lambda_inf_ball: f64,
    pub neumann_le_dirichlet: bool,
    pub neumann_le_ball: bool,
    /// `ball` when the two limit eigenvalues coincide.
    pub note: String,
}

impl ScanRow {
    pub fn passed(&self) -> bool {
        self.neumann_le_dirichlet && self.neumann_le_ball
    }
}

/// Evaluate every `*.json` spec in `dir`, sorted by file name. Specs that do
/// not parse are returned as warnings instead of rows.
pub fn scan_suite(dir: &Path) -> Result<(Vec<ScanRow>, Vec<String>), Failure> {
    if !dir.is_dir() {
        return Err(Failure::input(format!("suite directory not found: {}", dir.display())));
    }
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| Failure::input(format!("cannot list {}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for path in files {
        let parsed = std::fs::read_to_string(&path)
            .map_err(|e| e.to_string())
            .and_then(|text| parse_domain(&text));
        let domain = match parsed {
            Ok(d) => d,
            Err(e) => {
                warnings.push(format!("skipping {}: {e}", path.display()));
                continue;
            }
        };
        let g = geometry_report(&domain);
        let ball = g.lambda_inf_ball();
        rows.push(ScanRow {
            name: path.file_stem().unwrap_or_default().to_string_lossy().into_owned(),
            kind: DomainSpec::from(&domain).kind,
            diam: g.diameter,
            inradius: g.inradius,
            volume: g.volume,
            lambda_inf_neumann: g.lambda_inf_neumann,
            lambda_inf_dirichlet: g.lambda_inf_dirichlet,
            lambda_inf_ball: ball,
            neumann_le_dirichlet: g.lambda_inf_neumann <= g.lambda_inf_dirichlet + EQUALITY_TOL,
            neumann_le_ball: g.lambda_inf_neumann <= ball + EQUALITY_TOL,
            note: if (g.lambda_inf_dirichlet - g.lambda_inf_neumann).abs() <= EQUALITY_TOL {
                "ball".into()
            } else {
                String::new()
            },
        });
    }
    Ok((rows, warnings))
}

/// Write `scan.csv`; warnings go to stderr. Fails (status 1) if any verdict
/// is false.
pub fn inequality_scan(dir: &Path, out: &Path) -> Result<Status, Failure> {
    let (rows, warnings) = scan_suite(dir)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    create_dir(out)?;
    write_csv(&out.join("scan.csv"), &SCAN_HEADER, &rows)?;
    Ok(if rows.iter().all(ScanRow::passed) {
        Status::Success
    } else {
        Status::NumericalFailure
    })
}
