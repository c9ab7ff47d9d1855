mod remark;
mod scan;
mod sweep;

use std::path::Path;

use neumann_core::geometry::geometry_report;

use crate::output::{create_dir, write_json};
use crate::spec::load_domain;
use crate::{Failure, Status};

pub use remark::{verify_remark, RemarkEntry, RemarkReport, REMARK_H, REMARK_LAMBDAS, REMARK_TOL};
pub use scan::{inequality_scan, scan_suite, ScanRow, EQUALITY_TOL, SCAN_HEADER};
pub use sweep::{run_sweep, LIMIT_RESIDUAL_TOL};

/// `geometry.json` for one domain spec.
pub fn geometry(domain_path: &Path, out: &Path) -> Result<Status, Failure> {
    let domain = load_domain(domain_path)?;
    create_dir(out)?;
    write_json(&out.join("geometry.json"), &geometry_report(&domain))?;
    Ok(Status::Success)
}
