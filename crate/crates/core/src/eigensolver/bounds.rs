use crate::discretize::{project_constraint, rayleigh_quotient};
use crate::geometry::{geodesic_distance, Domain, Mesh, Point};
use crate::{Error, Result};

/// Payne-Weinberger lower bound `(p-1)^(1/p) 2 pi / (p diam sin(pi/p))` for
/// convex domains. It tends to `2 / diam` as `p -> infinity` and is attained
/// by intervals.
pub fn payne_weinberger_bound(p: f64, diam: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::arg("p", "bound needs 1 < p < inf"));
    }
    if !(diam > 0.0 && diam.is_finite()) {
        return Err(Error::arg("diam", "must be positive"));
    }
    let pi = core::f64::consts::PI;
    Ok(((p - 1.0).ln() / p).exp() * 2.0 * pi / (p * diam * (pi / p).sin()))
}

/// Rayleigh value of the feasible test field `d(., x0) - c_p`, an upper
/// bound for the discrete `Lambda_p` on `mesh`.
///
/// With `x0` at an end of a diameter the bound tends to `2 / diam` from
/// above as `p` grows.
pub fn upper_bound_certificate(mesh: &Mesh, domain: &Domain, x0: Point, p: f64) -> Result<f64> {
    let d = geodesic_distance(domain, x0, mesh)?;
    let w = project_constraint(&d, p, mesh)?;
    rayleigh_quotient(&w, p, mesh)
}
