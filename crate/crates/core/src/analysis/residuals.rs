//! Pointwise residuals of the limiting problem and of the p-Laplace
//! equation, evaluated on local quadratic fits.
//!
//! Interior points use the three-region operator of the limit equation.
//! At boundary points the second-order terms drop out: a test function
//! touching at a boundary point can be given any curvature in the normal
//! direction, so the viscosity boundary alternatives reduce to
//!
//! | region  | `du/dn > tol`              | `du/dn < -tol`               |
//! |---------|----------------------------|------------------------------|
//! | `u > 0` | need `|grad u| <= lambda u` | violated                    |
//! | `u < 0` | violated                   | need `|grad u| <= lambda |u|` |
//! | `u = 0` | violated                   | violated                     |
//!
//! and `|du/dn| <= tol` always passes.

use alloc::vec::Vec;

use super::fit::quadratic_fit;
use crate::discretize::{max_abs, ScalarField};
use crate::geometry::{Mesh, Point};
use crate::{Error, Result};

/// Sign band of the three-region split, relative to `max |u|`.
pub const ZERO_BAND: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Region {
    Positive,
    Negative,
    Zero,
    Boundary,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::Positive => "positive",
            Region::Negative => "negative",
            Region::Zero => "zero",
            Region::Boundary => "boundary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PointResidual {
    pub vertex: usize,
    pub location: Point,
    pub region: Region,
    /// Violation magnitude; zero when the condition holds.
    pub residual: f64,
}

/// Maxima recomputed with another sign band.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BandCheck {
    pub epsilon: f64,
    pub max_interior_violation: f64,
    pub max_boundary_violation: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ResidualReport {
    pub lambda: f64,
    pub tol: f64,
    pub epsilon: f64,
    pub n_points: usize,
    /// Vertices whose stencil was too small or degenerate for a fit.
    pub n_skipped: usize,
    pub max_interior_violation: f64,
    pub max_boundary_violation: f64,
    pub pass: bool,
    /// The same check with half and twice the sign band.
    pub band_checks: Vec<BandCheck>,
    pub points: Vec<PointResidual>,
}

impl ResidualReport {
    /// Point with the largest violation in `region` (first on ties).
    pub fn worst(&self, region: Region) -> Option<&PointResidual> {
        self.points
            .iter()
            .filter(|r| r.region == region)
            .fold(None, |best: Option<&PointResidual>, r| match best {
                Some(b) if b.residual >= r.residual => Some(b),
                _ => Some(r),
            })
    }
}

struct Sample {
    vertex: usize,
    u: f64,
    grad_norm: f64,
    normal_derivative: f64,
    inf_lap: f64,
    boundary: bool,
}

fn interior_violation(s: &Sample, lambda: f64, eps: f64) -> (Region, f64) {
    if s.u > eps {
        let r = (s.grad_norm - lambda * s.u).min(-s.inf_lap);
        (Region::Positive, r.abs())
    } else if s.u < -eps {
        let r = (lambda * s.u.abs() - s.grad_norm).max(-s.inf_lap);
        (Region::Negative, r.abs())
    } else {
        (Region::Zero, s.inf_lap.abs())
    }
}

fn boundary_violation(s: &Sample, lambda: f64, eps: f64, tol: f64) -> f64 {
    let dn = s.normal_derivative;
    if dn.abs() <= tol {
        return 0.0;
    }
    if s.u > eps {
        if dn > 0.0 {
            (s.grad_norm - lambda * s.u).max(0.0)
        } else {
            -dn
        }
    } else if s.u < -eps {
        if dn > 0.0 {
            dn
        } else {
            (s.grad_norm - lambda * s.u.abs()).max(0.0)
        }
    } else {
        dn.abs()
    }
}

fn samples(values: &[f64], mesh: &Mesh) -> (Vec<Sample>, usize) {
    let mut out = Vec::with_capacity(values.len());
    let mut skipped = 0;
    for v in 0..mesh.num_vertices() {
        let Some(fit) = quadratic_fit(values, mesh, v) else {
            skipped += 1;
            continue;
        };
        let n = mesh.normal(v);
        out.push(Sample {
            vertex: v,
            u: values[v],
            grad_norm: fit.grad_norm(),
            normal_derivative: fit.grad[0] * n[0] + fit.grad[1] * n[1],
            inf_lap: fit.infinity_laplacian(),
            boundary: mesh.is_boundary(v),
        });
    }
    (out, skipped)
}

fn maxima(samples: &[Sample], lambda: f64, eps: f64, tol: f64) -> (f64, f64) {
    let (mut int, mut bdy) = (0.0f64, 0.0f64);
    for s in samples {
        if s.boundary {
            bdy = bdy.max(boundary_violation(s, lambda, eps, tol));
        } else {
            int = int.max(interior_violation(s, lambda, eps).1);
        }
    }
    (int, bdy)
}

/// Check the limit equation pointwise at every vertex with a usable fit.
///
/// The sign band is `epsilon = 1e-3 max|u|`; the report repeats the maxima
/// for `epsilon / 2` and `2 epsilon`.
pub fn infinity_residuals(u: &ScalarField, lambda: f64, mesh: &Mesh, tol: f64) -> Result<ResidualReport> {
    u.check(mesh)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::arg("lambda", "must be positive"));
    }
    if !(tol >= 0.0) {
        return Err(Error::arg("tol", "must be nonnegative"));
    }
    let values = u.values();
    let eps = ZERO_BAND * max_abs(values);
    let (samples, n_skipped) = samples(values, mesh);
    let points = samples
        .iter()
        .map(|s| {
            let (region, residual) = if s.boundary {
                (Region::Boundary, boundary_violation(s, lambda, eps, tol))
            } else {
                interior_violation(s, lambda, eps)
            };
            PointResidual {
                vertex: s.vertex,
                location: mesh.vertices()[s.vertex],
                region,
                residual,
            }
        })
        .collect();
    let (max_int, max_bdy) = maxima(&samples, lambda, eps, tol);
    let band_checks = [0.5, 2.0]
        .iter()
        .map(|&k| {
            let (i, b) = maxima(&samples, lambda, k * eps, tol);
            BandCheck {
                epsilon: k * eps,
                max_interior_violation: i,
                max_boundary_violation: b,
                pass: i <= tol && b <= tol,
            }
        })
        .collect();
    Ok(ResidualReport {
        lambda,
        tol,
        epsilon: eps,
        n_points: samples.len(),
        n_skipped,
        max_interior_violation: max_int,
        max_boundary_violation: max_bdy,
        pass: max_int <= tol && max_bdy <= tol,
        band_checks,
        points,
    })
}

/// Gradient floor of [`fp_residual`], relative to `max|u| / diam`.
pub const GRADIENT_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FpReport {
    pub max_residual: f64,
    pub n_points: usize,
    /// Vertices below the gradient floor or without a fit.
    pub n_skipped: usize,
    /// No point could be evaluated.
    pub inconclusive: bool,
}

/// Normalised pointwise magnitude of
/// `F_p = -(p-2)|grad u|^(p-4) Lap_inf u - |grad u|^(p-2) Lap u - lambda^p |u|^(p-2) u`
/// at interior vertices.
///
/// Every term is divided by `lambda^p max|u|^(p-1)` in log space (by
/// `max|grad u|^(p-1) / diam` when `lambda = 0`). Vertices with
/// `|grad u| < 1e-6 max|u| / diam` are skipped, as are vertices where
/// `include` is `false`. `diam` is the diagonal of the mesh bounding box.
pub fn fp_residual(u: &ScalarField, p: f64, lambda: f64, mesh: &Mesh, include: Option<&[bool]>) -> Result<FpReport> {
    u.check(mesh)?;
    if !(p > 2.0 && p.is_finite()) {
        return Err(Error::arg("p", "F_p is only evaluated for 2 < p < inf"));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::arg("lambda", "must be nonnegative"));
    }
    if let Some(mask) = include {
        if mask.len() != mesh.num_vertices() {
            return Err(Error::MeshMismatch {
                expected: mesh.num_vertices(),
                got: mask.len(),
            });
        }
    }
    let values = u.values();
    let m = max_abs(values);
    let diam = bounding_diagonal(mesh);
    let floor = GRADIENT_FLOOR * m / diam;
    let mut fits = Vec::new();
    let mut skipped = 0;
    for v in 0..mesh.num_vertices() {
        if mesh.is_boundary(v) || include.is_some_and(|mask| !mask[v]) {
            continue;
        }
        match quadratic_fit(values, mesh, v) {
            Some(f) if f.grad_norm() >= floor && f.grad_norm() > 0.0 => fits.push((v, f)),
            _ => skipped += 1,
        }
    }
    if fits.is_empty() {
        return Ok(FpReport {
            max_residual: f64::NAN,
            n_points: 0,
            n_skipped: skipped,
            inconclusive: true,
        });
    }
    let log_scale = if lambda > 0.0 && m > 0.0 {
        p * lambda.ln() + (p - 1.0) * m.ln()
    } else {
        let gmax = fits.iter().map(|(_, f)| f.grad_norm()).fold(0.0f64, f64::max);
        (p - 1.0) * gmax.ln() - diam.ln()
    };
    let mut worst = 0.0f64;
    for (v, f) in &fits {
        let lg = f.grad_norm().ln();
        let a = (p - 2.0) * f.infinity_laplacian() * ((p - 4.0) * lg - log_scale).exp();
        let b = f.laplacian() * ((p - 2.0) * lg - log_scale).exp();
        let uv = values[*v];
        let c = if lambda > 0.0 && uv != 0.0 {
            ((p * lambda.ln() + (p - 1.0) * uv.abs().ln()) - log_scale).exp().copysign(uv)
        } else {
            0.0
        };
        worst = worst.max((-a - b - c).abs());
    }
    Ok(FpReport {
        max_residual: worst,
        n_points: fits.len(),
        n_skipped: skipped,
        inconclusive: false,
    })
}

fn bounding_diagonal(mesh: &Mesh) -> f64 {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for x in mesh.vertices() {
        for k in 0..2 {
            lo[k] = lo[k].min(x[k]);
            hi[k] = hi[k].max(x[k]);
        }
    }
    (hi[0] - lo[0]).hypot(hi[1] - lo[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_mesh, Domain};

    fn remark(h: f64) -> (Mesh, ScalarField) {
        let m = build_mesh(&Domain::rectangle([-1.0, -1.0], [1.0, 1.0]).unwrap(), h).unwrap();
        let u = ScalarField::from_fn(&m, |x| x[0]).unwrap();
        (m, u)
    }

    #[test]
    fn linear_profile_solves_at_one() {
        for h in [0.1, 0.05] {
            let (m, u) = remark(h);
            let r = infinity_residuals(&u, 1.0, &m, 1e-8).unwrap();
            assert!(r.pass, "h={h}: {} {}", r.max_interior_violation, r.max_boundary_violation);
            assert_eq!(r.n_skipped, 0);
            assert!(r.band_checks.iter().all(|b| b.pass));
        }
    }

    #[test]
    fn small_lambda_fails_on_the_boundary() {
        let (m, u) = remark(0.1);
        let r = infinity_residuals(&u, 0.5, &m, 1e-8).unwrap();
        assert!(!r.pass);
        assert!(r.max_interior_violation <= 1e-8);
        let w = r.worst(Region::Boundary).unwrap();
        assert!((w.residual - 0.5).abs() < 1e-9);
        assert!((w.location[0].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn large_lambda_fails_inside() {
        let (m, u) = remark(0.05);
        let r = infinity_residuals(&u, 1.3, &m, 1e-8).unwrap();
        assert!(!r.pass);
        assert!(r.max_boundary_violation <= 1e-8);
        let w = r.worst(Region::Positive).unwrap();
        assert!(w.location[0] > 1.0 / 1.3);
        // |1 - 1.3 x| at the last interior column x = 0.95
        assert!((r.max_interior_violation - (1.3 * 0.95 - 1.0)).abs() < 1e-9);
    }

    #[test]
    fn fp_refuses_p_two_and_vanishes_on_affine() {
        let (m, u) = remark(0.1);
        assert!(fp_residual(&u, 2.0, 1.0, &m, None).is_err());
        let a = ScalarField::from_fn(&m, |x| 0.3 * x[0] - 0.2 * x[1] + 1.0).unwrap();
        let r = fp_residual(&a, 7.0, 0.0, &m, None).unwrap();
        assert!(!r.inconclusive && r.max_residual < 1e-9, "{:?}", r);
    }

    #[test]
    fn fp_all_skipped_is_inconclusive() {
        let (m, _) = remark(0.25);
        let k = ScalarField::from_fn(&m, |_| 1.0).unwrap();
        let r = fp_residual(&k, 4.0, 1.0, &m, None).unwrap();
        assert!(r.inconclusive);
    }
}
