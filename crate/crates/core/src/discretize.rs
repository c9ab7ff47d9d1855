//! P1 calculus on a [`Mesh`]: measure-normalised norms, elementwise
//! gradients, the signed-power constraint and the Rayleigh quotient.
//!
//! All norms use the normalisation `||f||_p^p = (1/|Omega|) int |f|^p`, with
//! vertex-lumped quadrature for `f` and exact cell measures for `grad f`.
//! Every power is evaluated on values divided by their maximum first so that
//! exponents in the hundreds neither overflow nor underflow.

use alloc::vec::Vec;


use crate::geometry::mesh::pairwise_sum;
use crate::geometry::{Mesh, Point};
use crate::{Error, Result};

/// Default relative tolerance of the constraint projection.
pub const CONSTRAINT_TOL: f64 = 1e-12;

/// One value per mesh vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    values: Vec<f64>,
    mesh_id: u64,
}

impl ScalarField {
    pub fn new(mesh: &Mesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.num_vertices() {
            return Err(Error::MeshMismatch {
                expected: mesh.num_vertices(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::arg("values", "field values must be finite"));
        }
        Ok(Self {
            values,
            mesh_id: mesh.id(),
        })
    }

    pub fn from_fn(mesh: &Mesh, f: impl Fn(Point) -> f64) -> Result<Self> {
        Self::new(mesh, mesh.vertices().iter().map(|&p| f(p)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn mesh_id(&self) -> u64 {
        self.mesh_id
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.values)
    }

    /// `t * self`.
    pub fn scaled(&self, t: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * t).collect(),
            mesh_id: self.mesh_id,
        }
    }

    /// `self - c`.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v - c).collect(),
            mesh_id: self.mesh_id,
        }
    }

    pub(crate) fn check(&self, mesh: &Mesh) -> Result<()> {
        if self.mesh_id != mesh.id() || self.values.len() != mesh.num_vertices() {
            return Err(Error::MeshMismatch {
                expected: mesh.num_vertices(),
                got: self.values.len(),
            });
        }
        Ok(())
    }
}

/// Elementwise-constant gradient of the P1 interpolant, one vector per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    pub vectors: Vec<Point>,
}

impl GradientField {
    pub fn magnitudes(&self) -> Vec<f64> {
        self.vectors.iter().map(|g| g[0].hypot(g[1])).collect()
    }
}

pub(crate) fn max_abs(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn check_p(p: f64, min: f64) -> Result<()> {
    if !(p.is_finite() && p >= min) {
        return Err(Error::arg("p", alloc::format!("exponent must be finite and >= {min}, got {p}")));
    }
    Ok(())
}

/// `(sum_i w_i |x_i|^p / vol)^(1/p)`, max-factored.
pub(crate) fn weighted_norm(x: &[f64], w: &[f64], p: f64, vol: f64) -> f64 {
    let m = max_abs(x);
    if m == 0.0 {
        return 0.0;
    }
    let terms: Vec<f64> = x.iter().zip(w).map(|(v, w)| w * (v.abs() / m).powf(p)).collect();
    m * (pairwise_sum(&terms) / vol).powf(1.0 / p)
}

pub fn p_norm(f: &ScalarField, p: f64, mesh: &Mesh) -> Result<f64> {
    f.check(mesh)?;
    check_p(p, 1.0)?;
    Ok(weighted_norm(f.values(), mesh.vertex_weights(), p, mesh.volume()))
}

pub(crate) fn cell_gradients(values: &[f64], mesh: &Mesh, out: &mut Vec<Point>) {
    out.clear();
    for c in 0..mesh.num_cells() {
        let mut g = [0.0, 0.0];
        for (&v, b) in mesh.cell(c).iter().zip(mesh.basis_gradients(c)) {
            g[0] += values[v] * b[0];
            g[1] += values[v] * b[1];
        }
        out.push(g);
    }
}

pub fn gradient(f: &ScalarField, mesh: &Mesh) -> Result<GradientField> {
    f.check(mesh)?;
    let mut vectors = Vec::with_capacity(mesh.num_cells());
    cell_gradients(f.values(), mesh, &mut vectors);
    Ok(GradientField { vectors })
}

pub fn grad_p_norm(f: &ScalarField, p: f64, mesh: &Mesh) -> Result<f64> {
    check_p(p, 1.0)?;
    let g = gradient(f, mesh)?;
    Ok(weighted_norm(&g.magnitudes(), mesh.cell_measures(), p, mesh.volume()))
}

/// Normalised constraint `sum_i w_i |t_i|^(p-2) t_i` for `t = (f - c) / M`
/// together with the scale `sum_i w_i |t_i|^(p-1)` and the derivative
/// magnitude `sum_i w_i |t_i|^(p-2)`, where `M = max |f - c|`.
struct ConstraintEval {
    value: f64,
    scale: f64,
    slope: f64,
    m: f64,
}

fn eval_constraint(x: &[f64], w: &[f64], p: f64, c: f64) -> ConstraintEval {
    let m = x.iter().fold(0.0f64, |m, v| m.max((v - c).abs()));
    if m == 0.0 {
        return ConstraintEval {
            value: 0.0,
            scale: 0.0,
            slope: 0.0,
            m,
        };
    }
    let n = x.len();
    let mut val = Vec::with_capacity(n);
    let mut sc = Vec::with_capacity(n);
    let mut sl = Vec::with_capacity(n);
    for (v, w) in x.iter().zip(w) {
        let t = (v - c) / m;
        let a = t.abs();
        let pw = a.powf(p - 1.0);
        val.push(w * pw.copysign(t));
        sc.push(w * pw);
        sl.push(if a > 0.0 { w * pw / a } else { 0.0 });
    }
    ConstraintEval {
        value: pairwise_sum(&val),
        scale: pairwise_sum(&sc),
        slope: pairwise_sum(&sl),
        m,
    }
}

/// `sum_i w_i |f_i|^(p-2) f_i` (no `1/|Omega|` factor).
pub fn constraint_value(f: &ScalarField, p: f64, mesh: &Mesh) -> Result<f64> {
    f.check(mesh)?;
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::arg("p", "constraint needs 1 < p < inf"));
    }
    let e = eval_constraint(f.values(), mesh.vertex_weights(), p, 0.0);
    Ok(e.value * e.m.powf(p - 1.0))
}

/// Constraint value divided by `sum_i w_i |f_i|^(p-1)`; scale free, in
/// `[-1, 1]`.
pub fn relative_constraint(f: &ScalarField, p: f64, mesh: &Mesh) -> Result<f64> {
    f.check(mesh)?;
    let e = eval_constraint(f.values(), mesh.vertex_weights(), p, 0.0);
    Ok(if e.scale > 0.0 { e.value / e.scale } else { 0.0 })
}

/// The unique `c` with `sum_i w_i |f_i - c|^(p-2) (f_i - c) = 0`.
///
/// The constraint is continuous and strictly decreasing in `c` and changes
/// sign on `[min f, max f]`; safeguarded Newton steps inside a bisection
/// bracket drive the relative residual below `tol`.
pub fn projection_constant(f: &ScalarField, p: f64, mesh: &Mesh, tol: f64) -> Result<f64> {
    f.check(mesh)?;
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::arg("p", "constraint needs 1 < p < inf"));
    }
    shift_root(f.values(), mesh.vertex_weights(), p, tol)
}

pub(crate) fn shift_root(x: &[f64], w: &[f64], p: f64, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if hi - lo <= 1e-14 * lo.abs().max(hi.abs()) || hi == lo {
        return Err(Error::ConstantField);
    }
    let wsum = pairwise_sum(w);
    let mean = pairwise_sum(&x.iter().zip(w).map(|(v, w)| v * w).collect::<Vec<_>>()) / wsum;
    let mut c = mean.clamp(lo, hi);
    let mut best = (f64::INFINITY, c);
    for _ in 0..300 {
        let e = eval_constraint(x, w, p, c);
        let rel = e.value.abs() / e.scale;
        if rel < best.0 {
            best = (rel, c);
        }
        if rel <= tol {
            return Ok(c);
        }
        if e.value > 0.0 {
            lo = c;
        } else {
            hi = c;
        }
        if hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            break;
        }
        let newton = c + e.m * e.value / ((p - 1.0) * e.slope);
        c = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        // keep bisection progress when Newton stalls on one side
        if (c - lo).min(hi - c) < 1e-3 * (hi - lo) && e.value.abs() > 0.5 * e.scale * best.0 {
            c = 0.5 * (lo + hi);
        }
    }
    Ok(best.1)
}

/// `f - c` with `c` from [`projection_constant`] at the default tolerance.
pub fn project_constraint(f: &ScalarField, p: f64, mesh: &Mesh) -> Result<ScalarField> {
    let c = projection_constant(f, p, mesh, CONSTRAINT_TOL)?;
    Ok(f.shifted(c))
}

/// `||grad f||_p / ||f||_p`, an estimate of `Lambda_p` (not its p-th power).
pub fn rayleigh_quotient(f: &ScalarField, p: f64, mesh: &Mesh) -> Result<f64> {
    let den = p_norm(f, p, mesh)?;
    if den == 0.0 {
        return Err(Error::ZeroField);
    }
    Ok(grad_p_norm(f, p, mesh)? / den)
}
