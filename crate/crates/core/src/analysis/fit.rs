use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{Mesh, Point};
use crate::linalg::solve_dense;

/// Value, gradient and Hessian `[xx, xy, yy]` of a local quadratic model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFit {
    pub value: f64,
    pub grad: Point,
    pub hess: [f64; 3],
}

impl LocalFit {
    pub fn grad_norm(&self) -> f64 {
        self.grad[0].hypot(self.grad[1])
    }

    /// `sum_ij u_i u_ij u_j`.
    pub fn infinity_laplacian(&self) -> f64 {
        let [gx, gy] = self.grad;
        let [xx, xy, yy] = self.hess;
        gx * gx * xx + 2.0 * gx * gy * xy + gy * gy * yy
    }

    pub fn laplacian(&self) -> f64 {
        self.hess[0] + self.hess[2]
    }
}

/// Vertices at graph distance 1 or 2 from `v`, sorted, without `v`.
pub fn two_ring(mesh: &Mesh, v: usize) -> Vec<usize> {
    let mut ring: Vec<usize> = mesh.neighbors(v).to_vec();
    for &w in mesh.neighbors(v) {
        ring.extend_from_slice(mesh.neighbors(w));
    }
    ring.sort_unstable();
    ring.dedup();
    ring.retain(|&w| w != v);
    ring
}

/// Smallest stencil (without the centre) accepted for a fit.
pub fn min_stencil(dim: usize) -> usize {
    if dim == 1 {
        2
    } else {
        6
    }
}

/// Weighted least-squares quadratic through the 2-ring of `v` (the 3-ring
/// when the 2-ring is too small); exact for quadratic data. `None` when the
/// stencil is too small or degenerate.
pub fn quadratic_fit(values: &[f64], mesh: &Mesh, v: usize) -> Option<LocalFit> {
    let mut ring = two_ring(mesh, v);
    if ring.len() < min_stencil(mesh.dim()) {
        // corners of structured grids: widen to the 3-ring
        let mut wider = ring.clone();
        for &w in &ring {
            wider.extend_from_slice(mesh.neighbors(w));
        }
        wider.sort_unstable();
        wider.dedup();
        wider.retain(|&w| w != v);
        ring = wider;
    }
    if ring.len() < min_stencil(mesh.dim()) {
        return None;
    }
    let x0 = mesh.vertices()[v];
    let rho = ring
        .iter()
        .map(|&w| {
            let x = mesh.vertices()[w];
            (x[0] - x0[0]).hypot(x[1] - x0[1])
        })
        .fold(0.0f64, f64::max);
    if rho == 0.0 {
        return None;
    }
    let n = if mesh.dim() == 1 { 3 } else { 6 };
    let mut ata = vec![0.0; n * n];
    let mut atb = vec![0.0; n];
    let mut row = [0.0; 6];
    for &w in core::iter::once(&v).chain(&ring) {
        let x = mesh.vertices()[w];
        let (dx, dy) = ((x[0] - x0[0]) / rho, (x[1] - x0[1]) / rho);
        let weight = 1.0 / (1.0 + dx * dx + dy * dy);
        if n == 3 {
            row[..3].copy_from_slice(&[1.0, dx, dx * dx]);
        } else {
            row = [1.0, dx, dy, dx * dx, dx * dy, dy * dy];
        }
        for i in 0..n {
            atb[i] += weight * row[i] * values[w];
            for j in 0..n {
                ata[i * n + j] += weight * row[i] * row[j];
            }
        }
    }
    let c = solve_dense(ata, atb, n, 1e-12)?;
    let r2 = rho * rho;
    Some(if n == 3 {
        LocalFit {
            value: c[0],
            grad: [c[1] / rho, 0.0],
            hess: [2.0 * c[2] / r2, 0.0, 0.0],
        }
    } else {
        LocalFit {
            value: c[0],
            grad: [c[1] / rho, c[2] / rho],
            hess: [2.0 * c[3] / r2, c[4] / r2, 2.0 * c[5] / r2],
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_mesh, Domain};

    #[test]
    fn exact_for_quadratics_on_unstructured_mesh() {
        let m = build_mesh(&Domain::disk([0.0, 0.0], 1.0).unwrap(), 0.15).unwrap();
        let f = |x: Point| 0.5 + 2.0 * x[0] - x[1] + 0.7 * x[0] * x[0] - 1.1 * x[0] * x[1] + 0.3 * x[1] * x[1];
        let vals: Vec<f64> = m.vertices().iter().map(|&x| f(x)).collect();
        for v in [0, m.num_vertices() / 2, m.num_vertices() - 1] {
            let x = m.vertices()[v];
            let fit = quadratic_fit(&vals, &m, v).unwrap();
            assert!((fit.value - f(x)).abs() < 1e-10);
            assert!((fit.grad[0] - (2.0 + 1.4 * x[0] - 1.1 * x[1])).abs() < 1e-9);
            assert!((fit.grad[1] - (-1.0 - 1.1 * x[0] + 0.6 * x[1])).abs() < 1e-9);
            assert!((fit.hess[0] - 1.4).abs() < 1e-8);
            assert!((fit.hess[1] + 1.1).abs() < 1e-8);
            assert!((fit.hess[2] - 0.6).abs() < 1e-8);
        }
    }

    #[test]
    fn one_dimensional_fit() {
        let m = build_mesh(&Domain::interval(0.0, 1.0).unwrap(), 0.1).unwrap();
        let vals: Vec<f64> = m.vertices().iter().map(|x| 3.0 * x[0] * x[0] - x[0]).collect();
        let fit = quadratic_fit(&vals, &m, 0).unwrap();
        assert!((fit.grad[0] + 1.0).abs() < 1e-10 && (fit.hess[0] - 6.0).abs() < 1e-8);
        assert!((fit.infinity_laplacian() - 6.0).abs() < 1e-8);
    }
}
