//! Sparse symmetric matrices on the mesh graph, Jacobi-preconditioned CG, and
//! a small dense solver for local fits.

use alloc::vec;
use alloc::vec::Vec;


use crate::geometry::Mesh;

/// CSR matrix with the sparsity pattern of the vertex graph (plus diagonal).
#[derive(Debug, Clone)]
pub(crate) struct GraphMatrix {
    offsets: Vec<usize>,
    cols: Vec<usize>,
    pub vals: Vec<f64>,
    /// For each cell, the CSR slot of every local pair `(a, b)`, row-major.
    cell_slots: Vec<usize>,
    diag_slots: Vec<usize>,
    k: usize,
}

impl GraphMatrix {
    pub fn new(mesh: &Mesh) -> Self {
        let n = mesh.num_vertices();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        offsets.push(0);
        for v in 0..n {
            let mut row: Vec<usize> = mesh.neighbors(v).to_vec();
            row.push(v);
            row.sort_unstable();
            cols.extend_from_slice(&row);
            offsets.push(cols.len());
        }
        let slot = |r: usize, c: usize| -> usize {
            let row = &cols[offsets[r]..offsets[r + 1]];
            offsets[r] + row.binary_search(&c).expect("pattern covers every cell pair")
        };
        let k = mesh.dim() + 1;
        let mut cell_slots = Vec::with_capacity(mesh.num_cells() * k * k);
        for c in 0..mesh.num_cells() {
            let cell = mesh.cell(c);
            for &a in cell {
                for &b in cell {
                    cell_slots.push(slot(a, b));
                }
            }
        }
        let diag_slots = (0..n).map(|v| slot(v, v)).collect();
        let nnz = cols.len();
        Self {
            offsets,
            cols,
            vals: vec![0.0; nnz],
            cell_slots,
            diag_slots,
            k,
        }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    /// `sum_c weight_c * m_c * grad phi_a . grad phi_b + diag`.
    pub fn assemble(&mut self, mesh: &Mesh, cell_weight: &[f64], diag: &[f64]) {
        self.vals.iter_mut().for_each(|v| *v = 0.0);
        let k = self.k;
        for c in 0..mesh.num_cells() {
            let s = cell_weight[c] * mesh.cell_measures()[c];
            if s == 0.0 {
                continue;
            }
            let g = mesh.basis_gradients(c);
            let slots = &self.cell_slots[c * k * k..(c + 1) * k * k];
            for a in 0..k {
                for b in 0..k {
                    self.vals[slots[a * k + b]] += s * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
                }
            }
        }
        for (v, &d) in diag.iter().enumerate() {
            self.vals[self.diag_slots[v]] += d;
        }
    }

    pub fn mul(&self, x: &[f64], y: &mut [f64]) {
        for r in 0..self.n() {
            let mut s = 0.0;
            for j in self.offsets[r]..self.offsets[r + 1] {
                s += self.vals[j] * x[self.cols[j]];
            }
            y[r] = s;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.diag_slots.iter().map(|&s| self.vals[s]).collect()
    }

    /// Solve `A x = b` by Jacobi-preconditioned conjugate gradients starting
    /// from `x = 0`. Returns the number of iterations used.
    pub fn solve_cg(&self, b: &[f64], x: &mut [f64], rel_tol: f64, max_iter: usize) -> usize {
        let n = self.n();
        let inv_d: Vec<f64> = self
            .diagonal()
            .iter()
            .map(|&d| if d > 0.0 { 1.0 / d } else { 0.0 })
            .collect();
        x.iter_mut().for_each(|v| *v = 0.0);
        let mut r = b.to_vec();
        let mut z: Vec<f64> = r.iter().zip(&inv_d).map(|(r, d)| r * d).collect();
        let mut p = z.clone();
        let mut ap = vec![0.0; n];
        let b_norm = dot(b, b).sqrt();
        if b_norm == 0.0 {
            return 0;
        }
        let mut rz = dot(&r, &z);
        for it in 0..max_iter {
            self.mul(&p, &mut ap);
            let pap = dot(&p, &ap);
            if !(pap > 0.0) {
                return it;
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            if dot(&r, &r).sqrt() <= rel_tol * b_norm {
                return it + 1;
            }
            for i in 0..n {
                z[i] = r[i] * inv_d[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        max_iter
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solve the dense system `a x = b` (row-major `n x n`) by Gaussian
/// elimination with partial pivoting. `None` when singular to `rcond`.
pub(crate) fn solve_dense(mut a: Vec<f64>, mut b: Vec<f64>, n: usize, rcond: f64) -> Option<Vec<f64>> {
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
        if a[piv * n + col].abs() <= rcond * scale {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            b.swap(col, piv);
        }
        for row in col + 1..n {
            let f = a[row * n + col] / a[col * n + col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row * n + k] * x[k];
        }
        x[row] = s / a[row * n + row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_mesh, Domain};

    #[test]
    fn cg_solves_shifted_laplacian() {
        let m = build_mesh(&Domain::rectangle([0.0, 0.0], [1.0, 1.0]).unwrap(), 0.1).unwrap();
        let mut a = GraphMatrix::new(&m);
        let ones = vec![1.0; m.num_cells()];
        a.assemble(&m, &ones, m.vertex_weights());
        let x_true: Vec<f64> = m.vertices().iter().map(|p| (p[0] * 3.0).sin() + p[1]).collect();
        let mut b = vec![0.0; m.num_vertices()];
        a.mul(&x_true, &mut b);
        let mut x = vec![0.0; m.num_vertices()];
        a.solve_cg(&b, &mut x, 1e-12, 1000);
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-9);
        }
    }

    #[test]
    fn stiffness_kills_constants() {
        let m = build_mesh(&Domain::disk([0.0, 0.0], 1.0).unwrap(), 0.3).unwrap();
        let mut a = GraphMatrix::new(&m);
        a.assemble(&m, &vec![1.0; m.num_cells()], &vec![0.0; m.num_vertices()]);
        let mut y = vec![0.0; m.num_vertices()];
        a.mul(&vec![2.5; m.num_vertices()], &mut y);
        assert!(y.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn dense_solve() {
        let a = vec![0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0];
        let x = solve_dense(a, vec![5.0, 2.0, 6.0], 3, 1e-14).unwrap();
        let expect = [1.0, 1.0, 3.0];
        for (u, v) in x.iter().zip(expect) {
            assert!((u - v).abs() < 1e-12, "{x:?}");
        }
        assert!(solve_dense(vec![1.0, 2.0, 2.0, 4.0], vec![1.0, 1.0], 2, 1e-12).is_none());
    }
}
