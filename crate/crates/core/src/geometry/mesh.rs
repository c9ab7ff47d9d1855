use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use spade::{ConstrainedDelaunayTriangulation, Point2, Triangulation};

use super::polygon::{self, dist};
use super::{intrinsic_diameter, Domain, Point, Shape};
use crate::{Error, Result};

/// Conforming P1 simplicial mesh (segments in 1D, triangles in 2D).
///
/// Cells are stored flat with stride `dim + 1`; 1D vertices carry `y = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    dim: usize,
    vertices: Vec<Point>,
    cells: Vec<usize>,
    cell_measures: Vec<f64>,
    /// Gradients of the nodal basis functions, stride `dim + 1`.
    basis_grads: Vec<Point>,
    vertex_weights: Vec<f64>,
    boundary_vertices: Vec<usize>,
    is_boundary: Vec<bool>,
    normals: Vec<Point>,
    adj_offsets: Vec<usize>,
    adj: Vec<usize>,
    h: f64,
    volume: f64,
    id: u64,
}

impl Mesh {
    /// Assemble a mesh from raw vertices and flat cell indices. Cells are
    /// reoriented to positive measure; degenerate cells are rejected.
    pub fn from_parts(dim: usize, vertices: Vec<Point>, mut cells: Vec<usize>, h: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::arg("dim", "only 1D and 2D meshes are supported"));
        }
        let k = dim + 1;
        if cells.is_empty() || !cells.len().is_multiple_of(k) {
            return Err(Error::DegenerateMesh("cell array length is not a multiple of dim + 1".into()));
        }
        if cells.iter().any(|&v| v >= vertices.len()) {
            return Err(Error::DegenerateMesh("cell references a missing vertex".into()));
        }
        let n_cells = cells.len() / k;
        let scale = vertices
            .iter()
            .map(|p| p[0].abs().max(p[1].abs()))
            .fold(1e-300, f64::max);
        let mut cell_measures = Vec::with_capacity(n_cells);
        let mut basis_grads = Vec::with_capacity(cells.len());
        for c in 0..n_cells {
            let cell = &mut cells[c * k..(c + 1) * k];
            if dim == 1 {
                let (x0, x1) = (vertices[cell[0]][0], vertices[cell[1]][0]);
                if x1 < x0 {
                    cell.swap(0, 1);
                }
                let len = (x1 - x0).abs();
                if len <= 1e-14 * scale {
                    return Err(Error::DegenerateMesh(format!("cell {c} has zero length")));
                }
                cell_measures.push(len);
                basis_grads.push([-1.0 / len, 0.0]);
                basis_grads.push([1.0 / len, 0.0]);
            } else {
                let mut a2 = polygon::orient(vertices[cell[0]], vertices[cell[1]], vertices[cell[2]]);
                if a2 < 0.0 {
                    cell.swap(1, 2);
                    a2 = -a2;
                }
                if a2 <= 1e-14 * scale * scale {
                    return Err(Error::DegenerateMesh(format!("cell {c} has zero area")));
                }
                cell_measures.push(0.5 * a2);
                for i in 0..3 {
                    let pj = vertices[cell[(i + 1) % 3]];
                    let pk = vertices[cell[(i + 2) % 3]];
                    basis_grads.push([(pj[1] - pk[1]) / a2, (pk[0] - pj[0]) / a2]);
                }
            }
        }

        let nv = vertices.len();
        let mut vertex_weights = vec![0.0; nv];
        for c in 0..n_cells {
            let share = cell_measures[c] / k as f64;
            for &v in &cells[c * k..(c + 1) * k] {
                vertex_weights[v] += share;
            }
        }
        if let Some(v) = vertex_weights.iter().position(|&w| w <= 0.0) {
            return Err(Error::DegenerateMesh(format!("vertex {v} belongs to no cell")));
        }
        let volume = pairwise_sum(&cell_measures);

        // Boundary facets: facets owned by exactly one cell.
        let mut normals = vec![[0.0, 0.0]; nv];
        let mut is_boundary = vec![false; nv];
        if dim == 1 {
            let mut count = vec![0usize; nv];
            for &v in &cells {
                count[v] += 1;
            }
            for c in 0..n_cells {
                let (l, r) = (cells[2 * c], cells[2 * c + 1]);
                if count[l] == 1 {
                    is_boundary[l] = true;
                    normals[l] = [-1.0, 0.0];
                }
                if count[r] == 1 {
                    is_boundary[r] = true;
                    normals[r] = [1.0, 0.0];
                }
            }
        } else {
            let mut facets: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
            for c in 0..n_cells {
                for i in 0..3 {
                    let (a, b) = (cells[3 * c + i], cells[3 * c + (i + 1) % 3]);
                    let key = (a.min(b), a.max(b));
                    facets.entry(key).or_insert((0, c)).0 += 1;
                }
            }
            for (&(a, b), &(count, c)) in &facets {
                if count != 1 {
                    continue;
                }
                let cell = &cells[3 * c..3 * c + 3];
                let opp = *cell.iter().find(|&&v| v != a && v != b).unwrap();
                let e = polygon::sub(vertices[b], vertices[a]);
                let mut nrm = [e[1], -e[0]];
                if polygon::dot(nrm, polygon::sub(vertices[opp], vertices[a])) > 0.0 {
                    nrm = [-nrm[0], -nrm[1]];
                }
                let len = polygon::norm(nrm);
                for v in [a, b] {
                    is_boundary[v] = true;
                    normals[v] = polygon::add(normals[v], [nrm[0] / len, nrm[1] / len]);
                }
            }
            for n in normals.iter_mut() {
                let len = polygon::norm(*n);
                if len > 0.0 {
                    *n = [n[0] / len, n[1] / len];
                }
            }
        }
        let boundary_vertices = (0..nv).filter(|&v| is_boundary[v]).collect();

        let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for c in 0..n_cells {
            let cell = &cells[c * k..(c + 1) * k];
            for &a in cell {
                for &b in cell {
                    if a != b {
                        nbrs[a].push(b);
                    }
                }
            }
        }
        let mut adj_offsets = Vec::with_capacity(nv + 1);
        let mut adj = Vec::new();
        adj_offsets.push(0);
        for list in nbrs.iter_mut() {
            list.sort_unstable();
            list.dedup();
            adj.extend_from_slice(list);
            adj_offsets.push(adj.len());
        }

        let id = fingerprint(dim, &vertices, &cells);
        Ok(Self {
            dim,
            vertices,
            cells,
            cell_measures,
            basis_grads,
            vertex_weights,
            boundary_vertices,
            is_boundary,
            normals,
            adj_offsets,
            adj,
            h,
            volume,
            id,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cell_measures.len()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn cell(&self, c: usize) -> &[usize] {
        let k = self.dim + 1;
        &self.cells[c * k..(c + 1) * k]
    }

    pub fn cells_flat(&self) -> &[usize] {
        &self.cells
    }

    pub fn cell_measures(&self) -> &[f64] {
        &self.cell_measures
    }

    pub fn basis_gradients(&self, c: usize) -> &[Point] {
        let k = self.dim + 1;
        &self.basis_grads[c * k..(c + 1) * k]
    }

    /// Lumped quadrature weights; they sum to [`Mesh::volume`].
    pub fn vertex_weights(&self) -> &[f64] {
        &self.vertex_weights
    }

    pub fn boundary_vertices(&self) -> &[usize] {
        &self.boundary_vertices
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.is_boundary[v]
    }

    /// Averaged outward unit normal at a boundary vertex; zero inside.
    pub fn normal(&self, v: usize) -> Point {
        self.normals[v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[self.adj_offsets[v]..self.adj_offsets[v + 1]]
    }

    /// Target edge length the mesh was built for.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Total cell measure `|Omega_h|`.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Content hash of vertices and cells; fields carry it to detect mixing
    /// meshes.
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn max_edge_length(&self) -> f64 {
        let mut m = 0.0f64;
        for v in 0..self.num_vertices() {
            for &w in self.neighbors(v) {
                m = m.max(dist(self.vertices[v], self.vertices[w]));
            }
        }
        m
    }

    /// Vertex closest to `p` (lowest index on ties).
    pub fn nearest_vertex(&self, p: Point) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (i, &v) in self.vertices.iter().enumerate() {
            let d = dist(v, p);
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    }

    /// Barycentric interpolation of nodal values at `p`; `None` outside the
    /// mesh.
    pub fn interpolate(&self, values: &[f64], p: Point) -> Option<f64> {
        let k = self.dim + 1;
        let tol = 1e-10;
        for c in 0..self.num_cells() {
            let cell = self.cell(c);
            if self.dim == 1 {
                let (x0, x1) = (self.vertices[cell[0]][0], self.vertices[cell[1]][0]);
                let t = (p[0] - x0) / (x1 - x0);
                if (-tol..=1.0 + tol).contains(&t) {
                    return Some(values[cell[0]] * (1.0 - t) + values[cell[1]] * t);
                }
            } else {
                let g = self.basis_gradients(c);
                let mut bary = [0.0; 3];
                for i in 0..k {
                    // phi_i(p) = 1 + grad phi_i . (p - x_i)
                    let xi = self.vertices[cell[i]];
                    bary[i] = 1.0 + polygon::dot(g[i], polygon::sub(p, xi));
                }
                if bary.iter().all(|&b| b >= -tol) {
                    return Some((0..3).map(|i| bary[i] * values[cell[i]]).sum());
                }
            }
        }
        None
    }
}

/// Pairwise (tree) summation: deterministic and accurate for long vectors.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

fn fingerprint(dim: usize, vertices: &[Point], cells: &[usize]) -> u64 {
    const PRIME: u64 = 0x100_0000_01b3;
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |x: u64| {
        for b in x.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(PRIME);
        }
    };
    eat(dim as u64);
    eat(vertices.len() as u64);
    for p in vertices {
        eat(p[0].to_bits());
        eat(p[1].to_bits());
    }
    for &c in cells {
        eat(c as u64);
    }
    h
}

/// Build a conforming mesh of the domain with target edge length `h`.
///
/// Intervals and axis-aligned rectangles get structured grids (rectangles are
/// split along the `(1, 1)` diagonal). Other polygons and disks use a
/// constrained Delaunay triangulation of boundary samples and a triangular
/// lattice; a disk is replaced by its inscribed regular polygon with edges of
/// length at most `h`.
pub fn build_mesh(domain: &Domain, h: f64) -> Result<Mesh> {
    let diam = intrinsic_diameter(domain);
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::arg("h", format!("must be positive, got {h}")));
    }
    if h > diam / 2.0 {
        return Err(Error::arg(
            "h",
            format!("{h} is too coarse for a domain of diameter {diam}"),
        ));
    }
    match domain.shape() {
        Shape::Interval { a, b } => {
            let n = ((b - a) / h).ceil() as usize;
            let vertices = (0..=n)
                .map(|i| {
                    let x = if i == n { *b } else { a + (b - a) * i as f64 / n as f64 };
                    [x, 0.0]
                })
                .collect();
            let cells = (0..n).flat_map(|i| [i, i + 1]).collect();
            Mesh::from_parts(1, vertices, cells, h)
        }
        Shape::ConvexPolygon { vertices } | Shape::SimplePolygon { vertices } => {
            match axis_aligned_box(vertices) {
                Some((lo, hi)) => structured_rectangle(lo, hi, h),
                None => delaunay_polygon(vertices, h),
            }
        }
        Shape::Disk { center, radius } => {
            let n = (PI / (h / (2.0 * radius)).min(1.0).asin()).ceil().max(8.0) as usize;
            let poly: Vec<Point> = (0..n)
                .map(|i| {
                    let t = 2.0 * PI * i as f64 / n as f64;
                    [center[0] + radius * t.cos(), center[1] + radius * t.sin()]
                })
                .collect();
            delaunay_polygon(&poly, h)
        }
    }
}

fn axis_aligned_box(vertices: &[Point]) -> Option<(Point, Point)> {
    if vertices.len() != 4 {
        return None;
    }
    let axis = polygon::edges(vertices).all(|(a, b)| a[0] == b[0] || a[1] == b[1]);
    if !axis {
        return None;
    }
    let lo = [
        vertices.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min),
        vertices.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min),
    ];
    let hi = [
        vertices.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max),
        vertices.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max),
    ];
    Some((lo, hi))
}

fn structured_rectangle(lo: Point, hi: Point, h: f64) -> Result<Mesh> {
    let nx = ((hi[0] - lo[0]) / h).ceil() as usize;
    let ny = ((hi[1] - lo[1]) / h).ceil() as usize;
    let coord = |i: usize, n: usize, a: f64, b: f64| {
        if i == n {
            b
        } else {
            a + (b - a) * i as f64 / n as f64
        }
    };
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push([coord(i, nx, lo[0], hi[0]), coord(j, ny, lo[1], hi[1])]);
        }
    }
    let idx = |i: usize, j: usize| j * (nx + 1) + i;
    let mut cells = Vec::with_capacity(6 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            cells.extend_from_slice(&[a, b, c, a, c, d]);
        }
    }
    Mesh::from_parts(2, vertices, cells, h)
}

fn delaunay_polygon(poly: &[Point], h: f64) -> Result<Mesh> {
    let boundary = polygon::sample_boundary(poly, h);
    let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> = ConstrainedDelaunayTriangulation::new();
    let mut handles = Vec::with_capacity(boundary.len());
    for p in &boundary {
        let hnd = cdt
            .insert(Point2::new(p[0], p[1]))
            .map_err(|e| Error::DegenerateMesh(format!("{e:?}")))?;
        handles.push(hnd);
    }

    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in poly {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let dy = h * 3f64.sqrt() / 2.0;
    let rows = ((hi[1] - lo[1]) / dy).ceil() as usize;
    let cols = ((hi[0] - lo[0]) / h).ceil() as usize + 1;
    for j in 0..=rows {
        let y = lo[1] + j as f64 * dy;
        let shift = if j % 2 == 1 { 0.5 * h } else { 0.0 };
        for i in 0..=cols {
            let p = [lo[0] + shift + i as f64 * h, y];
            if polygon::signed_boundary_distance(poly, p) > 0.35 * h {
                cdt.insert(Point2::new(p[0], p[1]))
                    .map_err(|e| Error::DegenerateMesh(format!("{e:?}")))?;
            }
        }
    }
    let nb = handles.len();
    for i in 0..nb {
        let (a, b) = (handles[i], handles[(i + 1) % nb]);
        if a != b {
            cdt.add_constraint(a, b);
        }
    }

    // the lattice keeps clear of the boundary, so narrow parts can be left
    // with long chords between boundary samples; split them
    for _ in 0..32 {
        let long: Vec<Point2<f64>> = cdt
            .undirected_edges()
            .filter(|e| !e.is_constraint_edge() && e.length_2() > (1.25 * h) * (1.25 * h))
            .map(|e| {
                let [a, b] = e.positions();
                Point2::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y))
            })
            .filter(|m| polygon::contains_open(poly, [m.x, m.y]))
            .collect();
        if long.is_empty() {
            break;
        }
        for m in long {
            cdt.insert(m).map_err(|e| Error::DegenerateMesh(format!("{e:?}")))?;
        }
    }

    let all: Vec<Point> = cdt.vertices().map(|v| [v.position().x, v.position().y]).collect();
    let mut cells = Vec::with_capacity(3 * cdt.num_inner_faces());
    for face in cdt.inner_faces() {
        let [a, b, c] = face.vertices().map(|v| v.fix().index());
        // boundary samples on a slanted edge are collinear only up to
        // rounding and can form slivers of area ~1e-17
        if polygon::orient(all[a], all[b], all[c]).abs() <= 1e-10 * h * h {
            continue;
        }
        let centroid = [
            (all[a][0] + all[b][0] + all[c][0]) / 3.0,
            (all[a][1] + all[b][1] + all[c][1]) / 3.0,
        ];
        if polygon::contains_open(poly, centroid) {
            cells.extend_from_slice(&[a, b, c]);
        }
    }
    // drop vertices left without a cell and renumber
    let mut index = vec![usize::MAX; all.len()];
    let mut vertices = Vec::with_capacity(all.len());
    for &v in &cells {
        if index[v] == usize::MAX {
            index[v] = 0;
        }
    }
    for (i, p) in all.iter().enumerate() {
        if index[i] == 0 {
            index[i] = vertices.len();
            vertices.push(*p);
        }
    }
    let cells = cells.into_iter().map(|v| index[v]).collect();
    Mesh::from_parts(2, vertices, cells, h)
}
