//! Geodesic distance inside a simple polygon.
//!
//! Shortest paths in a simple polygon are polygonal lines that bend only at
//! reflex vertices, so the reflex vertices plus the two query points carry
//! the whole visibility graph. All-pairs reflex distances are precomputed
//! with Floyd-Warshall; a query then costs `O(R)` visibility lookups.

use alloc::vec;
use alloc::vec::Vec;

use super::polygon::{dist, extent, reflex_vertices, segment_inside};
use super::Point;

#[derive(Debug, Clone)]
pub struct GeodesicOracle {
    poly: Vec<Point>,
    reflex: Vec<Point>,
    /// Geodesic distance between reflex vertices, row-major `R x R`.
    reflex_dist: Vec<f64>,
    eps: f64,
}

/// Distances from a fixed source to every reflex vertex.
#[derive(Debug, Clone)]
pub struct SourceDistances {
    source: Point,
    to_reflex: Vec<f64>,
}

impl GeodesicOracle {
    /// `poly` must be simple and counter-clockwise.
    pub fn new(poly: &[Point]) -> Self {
        let eps = 1e-11 * extent(poly);
        let reflex: Vec<Point> = reflex_vertices(poly).into_iter().map(|i| poly[i]).collect();
        let r = reflex.len();
        let mut d = vec![f64::INFINITY; r * r];
        for i in 0..r {
            d[i * r + i] = 0.0;
            for j in i + 1..r {
                if segment_inside(poly, reflex[i], reflex[j], eps) {
                    let l = dist(reflex[i], reflex[j]);
                    d[i * r + j] = l;
                    d[j * r + i] = l;
                }
            }
        }
        for k in 0..r {
            for i in 0..r {
                for j in 0..r {
                    let via = d[i * r + k] + d[k * r + j];
                    if via < d[i * r + j] {
                        d[i * r + j] = via;
                    }
                }
            }
        }
        Self {
            poly: poly.to_vec(),
            reflex,
            reflex_dist: d,
            eps,
        }
    }

    pub fn polygon(&self) -> &[Point] {
        &self.poly
    }

    pub fn visible(&self, a: Point, b: Point) -> bool {
        segment_inside(&self.poly, a, b, self.eps)
    }

    /// Which reflex vertices are visible from `x`.
    pub fn reflex_visibility(&self, x: Point) -> Vec<bool> {
        self.reflex.iter().map(|&r| self.visible(x, r)).collect()
    }

    pub fn from_source(&self, source: Point) -> SourceDistances {
        let vis = self.reflex_visibility(source);
        let r = self.reflex.len();
        let mut to_reflex = vec![f64::INFINITY; r];
        for (k, &seen) in vis.iter().enumerate() {
            if !seen {
                continue;
            }
            let first = dist(source, self.reflex[k]);
            for j in 0..r {
                let v = first + self.reflex_dist[k * r + j];
                if v < to_reflex[j] {
                    to_reflex[j] = v;
                }
            }
        }
        SourceDistances { source, to_reflex }
    }

    /// Geodesic distance from the source to `target`, given the reflex
    /// vertices visible from `target`.
    pub fn distance_with(&self, src: &SourceDistances, target: Point, target_vis: &[bool]) -> f64 {
        if self.reflex.is_empty() || self.visible(src.source, target) {
            return dist(src.source, target);
        }
        let mut best = f64::INFINITY;
        for (j, &seen) in target_vis.iter().enumerate() {
            if seen {
                let v = src.to_reflex[j] + dist(self.reflex[j], target);
                if v < best {
                    best = v;
                }
            }
        }
        best
    }

    pub fn distance(&self, a: Point, b: Point) -> f64 {
        let src = self.from_source(a);
        let vis = self.reflex_visibility(b);
        self.distance_with(&src, b, &vis)
    }

    /// Largest pairwise geodesic distance among `samples`, with the indices
    /// of every pair within `rel_tol` of the maximum.
    pub fn max_pairwise(&self, samples: &[Point], rel_tol: f64) -> (f64, Vec<(usize, usize)>) {
        let vis: Vec<Vec<bool>> = samples.iter().map(|&s| self.reflex_visibility(s)).collect();
        let n = samples.len();
        let mut table = vec![0.0; n * n];
        let mut best = 0.0f64;
        for i in 0..n {
            let src = self.from_source(samples[i]);
            for j in i + 1..n {
                let d = self.distance_with(&src, samples[j], &vis[j]);
                table[i * n + j] = d;
                best = best.max(d);
            }
        }
        let cut = best * (1.0 - rel_tol);
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if table[i * n + j] >= cut {
                    pairs.push((i, j));
                }
            }
        }
        (best, pairs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::SQRT_2;

    fn l_shape() -> Vec<Point> {
        vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]]
    }

    #[test]
    fn bends_around_the_reflex_corner() {
        let g = GeodesicOracle::new(&l_shape());
        let d = g.distance([2.0, 0.0], [0.0, 2.0]);
        assert!((d - 2.0 * SQRT_2).abs() < 1e-12, "{d}");
        let d = g.distance([2.0, 1.0], [1.0, 2.0]);
        assert!((d - 2.0).abs() < 1e-12, "{d}");
    }

    #[test]
    fn straight_when_visible() {
        let g = GeodesicOracle::new(&l_shape());
        assert!((g.distance([0.0, 0.0], [2.0, 1.0]) - 5f64.sqrt()).abs() < 1e-12);
    }

    /// Brute-force oracle: Dijkstra on a dense visibility graph over boundary
    /// samples and vertices, independent of the reflex-vertex reduction.
    #[test]
    fn agrees_with_dense_visibility_graph() {
        use super::super::polygon::sample_boundary;
        let poly = l_shape();
        let g = GeodesicOracle::new(&poly);
        let pts = sample_boundary(&poly, 0.25);
        let n = pts.len();
        let eps = 1e-11;
        let mut adj = vec![f64::INFINITY; n * n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    adj[i * n + j] = 0.0;
                } else if segment_inside(&poly, pts[i], pts[j], eps) {
                    adj[i * n + j] = dist(pts[i], pts[j]);
                }
            }
        }
        for s in [0usize, 5, 11] {
            let mut d = vec![f64::INFINITY; n];
            let mut done = vec![false; n];
            d[s] = 0.0;
            for _ in 0..n {
                let u = (0..n)
                    .filter(|&k| !done[k])
                    .min_by(|&a, &b| d[a].total_cmp(&d[b]))
                    .unwrap();
                done[u] = true;
                for v in 0..n {
                    let w = d[u] + adj[u * n + v];
                    if w < d[v] {
                        d[v] = w;
                    }
                }
            }
            for t in 0..n {
                let fast = g.distance(pts[s], pts[t]);
                assert!((fast - d[t]).abs() < 1e-9, "s={s} t={t}: {fast} vs {}", d[t]);
            }
        }
    }
}
