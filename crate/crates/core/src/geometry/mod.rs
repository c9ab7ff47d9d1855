//! Exact domains and the geometric quantities the limiting eigenvalues are
//! made of.
//!
//! For convex domains the intrinsic diameter is the Euclidean one and is
//! computed exactly from the vertices. Nonconvex simple polygons use
//! shortest paths through reflex vertices ([`geodesic`]), evaluated on a
//! boundary sampling. Disks are handled analytically; only the solver needs a
//! mesh of them.

mod geodesic;
pub(crate) mod mesh;
pub(crate) mod polygon;

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};


pub use geodesic::GeodesicOracle;
pub use mesh::{build_mesh, Mesh};

use crate::discretize::ScalarField;
use crate::{Error, Result};
use polygon::{dist, extent, is_convex, is_simple, signed_area};

pub type Point = [f64; 2];

/// Geometric description of a domain. Build one through the validating
/// constructors on [`Domain`].
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Interval { a: f64, b: f64 },
    /// Counter-clockwise vertex list.
    ConvexPolygon { vertices: Vec<Point> },
    /// Counter-clockwise vertex list of a simple, possibly nonconvex polygon.
    SimplePolygon { vertices: Vec<Point> },
    Disk { center: Point, radius: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    shape: Shape,
}

impl Domain {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::InvalidDomain(format!(
                "interval [{a}, {b}] must have finite endpoints and positive length"
            )));
        }
        Ok(Self {
            shape: Shape::Interval { a, b },
        })
    }

    pub fn disk(center: Point, radius: f64) -> Result<Self> {
        if !(center.iter().all(|c| c.is_finite()) && radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidDomain(format!(
                "disk radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Self {
            shape: Shape::Disk { center, radius },
        })
    }

    pub fn convex_polygon(vertices: Vec<Point>) -> Result<Self> {
        let vertices = validate_polygon(vertices)?;
        if !is_convex(&vertices) {
            return Err(Error::InvalidDomain(
                "polygon fails the convexity test (edge turns change sign)".into(),
            ));
        }
        Ok(Self {
            shape: Shape::ConvexPolygon { vertices },
        })
    }

    pub fn simple_polygon(vertices: Vec<Point>) -> Result<Self> {
        let vertices = validate_polygon(vertices)?;
        Ok(Self {
            shape: Shape::SimplePolygon { vertices },
        })
    }

    /// Axis-aligned rectangle `[lo, hi]`.
    pub fn rectangle(lo: Point, hi: Point) -> Result<Self> {
        Self::convex_polygon(alloc::vec![lo, [hi[0], lo[1]], hi, [lo[0], hi[1]]])
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        match self.shape {
            Shape::Interval { .. } => 1,
            _ => 2,
        }
    }

    pub fn is_convex(&self) -> bool {
        match &self.shape {
            Shape::SimplePolygon { vertices } => is_convex(vertices),
            _ => true,
        }
    }

    /// Length in 1D, area in 2D.
    pub fn volume(&self) -> f64 {
        match &self.shape {
            Shape::Interval { a, b } => b - a,
            Shape::ConvexPolygon { vertices } | Shape::SimplePolygon { vertices } => {
                signed_area(vertices)
            }
            Shape::Disk { radius, .. } => PI * radius * radius,
        }
    }

    pub fn centroid(&self) -> Point {
        match &self.shape {
            Shape::Interval { a, b } => [0.5 * (a + b), 0.0],
            Shape::Disk { center, .. } => *center,
            Shape::ConvexPolygon { vertices } | Shape::SimplePolygon { vertices } => {
                let n = vertices.len();
                let (mut cx, mut cy, mut a2) = (0.0, 0.0, 0.0);
                for i in 0..n {
                    let (p, q) = (vertices[i], vertices[(i + 1) % n]);
                    let c = polygon::cross(p, q);
                    a2 += c;
                    cx += (p[0] + q[0]) * c;
                    cy += (p[1] + q[1]) * c;
                }
                [cx / (3.0 * a2), cy / (3.0 * a2)]
            }
        }
    }

    /// Membership in the closure, with an absolute tolerance.
    pub fn contains(&self, p: Point, eps: f64) -> bool {
        match &self.shape {
            Shape::Interval { a, b } => p[0] >= a - eps && p[0] <= b + eps && p[1].abs() <= eps,
            Shape::Disk { center, radius } => dist(p, *center) <= radius + eps,
            Shape::ConvexPolygon { vertices } | Shape::SimplePolygon { vertices } => {
                polygon::contains_closed(vertices, p, eps)
            }
        }
    }

    /// Characteristic length, used for relative tolerances.
    pub fn extent(&self) -> f64 {
        match &self.shape {
            Shape::Interval { a, b } => b - a,
            Shape::Disk { radius, .. } => 2.0 * radius,
            Shape::ConvexPolygon { vertices } | Shape::SimplePolygon { vertices } => {
                extent(vertices)
            }
        }
    }

    /// The domain scaled by `t > 0` about the origin.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::arg("t", "scale factor must be positive"));
        }
        let sc = |v: &Vec<Point>| v.iter().map(|p| [p[0] * t, p[1] * t]).collect::<Vec<_>>();
        match &self.shape {
            Shape::Interval { a, b } => Self::interval(a * t, b * t),
            Shape::Disk { center, radius } => Self::disk([center[0] * t, center[1] * t], radius * t),
            Shape::ConvexPolygon { vertices } => Self::convex_polygon(sc(vertices)),
            Shape::SimplePolygon { vertices } => Self::simple_polygon(sc(vertices)),
        }
    }
}

fn validate_polygon(mut vertices: Vec<Point>) -> Result<Vec<Point>> {
    if vertices.len() < 3 {
        return Err(Error::InvalidDomain(format!(
            "polygon needs at least 3 vertices, got {}",
            vertices.len()
        )));
    }
    if vertices.iter().flatten().any(|c| !c.is_finite()) {
        return Err(Error::InvalidDomain("polygon has non-finite coordinates".into()));
    }
    let area = signed_area(&vertices);
    let ext = extent(&vertices);
    if area.abs() <= 1e-12 * ext * ext {
        return Err(Error::InvalidDomain("polygon has zero area (collinear vertices)".into()));
    }
    if !is_simple(&vertices) {
        return Err(Error::InvalidDomain("polygon is self-intersecting".into()));
    }
    if area < 0.0 {
        vertices.reverse();
    }
    Ok(vertices)
}

/// Intrinsic diameter and the endpoint pairs realising it.
#[derive(Debug, Clone, PartialEq)]
pub struct Diameter {
    pub value: f64,
    /// Every pair within `1e-12` relative of the maximum, each ordered
    /// lexicographically, the list sorted. A disk reports one antipodal pair.
    pub pairs: Vec<(Point, Point)>,
}

impl Diameter {
    /// Lexicographically smallest pair; the solver aligns its initial guess
    /// with it and fixes the eigenfunction sign there.
    pub fn primary(&self) -> (Point, Point) {
        self.pairs[0]
    }
}

const PAIR_REL_TOL: f64 = 1e-12;

/// Intrinsic diameter `sup_{x,y} d_Omega(x, y)` over the closure.
///
/// `boundary_spacing` only matters for nonconvex polygons; it defaults to a
/// two-hundredth of the Euclidean diameter.
pub fn diameter(domain: &Domain, boundary_spacing: Option<f64>) -> Diameter {
    let mut d = match domain.shape() {
        Shape::Interval { a, b } => Diameter {
            value: b - a,
            pairs: alloc::vec![([*a, 0.0], [*b, 0.0])],
        },
        Shape::Disk { center, radius } => Diameter {
            value: 2.0 * radius,
            pairs: alloc::vec![(
                [center[0] - radius, center[1]],
                [center[0] + radius, center[1]]
            )],
        },
        Shape::ConvexPolygon { vertices } => euclidean_diameter(vertices),
        Shape::SimplePolygon { vertices } => {
            if is_convex(vertices) {
                euclidean_diameter(vertices)
            } else {
                let euclid = euclidean_diameter(vertices).value;
                let spacing = boundary_spacing.unwrap_or(euclid / 200.0);
                let samples = polygon::sample_boundary(vertices, spacing);
                let oracle = GeodesicOracle::new(vertices);
                let (value, idx) = oracle.max_pairwise(&samples, PAIR_REL_TOL);
                Diameter {
                    value,
                    pairs: idx.into_iter().map(|(i, j)| (samples[i], samples[j])).collect(),
                }
            }
        }
    };
    for pair in d.pairs.iter_mut() {
        if lex_less(pair.1, pair.0) {
            *pair = (pair.1, pair.0);
        }
    }
    d.pairs.sort_by(|x, y| {
        lex_cmp(x.0, y.0).then_with(|| lex_cmp(x.1, y.1))
    });
    d.pairs.dedup();
    d
}

pub fn intrinsic_diameter(domain: &Domain) -> f64 {
    diameter(domain, None).value
}

fn euclidean_diameter(vertices: &[Point]) -> Diameter {
    let n = vertices.len();
    let mut best = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            best = best.max(dist(vertices[i], vertices[j]));
        }
    }
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if dist(vertices[i], vertices[j]) >= best * (1.0 - PAIR_REL_TOL) {
                pairs.push((vertices[i], vertices[j]));
            }
        }
    }
    Diameter { value: best, pairs }
}

pub(crate) fn lex_cmp(a: Point, b: Point) -> core::cmp::Ordering {
    a[0].total_cmp(&b[0]).then_with(|| a[1].total_cmp(&b[1]))
}

fn lex_less(a: Point, b: Point) -> bool {
    lex_cmp(a, b).is_lt()
}

/// Per-vertex geodesic distance `d_Omega(x, x0)`.
pub fn geodesic_distance(domain: &Domain, x0: Point, mesh: &Mesh) -> Result<ScalarField> {
    let eps = 1e-9 * domain.extent();
    if !domain.contains(x0, eps) {
        return Err(Error::OutsideDomain(x0));
    }
    let values = match domain.shape() {
        Shape::SimplePolygon { vertices } if !is_convex(vertices) => {
            let oracle = GeodesicOracle::new(vertices);
            let src = oracle.from_source(x0);
            mesh.vertices()
                .iter()
                .map(|&v| {
                    let vis = oracle.reflex_visibility(v);
                    oracle.distance_with(&src, v, &vis)
                })
                .collect()
        }
        _ => mesh.vertices().iter().map(|&v| dist(v, x0)).collect(),
    };
    ScalarField::new(mesh, values)
}

/// Radius of the largest ball contained in the domain.
///
/// Exact for intervals, disks and convex polygons (Chebyshev centre over all
/// triples of edge constraints). Nonconvex polygons maximise the boundary
/// distance over a sample grid and refine the best candidates by compass
/// search.
pub fn inradius(domain: &Domain) -> f64 {
    match domain.shape() {
        Shape::Interval { a, b } => 0.5 * (b - a),
        Shape::Disk { radius, .. } => *radius,
        Shape::ConvexPolygon { vertices } => chebyshev_radius(vertices),
        Shape::SimplePolygon { vertices } => {
            if is_convex(vertices) {
                chebyshev_radius(vertices)
            } else {
                sampled_inradius(vertices)
            }
        }
    }
}

fn chebyshev_radius(vertices: &[Point]) -> f64 {
    // Half-planes n_i . x <= c_i with unit outward normals.
    let n = vertices.len();
    let mut planes: Vec<(Point, f64)> = Vec::with_capacity(n);
    for (a, b) in polygon::edges(vertices) {
        let e = polygon::sub(b, a);
        let len = polygon::norm(e);
        let nrm = [e[1] / len, -e[0] / len];
        planes.push((nrm, polygon::dot(nrm, a)));
    }
    let slack = |x: Point| {
        planes
            .iter()
            .map(|(nrm, c)| c - polygon::dot(*nrm, x))
            .fold(f64::INFINITY, f64::min)
    };
    let mut best = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                // n . x + r = c for the three planes.
                let rows = [planes[i], planes[j], planes[k]];
                if let Some((x, r)) = solve3(rows) {
                    if r > best && slack(x) >= r * (1.0 - 1e-12) - 1e-15 {
                        best = r;
                    }
                }
            }
        }
    }
    best
}

fn solve3(rows: [(Point, f64); 3]) -> Option<(Point, f64)> {
    let m = [
        [rows[0].0[0], rows[0].0[1], 1.0],
        [rows[1].0[0], rows[1].0[1], 1.0],
        [rows[2].0[0], rows[2].0[1], 1.0],
    ];
    let rhs = [rows[0].1, rows[1].1, rows[2].1];
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(m);
    if d.abs() < 1e-14 {
        return None;
    }
    let mut out = [0.0; 3];
    for (col, o) in out.iter_mut().enumerate() {
        let mut mc = m;
        for r in 0..3 {
            mc[r][col] = rhs[r];
        }
        *o = det(mc) / d;
    }
    Some(([out[0], out[1]], out[2]))
}

fn sampled_inradius(vertices: &[Point]) -> f64 {
    let ext = extent(vertices);
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in vertices {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let step = ext / 128.0;
    let f = |x: Point| polygon::signed_boundary_distance(vertices, x);
    let mut cands: Vec<(f64, Point)> = Vec::new();
    let nx = ((hi[0] - lo[0]) / step).ceil() as usize;
    let ny = ((hi[1] - lo[1]) / step).ceil() as usize;
    for i in 0..=nx {
        for j in 0..=ny {
            let x = [lo[0] + i as f64 * step, lo[1] + j as f64 * step];
            let v = f(x);
            if v > 0.0 {
                cands.push((v, x));
            }
        }
    }
    cands.sort_by(|a, b| b.0.total_cmp(&a.0));
    cands.truncate(8);
    let dirs: [Point; 8] = [
        [1.0, 0.0],
        [-1.0, 0.0],
        [0.0, 1.0],
        [0.0, -1.0],
        [FRAC_1_SQRT_2, FRAC_1_SQRT_2],
        [-FRAC_1_SQRT_2, FRAC_1_SQRT_2],
        [FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
        [-FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
    ];
    let mut best = 0.0f64;
    for (mut v, mut x) in cands {
        let mut s = step;
        while s > 1e-13 * ext {
            let mut moved = false;
            for d in dirs {
                let y = [x[0] + s * d[0], x[1] + s * d[1]];
                let w = f(y);
                if w > v {
                    v = w;
                    x = y;
                    moved = true;
                }
            }
            if !moved {
                s *= 0.5;
            }
        }
        best = best.max(v);
    }
    best
}

/// Exact geometric summary and the limiting eigenvalues it determines.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GeometryReport {
    pub diameter: f64,
    pub inradius: f64,
    pub volume: f64,
    /// `2 / diameter`, the limit of the first nontrivial Neumann eigenvalue.
    pub lambda_inf_neumann: f64,
    /// `1 / inradius`, the limit of the first Dirichlet eigenvalue.
    pub lambda_inf_dirichlet: f64,
    /// Radius of the ball with the same volume.
    pub isodiametric_ball_radius: f64,
}

impl GeometryReport {
    /// Neumann limit eigenvalue of the equal-volume ball, `2 / (2 rho)`.
    pub fn lambda_inf_ball(&self) -> f64 {
        1.0 / self.isodiametric_ball_radius
    }
}

pub fn geometry_report(domain: &Domain) -> GeometryReport {
    let diameter = intrinsic_diameter(domain);
    let inradius = inradius(domain);
    let volume = domain.volume();
    let isodiametric_ball_radius = match domain.dim() {
        // unit ball volumes: 2 in 1D, pi in 2D
        1 => volume / 2.0,
        _ => (volume / PI).sqrt(),
    };
    GeometryReport {
        diameter,
        inradius,
        volume,
        lambda_inf_neumann: 2.0 / diameter,
        lambda_inf_dirichlet: 1.0 / inradius,
        isodiametric_ball_radius,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::SQRT_2;

    fn square() -> Domain {
        Domain::rectangle([-1.0, -1.0], [1.0, 1.0]).unwrap()
    }

    fn l_shape() -> Domain {
        Domain::simple_polygon(vec![
            [0.0, 0.0],
            [2.0, 0.0],
            [2.0, 1.0],
            [1.0, 1.0],
            [1.0, 2.0],
            [0.0, 2.0],
        ])
        .unwrap()
    }

    #[test]
    fn rejects_invalid_domains() {
        assert!(Domain::interval(1.0, 1.0).is_err());
        assert!(Domain::disk([0.0, 0.0], 0.0).is_err());
        assert!(Domain::convex_polygon(vec![[0.0, 0.0], [1.0, 0.0]]).is_err());
        assert!(Domain::convex_polygon(vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]).is_err());
        assert!(Domain::convex_polygon(l_shape_vertices()).is_err());
        assert!(
            Domain::simple_polygon(vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]).is_err()
        );
    }

    fn l_shape_vertices() -> Vec<Point> {
        match l_shape().shape() {
            Shape::SimplePolygon { vertices } => vertices.clone(),
            _ => unreachable!(),
        }
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let d = Domain::convex_polygon(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]).unwrap();
        assert_eq!(d.volume(), 1.0);
    }

    #[test]
    fn diameters() {
        assert!((intrinsic_diameter(&square()) - 2.0 * SQRT_2).abs() < 1e-15);
        assert_eq!(intrinsic_diameter(&Domain::interval(0.0, 1.0).unwrap()), 1.0);
        assert_eq!(intrinsic_diameter(&Domain::disk([0.3, 0.1], 1.5).unwrap()), 3.0);
        let d = diameter(&square(), None);
        assert_eq!(d.pairs.len(), 2);
        assert_eq!(d.primary(), ([-1.0, -1.0], [1.0, 1.0]));
    }

    #[test]
    fn l_shape_diameter_goes_around_the_corner() {
        let d = diameter(&l_shape(), None);
        assert!((d.value - 2.0 * SQRT_2).abs() < 1e-12, "{}", d.value);
        assert_eq!(d.primary(), ([0.0, 2.0], [2.0, 0.0]));
    }

    #[test]
    fn inradii() {
        assert_eq!(inradius(&Domain::disk([0.0, 0.0], 1.0).unwrap()), 1.0);
        assert!((inradius(&square()) - 1.0).abs() < 1e-12);
        let rect = Domain::rectangle([0.0, 0.0], [2.0, 1.0]).unwrap();
        assert!((inradius(&rect) - 0.5).abs() < 1e-12);
        // 3-4-5 triangle: r = (a + b - c) / 2 = 1
        let tri = Domain::convex_polygon(vec![[0.0, 0.0], [4.0, 0.0], [0.0, 3.0]]).unwrap();
        assert!((inradius(&tri) - 1.0).abs() < 1e-12);
        // L-shape: centre (c, c) equidistant from both axes and the reflex
        // corner, c = sqrt2 (1 - c), so r = 2 - sqrt 2.
        let r = inradius(&l_shape());
        assert!((r - (2.0 - SQRT_2)).abs() < 1e-9, "{r}");
    }

    #[test]
    fn report_for_square_and_disk() {
        let r = geometry_report(&square());
        assert!((r.lambda_inf_neumann - 1.0 / SQRT_2).abs() < 1e-15);
        assert!((r.lambda_inf_dirichlet - 1.0).abs() < 1e-12);
        assert!((r.isodiametric_ball_radius - (4.0 / PI).sqrt()).abs() < 1e-15);
        assert!(r.lambda_inf_neumann <= r.lambda_inf_ball());

        let r = geometry_report(&Domain::disk([0.0, 0.0], 1.0).unwrap());
        assert_eq!(r.lambda_inf_neumann, 1.0);
        assert_eq!(r.lambda_inf_dirichlet, 1.0);
    }

    #[test]
    fn scaling() {
        for d in [square(), l_shape(), Domain::interval(0.0, 1.0).unwrap()] {
            let t = 2.5;
            let a = geometry_report(&d);
            let b = geometry_report(&d.scaled(t).unwrap());
            assert!((b.diameter - t * a.diameter).abs() < 1e-9 * b.diameter);
            assert!((b.inradius - t * a.inradius).abs() < 1e-9 * b.inradius);
            assert!((b.lambda_inf_neumann * t - a.lambda_inf_neumann).abs() < 1e-9);
            assert!((b.lambda_inf_dirichlet * t - a.lambda_inf_dirichlet).abs() < 1e-9);
        }
    }
}
