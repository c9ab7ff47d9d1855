//! Planar primitives on `[f64; 2]` points and simple polygons.

use alloc::vec::Vec;


use super::Point;

#[inline]
pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1]]
}

#[inline]
pub fn scale(a: Point, t: f64) -> Point {
    [a[0] * t, a[1] * t]
}

#[inline]
pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

#[inline]
pub fn dist(a: Point, b: Point) -> f64 {
    norm(sub(a, b))
}

/// Twice the signed area of the triangle `abc` (positive when counter-clockwise).
#[inline]
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    cross(sub(b, a), sub(c, a))
}

pub fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    let mut s = 0.0;
    for i in 0..n {
        s += cross(poly[i], poly[(i + 1) % n]);
    }
    0.5 * s
}

pub fn edges(poly: &[Point]) -> impl Iterator<Item = (Point, Point)> + '_ {
    let n = poly.len();
    (0..n).map(move |i| (poly[i], poly[(i + 1) % n]))
}

/// Length scale used to turn absolute tolerances into relative ones.
pub fn extent(poly: &[Point]) -> f64 {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in poly {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (hi[0] - lo[0]).max(hi[1] - lo[1])
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    if len2 == 0.0 {
        return dist(p, a);
    }
    let t = (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0);
    dist(p, add(a, scale(ab, t)))
}

pub fn boundary_distance(poly: &[Point], p: Point) -> f64 {
    edges(poly)
        .map(|(a, b)| point_segment_distance(p, a, b))
        .fold(f64::INFINITY, f64::min)
}

/// Crossing-number test; points within `eps` of an edge count as inside.
pub fn contains_closed(poly: &[Point], p: Point, eps: f64) -> bool {
    if boundary_distance(poly, p) <= eps {
        return true;
    }
    contains_open(poly, p)
}

pub fn contains_open(poly: &[Point], p: Point) -> bool {
    let mut inside = false;
    for (a, b) in edges(poly) {
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Signed distance to the polygon boundary, positive inside.
pub fn signed_boundary_distance(poly: &[Point], p: Point) -> f64 {
    let d = boundary_distance(poly, p);
    if contains_open(poly, p) {
        d
    } else {
        -d
    }
}

/// True when the open segments `ab` and `cd` cross at a single interior point.
pub fn segments_cross(a: Point, b: Point, c: Point, d: Point, eps: f64) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    let lab = dist(a, b);
    let lcd = dist(c, d);
    let (t1, t2) = (eps * lab, eps * lcd);
    ((o1 > t1 && o2 < -t1) || (o1 < -t1 && o2 > t1))
        && ((o3 > t2 && o4 < -t2) || (o3 < -t2 && o4 > t2))
}

/// Closed segments `ab` and `cd` share at least one point.
pub fn segments_touch(a: Point, b: Point, c: Point, d: Point, eps: f64) -> bool {
    if segments_cross(a, b, c, d, eps) {
        return true;
    }
    point_segment_distance(a, c, d) <= eps
        || point_segment_distance(b, c, d) <= eps
        || point_segment_distance(c, a, b) <= eps
        || point_segment_distance(d, a, b) <= eps
}

pub fn is_simple(poly: &[Point]) -> bool {
    let n = poly.len();
    let eps = 1e-12 * extent(poly);
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if dist(a, b) <= eps {
            return false;
        }
        for j in i + 1..n {
            let (c, d) = (poly[j], poly[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // Adjacent edges may only share their common vertex: reject a
                // fold-back along the same line.
                let shared = if j == i + 1 { b } else { a };
                let (u, v) = if j == i + 1 { (a, d) } else { (b, c) };
                let du = sub(u, shared);
                let dv = sub(v, shared);
                if cross(du, dv).abs() <= eps * norm(du).max(norm(dv)) && dot(du, dv) > 0.0 {
                    return false;
                }
            } else if segments_touch(a, b, c, d, eps) {
                return false;
            }
        }
    }
    true
}

/// All turns have the same orientation (collinear vertices are tolerated).
pub fn is_convex(poly: &[Point]) -> bool {
    let n = poly.len();
    let eps = 1e-12 * extent(poly) * extent(poly);
    let (mut pos, mut neg) = (false, false);
    for i in 0..n {
        let c = orient(poly[i], poly[(i + 1) % n], poly[(i + 2) % n]);
        if c > eps {
            pos = true;
        } else if c < -eps {
            neg = true;
        }
    }
    !(pos && neg) && (pos || neg)
}

/// Indices of reflex vertices of a counter-clockwise polygon.
pub fn reflex_vertices(poly: &[Point]) -> Vec<usize> {
    let n = poly.len();
    let eps = 1e-12 * extent(poly) * extent(poly);
    (0..n)
        .filter(|&i| orient(poly[(i + n - 1) % n], poly[i], poly[(i + 1) % n]) < -eps)
        .collect()
}

/// Points along the boundary: every vertex plus equally spaced points on each
/// edge so that consecutive samples are at most `spacing` apart.
pub fn sample_boundary(poly: &[Point], spacing: f64) -> Vec<Point> {
    let mut out = Vec::new();
    for (a, b) in edges(poly) {
        let k = (dist(a, b) / spacing).ceil().max(1.0) as usize;
        for j in 0..k {
            let t = j as f64 / k as f64;
            out.push(add(a, scale(sub(b, a), t)));
        }
    }
    out
}

/// Segment `ab` lies in the closed polygon.
///
/// Sufficient and necessary for a simple polygon: no edge is crossed
/// properly, and each piece of `ab` between consecutive polygon vertices lying
/// on it has its midpoint in the closed polygon.
pub fn segment_inside(poly: &[Point], a: Point, b: Point, eps: f64) -> bool {
    for (c, d) in edges(poly) {
        if segments_cross(a, b, c, d, eps) {
            return false;
        }
    }
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    if len2 == 0.0 {
        return contains_closed(poly, a, eps);
    }
    let mut cuts: Vec<f64> = Vec::with_capacity(4);
    cuts.push(0.0);
    cuts.push(1.0);
    for &v in poly {
        if point_segment_distance(v, a, b) <= eps {
            cuts.push((dot(sub(v, a), ab) / len2).clamp(0.0, 1.0));
        }
    }
    cuts.sort_by(|x, y| x.total_cmp(y));
    cuts.windows(2).all(|w| {
        if w[1] - w[0] <= 1e-15 {
            return true;
        }
        let m = add(a, scale(ab, 0.5 * (w[0] + w[1])));
        contains_closed(poly, m, eps)
    })
}
