//! Central similarity proximity regions in a single triangle.
//!
//! For `x` inside `T = T(y1, y2, y3)` let `e(x)` be the edge whose region
//! `R_E(e_j)` (the triangle between `e_j` and the centroid) holds `x`, where
//! `e_j` is the edge opposite `y_j`. `T_CS(x, τ)` is the triangle similar to
//! `T`, with the same orientation and with centroid `x`, whose edge parallel
//! to `e(x)` lies at distance `τ d(x, e(x))` from `x` on the `e(x)` side. The
//! proximity region is `T_CS(x, τ) ∩ T`.
//!
//! In barycentric coordinates `λ` of `T` this reads
//! `z ∈ N(x, τ)  ⇔  λ_k(z) > max(0, λ_k(x) - τ λ_j(x))` for every `k`,
//! with `j = e(x)`. Sampling and arc tests work on barycentric coordinates
//! only, so simulated densities are invariant under affine maps of `T`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{PcdError, Result};
use crate::geometry1d::Tau;
use crate::montecarlo::MCReport;
use crate::stream::map_replicates;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }

    fn dist(self, o: Point) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    let (u, v) = (a.sub(o), b.sub(o));
    u.x * v.y - u.y * v.x
}

/// Barycentric ties closer than this are treated as exact.
const TIE_EPS: f64 = 1e-12;

/// Clipped regions with less than this fraction of the triangle's area
/// collapse to a point.
const AREA_EPS: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[Point; 3]", into = "[Point; 3]")]
pub struct Triangle {
    vertices: [Point; 3],
    /// Twice the signed area.
    det: f64,
}

impl TryFrom<[Point; 3]> for Triangle {
    type Error = PcdError;

    fn try_from(v: [Point; 3]) -> Result<Self> {
        Triangle::new(v[0], v[1], v[2])
    }
}

impl From<Triangle> for [Point; 3] {
    fn from(t: Triangle) -> Self {
        t.vertices
    }
}

impl Triangle {
    pub fn new(y1: Point, y2: Point, y3: Point) -> Result<Self> {
        let det = cross(y1, y2, y3);
        let scale = y1.dist(y2).max(y2.dist(y3)).max(y3.dist(y1));
        if !det.is_finite() || det.abs() <= 1e-14 * scale * scale {
            return Err(PcdError::InvalidInput(
                "triangle vertices are collinear".into(),
            ));
        }
        Ok(Triangle {
            vertices: [y1, y2, y3],
            det,
        })
    }

    /// From six numbers `x1 y1 x2 y2 x3 y3`.
    pub fn from_coords(c: [f64; 6]) -> Result<Self> {
        Triangle::new(
            Point::new(c[0], c[1]),
            Point::new(c[2], c[3]),
            Point::new(c[4], c[5]),
        )
    }

    pub fn vertices(&self) -> [Point; 3] {
        self.vertices
    }

    pub fn area(&self) -> f64 {
        0.5 * self.det.abs()
    }

    pub fn centroid(&self) -> Point {
        self.from_barycentric([1.0 / 3.0; 3])
    }

    pub fn barycentric(&self, p: Point) -> [f64; 3] {
        let [a, b, c] = self.vertices;
        [
            cross(p, b, c) / self.det,
            cross(a, p, c) / self.det,
            cross(a, b, p) / self.det,
        ]
    }

    pub fn from_barycentric(&self, l: [f64; 3]) -> Point {
        let [a, b, c] = self.vertices;
        Point::new(
            l[0] * a.x + l[1] * b.x + l[2] * c.x,
            l[0] * a.y + l[1] * b.y + l[2] * c.y,
        )
    }

    /// Vertices in counterclockwise order.
    fn ccw(&self) -> [Point; 3] {
        let [a, b, c] = self.vertices;
        if self.det > 0.0 {
            [a, b, c]
        } else {
            [a, c, b]
        }
    }
}

/// A convex polygon, counterclockwise. A single vertex stands for a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarRegion {
    pub vertices: Vec<Point>,
}

impl PlanarRegion {
    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        if v.len() < 3 {
            return 0.0;
        }
        0.5 * (0..v.len())
            .map(|i| {
                let (p, q) = (v[i], v[(i + 1) % v.len()]);
                p.x * q.y - q.x * p.y
            })
            .sum::<f64>()
    }

    pub fn is_singleton(&self) -> bool {
        self.vertices.len() == 1
    }

    /// Closed containment, with slack `tol` in distance units.
    pub fn contains_closed(&self, p: Point, tol: f64) -> bool {
        let v = &self.vertices;
        match v.len() {
            0 => false,
            1 => v[0].dist(p) <= tol,
            _ => (0..v.len()).all(|i| {
                let (a, b) = (v[i], v[(i + 1) % v.len()]);
                cross(a, b, p) >= -tol * a.dist(b)
            }),
        }
    }
}

fn strictly_inside(l: &[f64; 3]) -> bool {
    l.iter().all(|&v| v > 0.0)
}

fn check_interior(x: Point, t: &Triangle) -> Result<[f64; 3]> {
    let l = t.barycentric(x);
    if strictly_inside(&l) {
        Ok(l)
    } else {
        Err(PcdError::InvalidInput(format!(
            "point ({}, {}) is not strictly inside the triangle",
            x.x, x.y
        )))
    }
}

/// Index (1-based) of the smallest coordinate, ties going to the smaller
/// index.
fn min_coordinate(l: &[f64; 3]) -> usize {
    let mut best = 0;
    for k in 1..3 {
        if l[k] < l[best] - TIE_EPS {
            best = k;
        }
    }
    best + 1
}

/// The `j` with `x ∈ R_E(e_j)`. Points on the border of two edge regions
/// (including the centroid) get the smallest such `j`.
pub fn edge_region(x: Point, t: &Triangle) -> Result<usize> {
    Ok(min_coordinate(&check_interior(x, t)?))
}

/// The unclipped `T_CS(x, τ)`, vertex `i` corresponding to `y_i`.
pub fn similar_triangle(x: Point, tau: f64, t: &Triangle) -> Result<[Point; 3]> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(PcdError::InvalidParameter(format!(
            "tau must be finite and positive, got {tau}"
        )));
    }
    let l = check_interior(x, t)?;
    let j = min_coordinate(&l) - 1;
    let s = 3.0 * tau * l[j];
    let g = t.centroid();
    Ok(t.vertices.map(|y| Point::new(x.x + s * (y.x - g.x), x.y + s * (y.y - g.y))))
}

/// Clips a convex polygon to the closed half-plane left of `a -> b`.
fn clip(poly: &[Point], a: Point, b: Point) -> Vec<Point> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
        let (dp, dq) = (cross(a, b, p), cross(a, b, q));
        if dp >= 0.0 {
            out.push(p);
        }
        if (dp >= 0.0) != (dq >= 0.0) {
            let r = dp / (dp - dq);
            out.push(Point::new(p.x + r * (q.x - p.x), p.y + r * (q.y - p.y)));
        }
    }
    out
}

/// `N(x, τ) = T_CS(x, τ) ∩ T`. A point on the boundary of `T` gets the
/// singleton `{x}`; `τ = ∞` gives `T`.
pub fn planar_proximity_region(x: Point, tau: Tau, t: &Triangle) -> Result<PlanarRegion> {
    let l = t.barycentric(x);
    if l.iter().any(|&v| v < 0.0) {
        return Err(PcdError::InvalidInput(format!(
            "point ({}, {}) lies outside the triangle",
            x.x, x.y
        )));
    }
    if !strictly_inside(&l) {
        return Ok(PlanarRegion { vertices: vec![x] });
    }
    let Tau::Finite(tau) = tau else {
        return Ok(PlanarRegion {
            vertices: t.ccw().to_vec(),
        });
    };
    let sim = similar_triangle(x, tau, t)?;
    // the similar triangle has the orientation of t
    let mut poly = if t.det > 0.0 {
        sim.to_vec()
    } else {
        vec![sim[0], sim[2], sim[1]]
    };
    let tv = t.ccw();
    for i in 0..3 {
        poly = clip(&poly, tv[i], tv[(i + 1) % 3]);
    }
    let region = PlanarRegion { vertices: poly };
    if region.area() < AREA_EPS * t.area() {
        return Ok(PlanarRegion { vertices: vec![x] });
    }
    Ok(region)
}

/// Lower bounds `max(0, λ_k(x) - τ λ_j(x))` describing `N(x, τ)`; `None`
/// for `τ = ∞`.
fn region_bounds(lx: &[f64; 3], tau: Tau) -> Option<[f64; 3]> {
    let tau = tau.finite()?;
    let shift = tau * lx[min_coordinate(lx) - 1];
    Some(lx.map(|v| (v - shift).max(0.0)))
}

/// Membership `z ∈ N(x, τ)` from barycentric coordinates of both points.
pub fn in_region_barycentric(lx: &[f64; 3], lz: &[f64; 3], tau: Tau) -> bool {
    if !strictly_inside(lx) {
        return false;
    }
    match region_bounds(lx, tau) {
        None => strictly_inside(lz),
        Some(b) => (0..3).all(|k| lz[k] > b[k]),
    }
}

/// Uniform barycentric coordinates by folding the unit square.
fn uniform_barycentric<R: Rng>(rng: &mut R) -> [f64; 3] {
    let (mut u, mut v) = (rng.random::<f64>(), rng.random::<f64>());
    if u + v > 1.0 {
        u = 1.0 - u;
        v = 1.0 - v;
    }
    [1.0 - u - v, u, v]
}

/// Relative density `|A| / (n (n - 1))` of `reps` digraphs on `n` uniform
/// points in `t`. No closed-form moments exist here, so the report carries
/// no standardization.
pub fn planar_density_mc(
    n: usize,
    reps: usize,
    tau: Tau,
    t: &Triangle,
    seed: u64,
    workers: Option<usize>,
) -> Result<MCReport> {
    if n < 2 {
        return Err(PcdError::InvalidParameter(format!(
            "n must be at least 2, got {n}"
        )));
    }
    if reps == 0 {
        return Err(PcdError::InvalidParameter("reps must be at least 1".into()));
    }
    // the triangle itself never enters: everything is barycentric
    let _ = t;
    let densities = map_replicates(reps, seed, workers, |rng| {
        let pts: Vec<[f64; 3]> = (0..n).map(|_| uniform_barycentric(rng)).collect();
        let mut arcs = 0u64;
        for (i, lx) in pts.iter().enumerate() {
            let bounds = region_bounds(lx, tau);
            let inside = strictly_inside(lx);
            for (k, lz) in pts.iter().enumerate() {
                if k == i || !inside {
                    continue;
                }
                let hit = match bounds {
                    None => strictly_inside(lz),
                    Some(b) => lz[0] > b[0] && lz[1] > b[1] && lz[2] > b[2],
                };
                arcs += hit as u64;
            }
        }
        Ok(arcs as f64 / (n as f64 * (n - 1) as f64))
    })?;
    MCReport::summarize(n, seed, densities, None)
}
