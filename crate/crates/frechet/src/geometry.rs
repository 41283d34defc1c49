//! Points, polygonal curves, curve-point addressing and segment/ball
//! primitives. Everything downstream is built on these types.
//!
//! A curve stores its vertices in a flat buffer so that inner loops work on
//! `&[f64]` slices. Coordinates are plain Euclidean, any fixed dimension.

use crate::error::{FrechetError, Result};

/// Relative tolerance used to derive geometric epsilons from instance scale.
pub const REL_TOL: f64 = 1e-9;

/// Per-instance tolerances. `geo` is an absolute slack in coordinate units
/// (scaled from the joint bounding box), `t` an absolute slack on edge
/// parameters in [0,1].
#[derive(Debug, Clone, Copy)]
pub struct Tol {
    pub geo: f64,
    pub t: f64,
}

impl Tol {
    pub fn for_curves(curves: &[&Curve]) -> Tol {
        let mut diam: f64 = 0.0;
        for c in curves {
            diam = diam.max(c.bbox_diameter());
        }
        // Also account for separation between the curves.
        if curves.len() >= 2 {
            for a in curves {
                for b in curves {
                    if a.n_vertices() > 0 && b.n_vertices() > 0 {
                        diam = diam.max(dist_slice(a.pt(0), b.pt(0)));
                    }
                }
            }
        }
        Tol {
            geo: REL_TOL * (diam + 1.0),
            t: REL_TOL,
        }
    }
}

/// Euclidean distance between two points given as coordinate slices.
#[inline]
pub fn dist_slice(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        let d = x - y;
        s += d * d;
    }
    s.sqrt()
}

#[inline]
pub fn dist2_slice(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        let d = x - y;
        s += d * d;
    }
    s
}

/// Euclidean distance with input validation (the public point primitive).
pub fn dist(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(FrechetError::DimensionMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(FrechetError::InvalidInput("zero-dimensional point".into()));
    }
    Ok(dist_slice(a, b))
}

/// A located point on a curve: edge index plus parameter t in [0,1].
///
/// Canonical form keeps `t < 1` except on the last edge, so every interior
/// point has a unique address. Ordering along the curve is by `(edge, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub edge: usize,
    pub t: f64,
}

impl CurvePoint {
    /// Position expressed as one scalar: edge index plus parameter.
    #[inline]
    pub fn gp(&self) -> f64 {
        self.edge as f64 + self.t
    }

    #[inline]
    pub fn le(&self, other: &CurvePoint, tol_t: f64) -> bool {
        self.gp() <= other.gp() + tol_t
    }
}

/// A subsegment of one edge, as a closed parameter range `[lo, hi]`.
/// Degenerate spans (`lo == hi`) are meaningful and kept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span {
    pub lo: f64,
    pub hi: f64,
}

impl Span {
    #[inline]
    pub fn contains(&self, t: f64, tol_t: f64) -> bool {
        self.lo - tol_t <= t && t <= self.hi + tol_t
    }

    /// Intersection of two spans on the same edge.
    pub fn intersect(&self, other: &Span, tol_t: f64) -> Option<Span> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo <= hi + tol_t {
            Some(Span { lo: lo.min(hi), hi })
        } else {
            None
        }
    }
}

/// Per-edge container of optional subsegments on a host curve.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalArray {
    spans: Vec<Option<Span>>,
}

impl IntervalArray {
    pub fn empty(n_edges: usize) -> IntervalArray {
        IntervalArray {
            spans: vec![None; n_edges],
        }
    }

    /// Array with a single degenerate span at the given located point.
    pub fn point_source(n_edges: usize, cp: CurvePoint) -> IntervalArray {
        let mut a = IntervalArray::empty(n_edges);
        a.spans[cp.edge] = Some(Span { lo: cp.t, hi: cp.t });
        a
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.spans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    #[inline]
    pub fn span(&self, edge: usize) -> Option<Span> {
        self.spans[edge]
    }

    #[inline]
    pub fn set(&mut self, edge: usize, s: Option<Span>) {
        self.spans[edge] = s;
    }

    pub fn is_all_empty(&self) -> bool {
        self.spans.iter().all(|s| s.is_none())
    }

    pub fn covers(&self, cp: CurvePoint, tol_t: f64) -> bool {
        match self.spans.get(cp.edge) {
            Some(Some(s)) => s.contains(cp.t, tol_t),
            _ => false,
        }
    }

    /// A vertex lies on two edges; it is covered if either hosting span
    /// contains it.
    pub fn covers_vertex(&self, v: usize, tol_t: f64) -> bool {
        let n_edges = self.spans.len();
        if v < n_edges && self.covers(CurvePoint { edge: v, t: 0.0 }, tol_t) {
            return true;
        }
        if v > 0 && v - 1 < n_edges && self.covers(CurvePoint { edge: v - 1, t: 1.0 }, tol_t) {
            return true;
        }
        false
    }

    /// Coverage test that also accepts the alternate address of a point
    /// sitting on an edge boundary.
    pub fn covers_boundary(&self, cp: CurvePoint, tol_t: f64) -> bool {
        if self.covers(cp, tol_t) {
            return true;
        }
        if cp.t <= tol_t && cp.edge > 0 {
            if self.covers(
                CurvePoint {
                    edge: cp.edge - 1,
                    t: 1.0,
                },
                tol_t,
            ) {
                return true;
            }
        }
        if cp.t >= 1.0 - tol_t && cp.edge + 1 < self.spans.len() {
            if self.covers(
                CurvePoint {
                    edge: cp.edge + 1,
                    t: 0.0,
                },
                tol_t,
            ) {
                return true;
            }
        }
        false
    }

    /// Earliest covered point, if any.
    pub fn first_covered(&self) -> Option<CurvePoint> {
        for (e, s) in self.spans.iter().enumerate() {
            if let Some(s) = s {
                return Some(CurvePoint { edge: e, t: s.lo });
            }
        }
        None
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Option<Span>)> + '_ {
        self.spans.iter().enumerate().map(|(e, s)| (e, *s))
    }
}

/// A polygonal curve: a non-empty vertex sequence in fixed dimension, with
/// consecutive duplicate vertices collapsed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    coords: Vec<f64>,
    dim: usize,
}

impl Curve {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Curve> {
        if points.is_empty() {
            return Err(FrechetError::EmptyCurve);
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(FrechetError::InvalidInput("zero-dimensional point".into()));
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(FrechetError::DimensionMismatch(dim, p.len()));
            }
            if !p.iter().all(|x| x.is_finite()) {
                return Err(FrechetError::NonFiniteCoordinate(i));
            }
            let duplicate = coords.len() >= dim && {
                let prev = &coords[coords.len() - dim..];
                prev == p.as_slice()
            };
            if !duplicate {
                coords.extend_from_slice(p);
            }
        }
        Ok(Curve { coords, dim })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn n_vertices(&self) -> usize {
        self.coords.len() / self.dim
    }

    #[inline]
    pub fn n_edges(&self) -> usize {
        self.n_vertices() - 1
    }

    #[inline]
    pub fn pt(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn vertices(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// Coordinates of a located point by linear interpolation on its edge.
    /// Endpoint parameters reproduce the vertex coordinates exactly.
    pub fn point_at(&self, cp: CurvePoint) -> Vec<f64> {
        if self.n_edges() == 0 {
            return self.pt(0).to_vec();
        }
        if cp.t <= 0.0 {
            return self.pt(cp.edge).to_vec();
        }
        if cp.t >= 1.0 {
            return self.pt(cp.edge + 1).to_vec();
        }
        let a = self.pt(cp.edge);
        let b = self.pt(cp.edge + 1);
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| x + cp.t * (y - x))
            .collect()
    }

    /// Canonicalize a located point: `t == 1` rolls over to the next edge
    /// except on the last one.
    pub fn canon(&self, edge: usize, t: f64) -> CurvePoint {
        let t = t.clamp(0.0, 1.0);
        if t >= 1.0 && edge + 1 < self.n_edges() {
            CurvePoint {
                edge: edge + 1,
                t: 0.0,
            }
        } else {
            CurvePoint { edge, t }
        }
    }

    /// Canonical address of vertex `i`.
    pub fn vertex_cp(&self, i: usize) -> CurvePoint {
        if self.n_edges() == 0 {
            return CurvePoint { edge: 0, t: 0.0 };
        }
        if i >= self.n_vertices() - 1 {
            CurvePoint {
                edge: self.n_edges() - 1,
                t: 1.0,
            }
        } else {
            CurvePoint { edge: i, t: 0.0 }
        }
    }

    pub fn start_cp(&self) -> CurvePoint {
        CurvePoint { edge: 0, t: 0.0 }
    }

    pub fn end_cp(&self) -> CurvePoint {
        self.vertex_cp(self.n_vertices() - 1)
    }

    pub fn length(&self) -> f64 {
        (0..self.n_edges())
            .map(|i| dist_slice(self.pt(i), self.pt(i + 1)))
            .sum()
    }

    pub fn bbox_diameter(&self) -> f64 {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.vertices() {
            for (k, x) in p.iter().enumerate() {
                lo[k] = lo[k].min(*x);
                hi[k] = hi[k].max(*x);
            }
        }
        dist_slice(&hi, &lo)
    }

    pub fn bbox(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.vertices() {
            for (k, x) in p.iter().enumerate() {
                lo[k] = lo[k].min(*x);
                hi[k] = hi[k].max(*x);
            }
        }
        (lo, hi)
    }

    /// Distance from a point to the curve's axis-aligned bounding box
    /// (zero if inside). Cheap reject test.
    pub fn bbox_dist(&self, p: &[f64]) -> f64 {
        let (lo, hi) = self.bbox();
        let mut s = 0.0;
        for k in 0..self.dim {
            let d = if p[k] < lo[k] {
                lo[k] - p[k]
            } else if p[k] > hi[k] {
                p[k] - hi[k]
            } else {
                0.0
            };
            s += d * d;
        }
        s.sqrt()
    }

    /// The subcurve from `a` to `b` (inclusive of all intermediate vertices).
    pub fn subcurve(&self, a: CurvePoint, b: CurvePoint) -> Result<Curve> {
        let tol = Tol::for_curves(&[self]);
        if a.gp() > b.gp() + tol.t {
            return Err(FrechetError::InvalidInput(format!(
                "subcurve endpoints out of order: {} > {}",
                a.gp(),
                b.gp()
            )));
        }
        if self.n_edges() == 0 {
            return Ok(self.clone());
        }
        let pa = self.point_at(a);
        let pb = self.point_at(b);
        let mut pts = vec![pa];
        // interior vertices strictly between a and b
        let first_v = if a.t > 0.0 { a.edge + 1 } else { a.edge };
        let last_v = if b.t >= 1.0 { b.edge + 1 } else { b.edge };
        for v in first_v.max(1)..=last_v.min(self.n_vertices() - 1) {
            let gp = v as f64;
            if gp > a.gp() && gp < b.gp() {
                pts.push(self.pt(v).to_vec());
            }
        }
        pts.push(pb);
        // Curve::new collapses the duplicates that arise when a or b sits
        // exactly on a vertex.
        Curve::new(pts)
    }

    /// Global parameter of `cp` mapped into a subcurve-local coordinate is not
    /// needed; instead expose the edge segment endpoints for clip operations.
    #[inline]
    pub fn edge(&self, i: usize) -> (&[f64], &[f64]) {
        (self.pt(i), self.pt(i + 1))
    }
}

/// Parameter interval of the points on segment `pq` that lie within distance
/// `r` of `center`. Closed interval; tangency yields a degenerate span.
pub fn clip_segment_to_ball(p: &[f64], q: &[f64], center: &[f64], r: f64) -> Option<Span> {
    debug_assert_eq!(p.len(), q.len());
    debug_assert_eq!(p.len(), center.len());
    if r < 0.0 {
        return None;
    }
    let mut a = 0.0; // |q-p|^2
    let mut b = 0.0; // 2 (p-c).(q-p)
    let mut c = -r * r; // |p-c|^2 - r^2
    for k in 0..p.len() {
        let e = q[k] - p[k];
        let f = p[k] - center[k];
        a += e * e;
        b += 2.0 * f * e;
        c += f * f;
    }
    if a <= 0.0 {
        // Degenerate segment: inside or not.
        return if c <= 0.0 {
            Some(Span { lo: 0.0, hi: 1.0 })
        } else {
            None
        };
    }
    let mut disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        // Snap near-tangency to an exact tangent.
        let scale = b * b + (4.0 * a * c).abs() + 1e-300;
        if disc > -1e-12 * scale {
            disc = 0.0;
        } else {
            return None;
        }
    }
    let s = disc.sqrt();
    let t0 = (-b - s) / (2.0 * a);
    let t1 = (-b + s) / (2.0 * a);
    let lo = t0.max(0.0);
    let hi = t1.min(1.0);
    if lo <= hi {
        Some(Span { lo, hi })
    } else if lo - hi <= 1e-12 {
        let t = 0.5 * (lo + hi);
        Some(Span { lo: t, hi: t })
    } else {
        None
    }
}
