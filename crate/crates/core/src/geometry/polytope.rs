//! H-representation polytopes with cached vertices at low dimension.
//!
//! Vertices are enumerated exactly at d <= 3 (pairwise / triple-wise boundary
//! intersections). At d = 2 the vertex ring is kept in counter-clockwise order
//! so halfspace clipping and boundary projection are O(V) per call.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::Vector;

/// Closed halfspace `{x : normal . x <= offset}` with a unit normal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vector,
    pub offset: f64,
}

impl Halfspace {
    /// Normalizes the defining inequality so the normal has unit length.
    pub fn new(normal: Vector, offset: f64) -> Result<Self> {
        let n = normal.norm();
        if n < 1e-12 {
            return Err(Error::DegenerateInput(
                "halfspace normal has zero length".into(),
            ));
        }
        Ok(Halfspace {
            normal: normal.scale(1.0 / n),
            offset: offset / n,
        })
    }

    /// Signed margin of `x`: negative inside, positive outside.
    pub fn margin(&self, x: &Vector) -> f64 {
        self.normal.dot(x) - self.offset
    }

    pub fn project(&self, x: &Vector) -> Vector {
        let excess = self.margin(x);
        if excess <= 0.0 {
            x.clone()
        } else {
            x.add_scaled(&self.normal, -excess)
        }
    }
}

/// Intersection of finitely many halfspaces.
///
/// `vertices` is populated on construction for d <= 3 and kept up to date by
/// `clip_2d`; it is empty above d = 3, where support queries fall back to a
/// bounded LP. Polygons produced by repeated clipping carry the CCW vertex
/// ring as the canonical representation and an empty `halfspaces` list --
/// `face_halfspaces` derives the active faces on demand. This keeps long
/// clipping runs at O(V) per cut instead of O(faces * V).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polytope {
    pub halfspaces: Vec<Halfspace>,
    pub vertices: Vec<Vector>,
}

impl Polytope {
    pub fn from_halfspaces(halfspaces: Vec<Halfspace>) -> Self {
        let d = halfspaces.first().map(|h| h.normal.dim()).unwrap_or(0);
        let vertices = match d {
            1 => enumerate_vertices_1d(&halfspaces),
            2 => sort_ccw(enumerate_vertices_2d(&halfspaces)),
            3 => enumerate_vertices_3d(&halfspaces),
            _ => Vec::new(),
        };
        Polytope {
            halfspaces,
            vertices,
        }
    }

    /// Convex polygon through the given 2-d points (hull of the input).
    pub fn from_points_2d(points: &[Vector]) -> Result<Self> {
        let hull = convex_hull_2d(points)?;
        let mut halfspaces = Vec::with_capacity(hull.len());
        let v = hull.len();
        for i in 0..v {
            let a = &hull[i];
            let b = &hull[(i + 1) % v];
            let edge = b.sub(a);
            // outward normal of a CCW edge
            let normal = Vector::from_slice(&[edge[1], -edge[0]]);
            if normal.norm() < 1e-12 {
                continue;
            }
            let offset = normal.dot(a);
            halfspaces.push(Halfspace::new(normal, offset)?);
        }
        Ok(Polytope {
            halfspaces,
            vertices: hull,
        })
    }

    pub fn dim(&self) -> usize {
        self.halfspaces
            .first()
            .map(|h| h.normal.dim())
            .or_else(|| self.vertices.first().map(|v| v.dim()))
            .unwrap_or(0)
    }

    /// Largest constraint excess; <= 0 means `x` is inside. Ring-canonical
    /// polygons measure against their edges directly.
    pub fn margin(&self, x: &Vector) -> f64 {
        if self.dim() == 2 && self.vertices.len() >= 3 {
            return ring_margin(&self.vertices, x);
        }
        self.halfspaces
            .iter()
            .map(|h| h.margin(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Active faces: the stored list when present, otherwise derived from the
    /// vertex ring.
    pub fn face_halfspaces(&self) -> Vec<Halfspace> {
        if !self.halfspaces.is_empty() {
            return self.halfspaces.clone();
        }
        let v = self.vertices.len();
        if self.dim() != 2 || v < 3 {
            return Vec::new();
        }
        let mut faces = Vec::with_capacity(v);
        for i in 0..v {
            let a = &self.vertices[i];
            let b = &self.vertices[(i + 1) % v];
            let edge = b.sub(a);
            let normal = Vector::from_slice(&[edge[1], -edge[0]]);
            if let Ok(h) = Halfspace::new(normal, 0.0) {
                let offset = h.normal.dot(a);
                faces.push(Halfspace {
                    normal: h.normal,
                    offset,
                });
            }
        }
        faces
    }

    /// True when the region is provably bounded: ring-canonical polygons by
    /// construction, otherwise no circular gap of pi or more between the face
    /// normal directions (d = 2 only).
    pub fn bounded_2d(&self) -> bool {
        if self.dim() != 2 {
            return false;
        }
        if self.halfspaces.is_empty() {
            return self.vertices.len() >= 3;
        }
        if self.halfspaces.len() < 3 {
            return false;
        }
        let mut angles: Vec<f64> = self
            .halfspaces
            .iter()
            .map(|h| h.normal[1].atan2(h.normal[0]))
            .collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut max_gap = 0.0f64;
        for i in 0..angles.len() {
            let next = if i + 1 == angles.len() {
                angles[0] + 2.0 * std::f64::consts::PI
            } else {
                angles[i + 1]
            };
            max_gap = max_gap.max(next - angles[i]);
        }
        max_gap < std::f64::consts::PI - 1e-12
    }

    /// Cuts the polygon by one more halfspace. The result is ring-canonical
    /// (empty halfspace list) unless it degenerates to a point or segment.
    pub fn clip_2d(&self, cut: &Halfspace) -> Result<Polytope> {
        let mut out = self.clone();
        out.clip_2d_in_place(cut)?;
        Ok(out)
    }

    /// In-place clip: the violating vertices of a convex ring form one
    /// contiguous cyclic arc, so the cut splices at most two crossing points
    /// in without rebuilding the ring.
    pub fn clip_2d_in_place(&mut self, cut: &Halfspace) -> Result<()> {
        debug_assert_eq!(self.dim(), 2);
        let tol = self.boundary_tol();
        let n = self.vertices.len();
        if n >= 3 {
            let nx = cut.normal[0];
            let ny = cut.normal[1];
            let off = cut.offset;
            let mut any_violated = false;
            let mut all_violated = true;
            let mut margins = Vec::with_capacity(n);
            for v in &self.vertices {
                let m = nx * v[0] + ny * v[1] - off;
                any_violated |= m > tol;
                all_violated &= m > tol;
                margins.push(m);
            }
            if !any_violated {
                return Ok(()); // slack cut
            }
            if all_violated {
                return Err(Error::EmptySet {
                    margin: margins.iter().copied().fold(f64::INFINITY, f64::min),
                });
            }
            if let Some(()) = self.splice_arc(cut, &margins, tol) {
                if self.vertices.len() >= 3 {
                    self.halfspaces.clear();
                    return Ok(());
                }
                // fell below a proper ring: rebuild the degenerate case below
            }
        }
        // general fallback: rebuild the ring (degenerate or tiny inputs)
        let new_vertices = clip_ring(&self.vertices, cut, tol);
        if new_vertices.is_empty() {
            return Err(Error::EmptySet {
                margin: self
                    .vertices
                    .iter()
                    .map(|v| cut.margin(v))
                    .fold(f64::INFINITY, f64::min),
            });
        }
        if new_vertices.len() >= 3 {
            self.halfspaces.clear();
            self.vertices = new_vertices;
            return Ok(());
        }
        // degenerate point or segment: keep an explicit face list
        let mut halfspaces = self.face_halfspaces();
        halfspaces.push(cut.clone());
        let act = (10.0 * tol).max(1e-9);
        halfspaces.retain(|h| new_vertices.iter().any(|v| h.margin(v).abs() <= act));
        self.halfspaces = halfspaces;
        self.vertices = new_vertices;
        Ok(())
    }

    /// Splices the two crossing points over the violating arc. Returns `None`
    /// when the arc is not cyclically contiguous (numerical grazing) and the
    /// caller must rebuild.
    fn splice_arc(&mut self, _cut: &Halfspace, margins: &[f64], tol: f64) -> Option<()> {
        let n = margins.len();
        let violated = |i: usize| margins[i] > tol;
        let mut start = None;
        for i in 0..n {
            let prev = (i + n - 1) % n;
            if violated(i) && !violated(prev) {
                if start.is_some() {
                    return None; // two separate arcs: grazing degeneracy
                }
                start = Some(i);
            }
        }
        let start = start?;
        let mut end = start;
        while violated((end + 1) % n) {
            end = (end + 1) % n;
        }
        let cross = |a: usize, b: usize| -> Vector {
            let t = margins[a] / (margins[a] - margins[b]);
            let va = &self.vertices[a];
            let vb = &self.vertices[b];
            Vector(vec![
                va[0] + t * (vb[0] - va[0]),
                va[1] + t * (vb[1] - va[1]),
            ])
        };
        let entry = cross((start + n - 1) % n, start); // on edge into the arc
        let exit = cross(end, (end + 1) % n); // on edge out of the arc
        let keep_two = entry.dist(&exit) > 1e-12;
        if start <= end {
            let mut repl = vec![entry];
            if keep_two {
                repl.push(exit);
            }
            self.vertices.splice(start..=end, repl);
        } else {
            // arc wraps: survivors are end+1 ..= start-1
            self.vertices.truncate(start);
            self.vertices.drain(..=end);
            self.vertices.push(entry);
            if keep_two {
                self.vertices.push(exit);
            }
        }
        // drop crossings that collapsed onto surviving neighbours
        dedupe_cyclic(&mut self.vertices);
        Some(())
    }

    /// Exact nearest point for polygons (d <= 2). Callers at higher dimension
    /// go through Dykstra instead.
    pub fn project_low_dim(&self, x: &Vector) -> Vector {
        debug_assert!(self.dim() <= 2);
        if self.margin(x) <= 0.0 {
            return x.clone();
        }
        match self.vertices.len() {
            0 => x.clone(),
            1 => self.vertices[0].clone(),
            2 => project_segment(&self.vertices[0], &self.vertices[1], x),
            _ if self.dim() == 2 => {
                // boundary walk in scalar arithmetic: this is the hot path of
                // every long polygon run
                let (px, py) = (x[0], x[1]);
                let v = self.vertices.len();
                let mut best = (self.vertices[0][0], self.vertices[0][1]);
                let mut best_d2 = f64::INFINITY;
                for i in 0..v {
                    let a = &self.vertices[i];
                    let b = &self.vertices[(i + 1) % v];
                    let (ax, ay) = (a[0], a[1]);
                    let (ex, ey) = (b[0] - ax, b[1] - ay);
                    let len2 = ex * ex + ey * ey;
                    let t = if len2 < 1e-24 {
                        0.0
                    } else {
                        (((px - ax) * ex + (py - ay) * ey) / len2).clamp(0.0, 1.0)
                    };
                    let (cx, cy) = (ax + t * ex, ay + t * ey);
                    let d2 = (cx - px) * (cx - px) + (cy - py) * (cy - py);
                    if d2 < best_d2 {
                        best_d2 = d2;
                        best = (cx, cy);
                    }
                }
                Vector(vec![best.0, best.1])
            }
            _ => {
                let mut best = self.vertices[0].clone();
                let mut best_d2 = f64::INFINITY;
                for i in 0..self.vertices.len() {
                    let a = &self.vertices[i];
                    let b = &self.vertices[(i + 1) % self.vertices.len()];
                    let cand = project_segment(a, b, x);
                    let d2 = cand.sub(x).dot(&cand.sub(x));
                    if d2 < best_d2 {
                        best_d2 = d2;
                        best = cand;
                    }
                }
                best
            }
        }
    }

    /// Supremum of `u . z` over the polytope. Vertex enumeration answers for
    /// provably bounded low-dimensional regions; everything else goes through
    /// the bounded LP, which also detects unboundedness.
    pub fn support(&self, u: &Vector) -> Result<f64> {
        let by_vertices = match self.dim() {
            2 => self.bounded_2d() || self.vertices.len() == 1,
            _ => !self.vertices.is_empty(),
        };
        if by_vertices && !self.vertices.is_empty() {
            return Ok(self
                .vertices
                .iter()
                .map(|v| u.dot(v))
                .fold(f64::NEG_INFINITY, f64::max));
        }
        support_lp(&self.halfspaces, u)
    }

    /// Sum of edge lengths of the vertex ring (d = 2).
    pub fn perimeter_2d(&self) -> f64 {
        let v = self.vertices.len();
        if v < 2 {
            return 0.0;
        }
        let mut total = 0.0;
        for i in 0..v {
            total += self.vertices[i].dist(&self.vertices[(i + 1) % v]);
        }
        if v == 2 {
            total /= 2.0;
        }
        total
    }

    fn boundary_tol(&self) -> f64 {
        let mut scale = self
            .halfspaces
            .iter()
            .map(|h| h.offset.abs())
            .fold(1.0, f64::max);
        for v in &self.vertices {
            for c in &v.0 {
                scale = scale.max(c.abs());
            }
        }
        1e-9 * scale
    }
}

/// Removes cyclically-consecutive near-duplicate vertices.
fn dedupe_cyclic(ring: &mut Vec<Vector>) {
    let mut i = 0;
    while ring.len() > 1 && i < ring.len() {
        let next = (i + 1) % ring.len();
        if i != next && ring[i].dist(&ring[next]) <= 1e-12 {
            ring.remove(next);
        } else {
            i += 1;
        }
    }
}

/// Margin of `x` against a CCW vertex ring: max signed distance over edges.
fn ring_margin(ring: &[Vector], x: &Vector) -> f64 {
    let v = ring.len();
    let mut worst = f64::NEG_INFINITY;
    for i in 0..v {
        let a = &ring[i];
        let b = &ring[(i + 1) % v];
        let ex = b[0] - a[0];
        let ey = b[1] - a[1];
        let len = (ex * ex + ey * ey).sqrt();
        if len < 1e-15 {
            continue;
        }
        // inside lies to the left of each CCW edge
        let cross = ex * (x[1] - a[1]) - ey * (x[0] - a[0]);
        worst = worst.max(-cross / len);
    }
    worst
}

pub(crate) fn project_segment(a: &Vector, b: &Vector, x: &Vector) -> Vector {
    let ab = b.sub(a);
    let len2 = ab.dot(&ab);
    if len2 < 1e-24 {
        return a.clone();
    }
    let t = (x.sub(a).dot(&ab) / len2).clamp(0.0, 1.0);
    a.add_scaled(&ab, t)
}

fn feasibility_tol(halfspaces: &[Halfspace]) -> f64 {
    let scale = halfspaces
        .iter()
        .map(|h| h.offset.abs())
        .fold(1.0, f64::max);
    1e-7 * scale
}

fn enumerate_vertices_1d(halfspaces: &[Halfspace]) -> Vec<Vector> {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for h in halfspaces {
        let n = h.normal[0];
        if n > 0.0 {
            hi = hi.min(h.offset / n);
        } else if n < 0.0 {
            lo = lo.max(h.offset / n);
        }
    }
    if !lo.is_finite() || !hi.is_finite() || lo > hi + 1e-12 {
        return Vec::new();
    }
    if (hi - lo).abs() < 1e-15 {
        return vec![Vector(vec![lo])];
    }
    vec![Vector(vec![lo]), Vector(vec![hi])]
}

fn enumerate_vertices_2d(halfspaces: &[Halfspace]) -> Vec<Vector> {
    let tol = feasibility_tol(halfspaces);
    let m = halfspaces.len();
    let mut verts: Vec<Vector> = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            let (a, b) = (&halfspaces[i], &halfspaces[j]);
            let det = a.normal[0] * b.normal[1] - a.normal[1] * b.normal[0];
            if det.abs() < 1e-12 {
                continue;
            }
            let x = (a.offset * b.normal[1] - b.offset * a.normal[1]) / det;
            let y = (a.normal[0] * b.offset - b.normal[0] * a.offset) / det;
            let p = Vector(vec![x, y]);
            if halfspaces.iter().all(|h| h.margin(&p) <= tol) {
                verts.push(p);
            }
        }
    }
    dedupe(verts)
}

fn enumerate_vertices_3d(halfspaces: &[Halfspace]) -> Vec<Vector> {
    let tol = feasibility_tol(halfspaces);
    let m = halfspaces.len();
    let mut verts: Vec<Vector> = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            for k in (j + 1)..m {
                if let Some(p) = solve_3x3(&halfspaces[i], &halfspaces[j], &halfspaces[k]) {
                    if halfspaces.iter().all(|h| h.margin(&p) <= tol) {
                        verts.push(p);
                    }
                }
            }
        }
    }
    dedupe(verts)
}

fn solve_3x3(a: &Halfspace, b: &Halfspace, c: &Halfspace) -> Option<Vector> {
    let m = [&a.normal, &b.normal, &c.normal];
    let rhs = [a.offset, b.offset, c.offset];
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if det.abs() < 1e-12 {
        return None;
    }
    // Cramer's rule
    let mut out = [0.0; 3];
    for (col, slot) in out.iter_mut().enumerate() {
        let col_of = |r: usize, c: usize| if c == col { rhs[r] } else { m[r][c] };
        *slot = (col_of(0, 0) * (col_of(1, 1) * col_of(2, 2) - col_of(1, 2) * col_of(2, 1))
            - col_of(0, 1) * (col_of(1, 0) * col_of(2, 2) - col_of(1, 2) * col_of(2, 0))
            + col_of(0, 2) * (col_of(1, 0) * col_of(2, 1) - col_of(1, 1) * col_of(2, 0)))
            / det;
    }
    Some(Vector(out.to_vec()))
}

fn dedupe(mut verts: Vec<Vector>) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::with_capacity(verts.len());
    for v in verts.drain(..) {
        if !out.iter().any(|w| w.dist(&v) < 1e-9) {
            out.push(v);
        }
    }
    out
}

fn sort_ccw(mut verts: Vec<Vector>) -> Vec<Vector> {
    if verts.len() < 3 {
        return verts;
    }
    let n = verts.len() as f64;
    let cx = verts.iter().map(|v| v[0]).sum::<f64>() / n;
    let cy = verts.iter().map(|v| v[1]).sum::<f64>() / n;
    verts.sort_by(|a, b| {
        let ta = (a[1] - cy).atan2(a[0] - cx);
        let tb = (b[1] - cy).atan2(b[0] - cx);
        ta.partial_cmp(&tb).unwrap()
    });
    verts
}

/// Cuts a CCW vertex ring by a halfspace (Sutherland-Hodgman step).
fn clip_ring(ring: &[Vector], cut: &Halfspace, tol: f64) -> Vec<Vector> {
    if ring.is_empty() {
        return Vec::new();
    }
    if ring.len() == 1 {
        return if cut.margin(&ring[0]) <= tol {
            ring.to_vec()
        } else {
            Vec::new()
        };
    }
    let mut out: Vec<Vector> = Vec::with_capacity(ring.len() + 2);
    let n = ring.len();
    for i in 0..n {
        let cur = &ring[i];
        let nxt = &ring[(i + 1) % n];
        let mc = cut.margin(cur);
        let mn = cut.margin(nxt);
        if mc <= tol {
            out.push(cur.clone());
        }
        // edge crosses the boundary: insert the crossing point
        if (mc > tol && mn < -tol) || (mc < -tol && mn > tol) {
            let t = mc / (mc - mn);
            out.push(cur.add_scaled(&nxt.sub(cur), t));
        }
    }
    // drop near-duplicates introduced by crossings at existing vertices;
    // Sutherland-Hodgman only ever creates consecutive ones
    let mut ded: Vec<Vector> = Vec::with_capacity(out.len());
    for v in out.drain(..) {
        if ded.last().is_none_or(|w| w.dist(&v) > 1e-12) {
            ded.push(v);
        }
    }
    while ded.len() > 1 && ded.first().unwrap().dist(ded.last().unwrap()) <= 1e-12 {
        ded.pop();
    }
    ded
}

fn convex_hull_2d(points: &[Vector]) -> Result<Vec<Vector>> {
    if points.len() < 3 {
        return Err(Error::DegenerateInput(
            "need at least 3 points for a polygon".into(),
        ));
    }
    let mut pts: Vec<Vector> = points.to_vec();
    pts.sort_by(|a, b| {
        (a[0], a[1])
            .partial_cmp(&(b[0], b[1]))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    pts.dedup_by(|a, b| a.dist(b) < 1e-12);
    let cross = |o: &Vector, a: &Vector, b: &Vector| -> f64 {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut lower: Vec<Vector> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0.0
        {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Vector> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0.0
        {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        return Err(Error::DegenerateInput("points are collinear".into()));
    }
    Ok(lower)
}

/// Bounded linear maximization `max u.x : halfspaces` via primal simplex with
/// Bland's rule. Free variables are split, slacks start basic after shifting
/// the origin to a feasible point.
pub fn support_lp(halfspaces: &[Halfspace], u: &Vector) -> Result<f64> {
    let d = u.dim();
    let m = halfspaces.len();
    if m == 0 {
        return Err(Error::Unbounded);
    }
    // find a feasible shift via cyclic halfspace projections (converges for
    // nonempty polyhedra; good enough as an LP seed)
    let mut x0 = Vector::zeros(d);
    for _ in 0..200 {
        let mut moved = 0.0f64;
        for h in halfspaces {
            let next = h.project(&x0);
            moved = moved.max(next.dist(&x0));
            x0 = next;
        }
        if moved < 1e-10 {
            break;
        }
    }
    let shifted: Vec<f64> = halfspaces
        .iter()
        .map(|h| (h.offset - h.normal.dot(&x0)).max(0.0))
        .collect();

    // tableau: m rows, 2d structural + m slack columns, rhs last
    let cols = 2 * d + m;
    let mut tab = vec![vec![0.0f64; cols + 1]; m];
    for (i, h) in halfspaces.iter().enumerate() {
        for j in 0..d {
            tab[i][j] = h.normal[j];
            tab[i][d + j] = -h.normal[j];
        }
        tab[i][2 * d + i] = 1.0;
        tab[i][cols] = shifted[i];
    }
    let mut obj = vec![0.0f64; cols + 1];
    for j in 0..d {
        obj[j] = -u[j]; // reduced costs for a max problem
        obj[d + j] = u[j];
    }
    let mut basis: Vec<usize> = (2 * d..2 * d + m).collect();

    for _pivot in 0..10_000 {
        // entering column: Bland's rule (smallest index with negative cost)
        let Some(enter) = (0..cols).find(|&j| obj[j] < -1e-10) else {
            // rhs of the cost row accumulates c_B B^{-1} b = optimal value
            return Ok(obj[cols] + u.dot(&x0));
        };
        // ratio test; ties broken on the smallest basis index (anti-cycling)
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if tab[i][enter] > 1e-10 {
                let ratio = tab[i][cols] / tab[i][enter];
                let tie =
                    (ratio - best).abs() <= 1e-12 && leave.is_none_or(|cur| basis[i] < basis[cur]);
                if ratio < best - 1e-12 || tie {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(row) = leave else {
            return Err(Error::Unbounded);
        };
        // pivot
        let piv = tab[row][enter];
        for v in tab[row].iter_mut() {
            *v /= piv;
        }
        for i in 0..m {
            if i != row && tab[i][enter].abs() > 1e-14 {
                let f = tab[i][enter];
                for j in 0..=cols {
                    tab[i][j] -= f * tab[row][j];
                }
            }
        }
        if obj[enter].abs() > 1e-14 {
            let f = obj[enter];
            for j in 0..=cols {
                obj[j] -= f * tab[row][j];
            }
        }
        basis[row] = enter;
    }
    Err(Error::NonConvergence {
        cycles: 10_000,
        residual: f64::NAN,
    })
}
