//! Convex sets with exact projections, support functions, sphere measures and
//! uniform sphere sampling.
//!
//! Every operation here is a pure function of its inputs; nothing holds
//! shared mutable state, so concurrent use needs no coordination.

pub mod dykstra;
pub mod polytope;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::vector::Vector;

pub use dykstra::{dykstra_project, DEFAULT_MAX_CYCLES, DEFAULT_TOL};
pub use polytope::{Halfspace, Polytope};

/// Membership tolerance used by feasibility checks throughout the crate;
/// absorbs iterative-projection error.
pub const MEMBERSHIP_TOL: f64 = 1e-8;

/// A closed convex region of `R^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConvexSet {
    Ball {
        center: Vector,
        radius: f64,
    },
    Box {
        lo: Vector,
        hi: Vector,
    },
    Halfspace(Halfspace),
    Polytope(Polytope),
    /// Intersection of the members, carrying a certified feasible witness so
    /// emptiness is detectable rather than assumed.
    Intersection {
        members: Vec<ConvexSet>,
        witness: Vector,
    },
}

pub fn ball(center: &[f64], radius: f64) -> ConvexSet {
    ConvexSet::Ball {
        center: Vector::from_slice(center),
        radius,
    }
}

pub fn box_set(lo: &[f64], hi: &[f64]) -> ConvexSet {
    debug_assert!(lo.iter().zip(hi).all(|(a, b)| a <= b));
    ConvexSet::Box {
        lo: Vector::from_slice(lo),
        hi: Vector::from_slice(hi),
    }
}

pub fn halfspace(normal: &[f64], offset: f64) -> ConvexSet {
    ConvexSet::Halfspace(Halfspace::new(Vector::from_slice(normal), offset).expect("unit normal"))
}

impl ConvexSet {
    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::Ball { center, .. } => center.dim(),
            ConvexSet::Box { lo, .. } => lo.dim(),
            ConvexSet::Halfspace(h) => h.normal.dim(),
            ConvexSet::Polytope(p) => p.dim(),
            ConvexSet::Intersection { witness, .. } => witness.dim(),
        }
    }

    /// Signed constraint excess: <= 0 iff `x` belongs to the set. Cheap and
    /// closed-form for every variant (used for feasibility filters; the
    /// metric distance goes through `distance`).
    pub fn margin(&self, x: &Vector) -> f64 {
        match self {
            ConvexSet::Ball { center, radius } => x.dist(center) - radius,
            ConvexSet::Box { lo, hi } => {
                x.0.iter()
                    .zip(&lo.0)
                    .zip(&hi.0)
                    .map(|((&xi, &l), &h)| (l - xi).max(xi - h))
                    .fold(f64::NEG_INFINITY, f64::max)
            }
            ConvexSet::Halfspace(h) => h.margin(x),
            ConvexSet::Polytope(p) => p.margin(x),
            ConvexSet::Intersection { members, .. } => members
                .iter()
                .map(|m| m.margin(x))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Euclidean projection onto the set.
    ///
    /// Ball, box and halfspace are closed form. Polygons (d <= 2) use the
    /// exact boundary walk; other polytopes and intersections go through
    /// Dykstra's scheme.
    pub fn project(&self, x: &Vector) -> Result<Vector> {
        match self {
            ConvexSet::Ball { center, radius } => {
                let delta = x.sub(center);
                let n = delta.norm();
                if n <= *radius {
                    Ok(x.clone())
                } else {
                    Ok(center.add_scaled(&delta, radius / n))
                }
            }
            ConvexSet::Box { lo, hi } => Ok(Vector(
                x.0.iter()
                    .zip(&lo.0)
                    .zip(&hi.0)
                    .map(|((&xi, &l), &h)| xi.clamp(l, h))
                    .collect(),
            )),
            ConvexSet::Halfspace(h) => Ok(h.project(x)),
            ConvexSet::Polytope(p) => {
                let walkable = match p.dim() {
                    1 => !p.vertices.is_empty(),
                    2 => p.bounded_2d() || p.vertices.len() == 1,
                    _ => false,
                };
                if walkable {
                    Ok(p.project_low_dim(x))
                } else {
                    let members: Vec<ConvexSet> = p
                        .face_halfspaces()
                        .into_iter()
                        .map(ConvexSet::Halfspace)
                        .collect();
                    dykstra_project(&members, x, DEFAULT_TOL, DEFAULT_MAX_CYCLES)
                }
            }
            ConvexSet::Intersection { members, witness } => {
                let wm = self_margin_of(members, witness);
                if wm > 1e-6 {
                    return Err(Error::EmptySet { margin: wm });
                }
                if self.margin(x) <= 0.0 {
                    return Ok(x.clone());
                }
                dykstra_project(members, x, DEFAULT_TOL, DEFAULT_MAX_CYCLES)
            }
        }
    }

    /// `min_{z in set} ||x - z||`.
    pub fn distance(&self, x: &Vector) -> Result<f64> {
        Ok(self.project(x)?.dist(x))
    }

    /// Membership at tolerance `tol`, measured as projection distance.
    pub fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        if self.margin(x) <= 0.0 {
            return Ok(true);
        }
        Ok(self.distance(x)? <= tol)
    }

    /// `max_{z in set} u . z` for a unit direction `u`.
    pub fn support(&self, u: &Vector) -> Result<f64> {
        match self {
            ConvexSet::Ball { center, radius } => Ok(u.dot(center) + radius * u.norm()),
            ConvexSet::Box { lo, hi } => Ok(u
                .0
                .iter()
                .zip(&lo.0)
                .zip(&hi.0)
                .map(|((&ui, &l), &h)| (ui * l).max(ui * h))
                .sum()),
            ConvexSet::Halfspace(h) => {
                let n = u.norm();
                if n < 1e-15 {
                    return Ok(0.0);
                }
                if u.scale(1.0 / n).sub(&h.normal).norm() <= 1e-9 {
                    Ok(h.offset * n)
                } else {
                    Err(Error::Unbounded)
                }
            }
            ConvexSet::Polytope(p) => p.support(u),
            ConvexSet::Intersection { members, witness } => {
                if let Some(hs) = collect_halfspaces(members) {
                    return polytope::support_lp(&hs, u);
                }
                intersection_support_ascent(members, witness, u)
            }
        }
    }

    /// Loose diameter bound; infinite for unbounded variants.
    pub fn diameter_upper_bound(&self) -> f64 {
        match self {
            ConvexSet::Ball { radius, .. } => 2.0 * radius,
            ConvexSet::Box { lo, hi } => hi.sub(lo).norm(),
            ConvexSet::Halfspace(_) => f64::INFINITY,
            ConvexSet::Polytope(p) => {
                if p.vertices.is_empty() {
                    f64::INFINITY
                } else {
                    let mut best = 0.0f64;
                    for (i, a) in p.vertices.iter().enumerate() {
                        for b in &p.vertices[i + 1..] {
                            best = best.max(a.dist(b));
                        }
                    }
                    best
                }
            }
            ConvexSet::Intersection { members, .. } => members
                .iter()
                .map(|m| m.diameter_upper_bound())
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// True when this set provably contains `other` (conservative: `false`
    /// means "unknown").
    pub fn provably_contains(&self, other: &ConvexSet) -> bool {
        let tol = 1e-12;
        match self {
            ConvexSet::Halfspace(h) => match other.support(&h.normal) {
                Ok(s) => s <= h.offset + tol,
                Err(_) => false,
            },
            ConvexSet::Box { lo, hi } => {
                let d = lo.dim();
                (0..d).all(|i| {
                    let mut e = Vector::zeros(d);
                    e[i] = 1.0;
                    let up = other.support(&e);
                    e[i] = -1.0;
                    let down = other.support(&e);
                    match (up, down) {
                        (Ok(u), Ok(v)) => u <= hi[i] + tol && v <= -lo[i] + tol,
                        _ => false,
                    }
                })
            }
            ConvexSet::Ball { center, radius } => match other {
                ConvexSet::Ball {
                    center: c2,
                    radius: r2,
                } => center.dist(c2) + r2 <= radius + tol,
                ConvexSet::Box { .. } | ConvexSet::Polytope(_) => corners_of(other)
                    .is_some_and(|cs| cs.iter().all(|v| v.dist(center) <= radius + tol)),
                _ => false,
            },
            ConvexSet::Polytope(p) => {
                // ring-canonical polygons skip the face check (conservative)
                !p.halfspaces.is_empty()
                    && p.halfspaces.iter().all(|h| match other.support(&h.normal) {
                        Ok(s) => s <= h.offset + tol,
                        Err(_) => false,
                    })
            }
            ConvexSet::Intersection { members, .. } => {
                members.iter().all(|m| m.provably_contains(other))
            }
        }
    }
}

fn corners_of(set: &ConvexSet) -> Option<Vec<Vector>> {
    match set {
        ConvexSet::Box { lo, hi } => {
            let d = lo.dim();
            if d > 16 {
                return None;
            }
            let mut out = Vec::with_capacity(1 << d);
            for mask in 0..(1usize << d) {
                let v: Vec<f64> = (0..d)
                    .map(|i| if mask >> i & 1 == 1 { hi[i] } else { lo[i] })
                    .collect();
                out.push(Vector(v));
            }
            Some(out)
        }
        ConvexSet::Polytope(p) if !p.vertices.is_empty() => Some(p.vertices.clone()),
        _ => None,
    }
}

fn self_margin_of(members: &[ConvexSet], witness: &Vector) -> f64 {
    members
        .iter()
        .map(|m| m.margin(witness))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// All members as halfspaces, or `None` when a member is not polyhedral.
pub fn collect_halfspaces(members: &[ConvexSet]) -> Option<Vec<Halfspace>> {
    let mut out = Vec::new();
    for m in members {
        match m {
            ConvexSet::Halfspace(h) => out.push(h.clone()),
            ConvexSet::Polytope(p) => out.extend(p.face_halfspaces()),
            ConvexSet::Box { lo, hi } => out.extend(box_faces(lo, hi)),
            ConvexSet::Intersection { members, .. } => out.extend(collect_halfspaces(members)?),
            ConvexSet::Ball { .. } => return None,
        }
    }
    Some(out)
}

pub fn box_faces(lo: &Vector, hi: &Vector) -> Vec<Halfspace> {
    let d = lo.dim();
    let mut faces = Vec::with_capacity(2 * d);
    for i in 0..d {
        let mut n = Vector::zeros(d);
        n[i] = 1.0;
        faces.push(Halfspace {
            normal: n.clone(),
            offset: hi[i],
        });
        n[i] = -1.0;
        faces.push(Halfspace {
            normal: n,
            offset: -lo[i],
        });
    }
    faces
}

/// Projected supergradient ascent for `max u.z` over a mixed intersection.
/// Slow fallback; polyhedral intersections take the exact LP route instead.
fn intersection_support_ascent(members: &[ConvexSet], witness: &Vector, u: &Vector) -> Result<f64> {
    let scale = members
        .iter()
        .map(|m| m.diameter_upper_bound())
        .fold(f64::INFINITY, f64::min);
    if !scale.is_finite() {
        return Err(Error::Unbounded);
    }
    let mut z = witness.clone();
    let mut best = u.dot(&z);
    for k in 1..=4000usize {
        let step = scale / (k as f64).sqrt();
        z = dykstra_project(members, &z.add_scaled(u, step), 1e-10, 2000)?;
        best = best.max(u.dot(&z));
    }
    Ok(best)
}

/// `(d-1)`-dimensional surface measure of the unit sphere in `R^d`;
/// `2` at d = 1 (counting measure on two points).
pub fn unit_sphere_measure(d: usize) -> f64 {
    assert!(d >= 1, "dimension must be positive");
    if d == 1 {
        return 2.0;
    }
    2.0 * PI.powf(d as f64 / 2.0) / gamma_half(d)
}

/// Gamma(d/2) for integer d >= 1.
fn gamma_half(d: usize) -> f64 {
    if d % 2 == 0 {
        (1..d / 2).map(|i| i as f64).product()
    } else {
        let mut g = PI.sqrt();
        for i in 1..=(d / 2) {
            g *= (2 * i - 1) as f64 / 2.0;
        }
        g
    }
}

/// Uniform draw from the unit sphere via a normalized Gaussian vector.
pub fn sample_unit_sphere<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vector {
    assert!(d >= 1);
    loop {
        if d == 1 {
            let g: f64 = rng.sample(StandardNormal);
            if g == 0.0 {
                continue;
            }
            return Vector(vec![g.signum()]);
        }
        let v = Vector((0..d).map(|_| rng.sample(StandardNormal)).collect());
        if let Some(u) = v.normalized() {
            return u;
        }
    }
}

/// Incrementally maintained intersection of revealed constraint sets.
///
/// Keeps the running set in the tightest exact representation the merge rules
/// allow (ball, box or clipped polygon), so long horizons stay cheap; when no
/// rule applies it falls back to an explicit member list.
#[derive(Clone, Debug)]
pub struct RunningIntersection {
    current: ConvexSet,
    witness: Vector,
}

impl RunningIntersection {
    pub fn new(admissible: &ConvexSet, witness: &Vector) -> Result<Self> {
        let m = admissible.margin(witness);
        if m > 1e-6 {
            return Err(Error::EmptySet { margin: m });
        }
        Ok(RunningIntersection {
            current: admissible.clone(),
            witness: witness.clone(),
        })
    }

    pub fn current(&self) -> &ConvexSet {
        &self.current
    }

    pub fn witness(&self) -> &Vector {
        &self.witness
    }

    /// `S_t = S_{t-1} ∩ incoming`.
    pub fn intersect(&mut self, incoming: &ConvexSet) -> Result<()> {
        let wm = incoming.margin(&self.witness);
        if wm > 1e-6 {
            return Err(Error::EmptySet { margin: wm });
        }
        if incoming.provably_contains(&self.current) {
            return Ok(()); // redundant reveal
        }
        if self.current.provably_contains(incoming) {
            self.current = incoming.clone();
            return Ok(());
        }
        let current = std::mem::replace(
            &mut self.current,
            ConvexSet::Box {
                lo: Vector::zeros(0),
                hi: Vector::zeros(0),
            },
        );
        self.current = merge(current, incoming, &self.witness)?;
        Ok(())
    }
}

fn merge(current: ConvexSet, incoming: &ConvexSet, witness: &Vector) -> Result<ConvexSet> {
    use ConvexSet::*;
    let d = current.dim();
    match (current, incoming) {
        (
            Ball { center, radius },
            Ball {
                center: c2,
                radius: r2,
            },
        ) if center.dist(c2) <= 1e-12 * (1.0 + radius) => Ok(Ball {
            center,
            radius: radius.min(*r2),
        }),
        (Box { lo, hi }, Box { lo: lo2, hi: hi2 }) => {
            let nl: Vec<f64> = lo.0.iter().zip(&lo2.0).map(|(a, b)| a.max(*b)).collect();
            let nh: Vec<f64> = hi.0.iter().zip(&hi2.0).map(|(a, b)| a.min(*b)).collect();
            if nl.iter().zip(&nh).any(|(l, h)| l > h) {
                return Err(Error::EmptySet { margin: 0.0 });
            }
            Ok(Box {
                lo: Vector(nl),
                hi: Vector(nh),
            })
        }
        (current, incoming) if d == 1 => merge_intervals(current, incoming, witness),
        (current, incoming) if d == 2 => merge_polygons(current, incoming, witness),
        (current, incoming) => Ok(append_member(current, incoming, witness)),
    }
}

fn merge_intervals(
    current: ConvexSet,
    incoming: &ConvexSet,
    witness: &Vector,
) -> Result<ConvexSet> {
    let (Some(a), Some(b)) = (as_interval(&current), as_interval(incoming)) else {
        return Ok(append_member(current, incoming, witness));
    };
    let lo = a.0.max(b.0);
    let hi = a.1.min(b.1);
    if lo > hi {
        return Err(Error::EmptySet { margin: lo - hi });
    }
    Ok(ConvexSet::Box {
        lo: Vector(vec![lo]),
        hi: Vector(vec![hi]),
    })
}

fn as_interval(set: &ConvexSet) -> Option<(f64, f64)> {
    match set {
        ConvexSet::Box { lo, hi } => Some((lo[0], hi[0])),
        ConvexSet::Ball { center, radius } => Some((center[0] - radius, center[0] + radius)),
        ConvexSet::Halfspace(h) => {
            if h.normal[0] > 0.0 {
                Some((f64::NEG_INFINITY, h.offset / h.normal[0]))
            } else {
                Some((h.offset / h.normal[0], f64::INFINITY))
            }
        }
        ConvexSet::Polytope(p) => {
            let mut lo = f64::NEG_INFINITY;
            let mut hi = f64::INFINITY;
            for h in &p.halfspaces {
                if h.normal[0] > 0.0 {
                    hi = hi.min(h.offset / h.normal[0]);
                } else {
                    lo = lo.max(h.offset / h.normal[0]);
                }
            }
            Some((lo, hi))
        }
        ConvexSet::Intersection { .. } => None,
    }
}

fn merge_polygons(current: ConvexSet, incoming: &ConvexSet, witness: &Vector) -> Result<ConvexSet> {
    let mut poly = match current {
        ConvexSet::Polytope(p) => p,
        ConvexSet::Box { lo, hi } => Polytope::from_halfspaces(box_faces(&lo, &hi)),
        other => return Ok(append_member(other, incoming, witness)),
    };
    match incoming {
        ConvexSet::Halfspace(h) => poly.clip_2d_in_place(h)?,
        ConvexSet::Polytope(p) => {
            for cut in p.face_halfspaces() {
                poly.clip_2d_in_place(&cut)?;
            }
        }
        ConvexSet::Box { lo, hi } => {
            for cut in box_faces(lo, hi) {
                poly.clip_2d_in_place(&cut)?;
            }
        }
        _ => return Ok(append_member(ConvexSet::Polytope(poly), incoming, witness)),
    }
    Ok(ConvexSet::Polytope(poly))
}

fn append_member(current: ConvexSet, incoming: &ConvexSet, witness: &Vector) -> ConvexSet {
    let mut members = match current {
        ConvexSet::Intersection { members, .. } => members,
        other => vec![other],
    };
    match incoming {
        ConvexSet::Intersection { members: more, .. } => members.extend(more.iter().cloned()),
        other => members.push(other.clone()),
    }
    ConvexSet::Intersection {
        members,
        witness: witness.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ball_projection_is_radial() {
        let b = ball(&[0.0, 0.0], 1.0);
        let p = b.project(&Vector::from_slice(&[2.0, 0.0])).unwrap();
        assert!(p.dist(&Vector::from_slice(&[1.0, 0.0])) < 1e-12);
        let inside = Vector::from_slice(&[0.3, -0.2]);
        assert_eq!(b.project(&inside).unwrap(), inside);
    }

    #[test]
    fn box_projection_clamps() {
        let bx = box_set(&[0.0, 0.0], &[1.0, 1.0]);
        let p = bx.project(&Vector::from_slice(&[2.0, -1.0])).unwrap();
        assert_eq!(p, Vector::from_slice(&[1.0, 0.0]));
        assert_eq!(bx.distance(&Vector::from_slice(&[0.5, 0.5])).unwrap(), 0.0);
    }

    #[test]
    fn halfspace_projection_subtracts_margin() {
        let h = halfspace(&[1.0, 0.0], 0.0);
        let p = h.project(&Vector::from_slice(&[3.0, 4.0])).unwrap();
        assert_eq!(p, Vector::from_slice(&[0.0, 4.0]));
    }

    #[test]
    fn quadrant_distance() {
        let q = ConvexSet::Intersection {
            members: vec![halfspace(&[1.0, 0.0], 0.0), halfspace(&[0.0, 1.0], 0.0)],
            witness: Vector::from_slice(&[-1.0, -1.0]),
        };
        let d = q.distance(&Vector::from_slice(&[1.0, 1.0])).unwrap();
        assert!((d - 2.0f64.sqrt()).abs() < 1e-7);
    }

    #[test]
    fn support_closed_forms() {
        let b = ball(&[1.0, 2.0], 0.5);
        let u = Vector::from_slice(&[0.0, 1.0]);
        assert!((b.support(&u).unwrap() - 2.5).abs() < 1e-12);
        let bx = box_set(&[0.0, 0.0], &[1.0, 2.0]);
        assert!((bx.support(&u).unwrap() - 2.0).abs() < 1e-12);
        let h = halfspace(&[0.0, 1.0], 3.0);
        assert!((h.support(&u).unwrap() - 3.0).abs() < 1e-12);
        assert!(matches!(
            h.support(&Vector::from_slice(&[1.0, 0.0])),
            Err(Error::Unbounded)
        ));
    }

    #[test]
    fn sphere_measures() {
        assert_eq!(unit_sphere_measure(1), 2.0);
        assert!((unit_sphere_measure(2) - 2.0 * PI).abs() < 1e-12);
        assert!((unit_sphere_measure(3) - 4.0 * PI).abs() < 1e-12);
        assert!((unit_sphere_measure(5) - 8.0 * PI * PI / 3.0).abs() < 1e-10);
    }

    #[test]
    fn sphere_samples_are_unit_and_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let u = sample_unit_sphere(3, &mut rng);
            assert!((u.norm() - 1.0).abs() < 1e-12);
        }
        let one_d = sample_unit_sphere(1, &mut rng);
        assert!(one_d[0] == 1.0 || one_d[0] == -1.0);

        let mut a = ChaCha8Rng::seed_from_u64(11);
        let mut b = ChaCha8Rng::seed_from_u64(11);
        assert_eq!(sample_unit_sphere(4, &mut a), sample_unit_sphere(4, &mut b));
    }

    #[test]
    fn sphere_sample_mean_vanishes() {
        // law of large numbers at CLT tolerance 3/sqrt(N)
        let n = 100_000;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut mean = Vector::zeros(3);
        for _ in 0..n {
            mean = mean.add(&sample_unit_sphere(3, &mut rng));
        }
        mean = mean.scale(1.0 / n as f64);
        for i in 0..3 {
            assert!(mean[i].abs() < 0.02, "coordinate {i} drifted: {}", mean[i]);
        }
    }

    #[test]
    fn running_intersection_reduces_concentric_balls() {
        let x = ball(&[0.0, 0.0], 1.0);
        let w = Vector::zeros(2);
        let mut run = RunningIntersection::new(&x, &w).unwrap();
        run.intersect(&ball(&[0.0, 0.0], 0.7)).unwrap();
        run.intersect(&ball(&[0.0, 0.0], 0.9)).unwrap();
        match run.current() {
            ConvexSet::Ball { radius, .. } => assert_eq!(*radius, 0.7),
            other => panic!("expected ball, got {other:?}"),
        }
    }

    #[test]
    fn running_intersection_clips_polygons() {
        let x = box_set(&[-1.0, -1.0], &[1.0, 1.0]);
        let w = Vector::zeros(2);
        let mut run = RunningIntersection::new(&x, &w).unwrap();
        run.intersect(&halfspace(&[1.0, 0.0], 0.5)).unwrap();
        run.intersect(&halfspace(&[0.0, 1.0], 0.25)).unwrap();
        let sup_x = run
            .current()
            .support(&Vector::from_slice(&[1.0, 0.0]))
            .unwrap();
        let sup_y = run
            .current()
            .support(&Vector::from_slice(&[0.0, 1.0]))
            .unwrap();
        assert!((sup_x - 0.5).abs() < 1e-9);
        assert!((sup_y - 0.25).abs() < 1e-9);
    }

    #[test]
    fn running_intersection_rejects_bad_witness() {
        let x = ball(&[0.0, 0.0], 1.0);
        let mut run = RunningIntersection::new(&x, &Vector::zeros(2)).unwrap();
        let err = run.intersect(&ball(&[5.0, 0.0], 1.0));
        assert!(matches!(err, Err(Error::EmptySet { .. })));
    }

    #[test]
    fn interval_merge_at_d1() {
        let x = box_set(&[1.0], &[4.0]);
        let w = Vector::from_slice(&[2.0]);
        let mut run = RunningIntersection::new(&x, &w).unwrap();
        run.intersect(&halfspace(&[-1.0], -2.0)).unwrap(); // x >= 2
        match run.current() {
            ConvexSet::Box { lo, hi } => {
                assert_eq!(lo[0], 2.0);
                assert_eq!(hi[0], 4.0);
            }
            other => panic!("expected interval, got {other:?}"),
        }
    }

    #[test]
    fn mixed_intersection_support_ascent() {
        let members = vec![ball(&[0.0, 0.0], 1.0), box_set(&[0.0, -2.0], &[2.0, 2.0])];
        let set = ConvexSet::Intersection {
            members,
            witness: Vector::from_slice(&[0.5, 0.0]),
        };
        let u = Vector::from_slice(&[1.0, 0.0]);
        let s = set.support(&u).unwrap();
        assert!((s - 1.0).abs() < 2e-2, "support {s}");
    }
}
