//! Dykstra's alternating projection scheme for intersections of convex sets.
//!
//! Unlike plain cyclic projections, Dykstra's correction vectors make the
//! iterates converge to the exact Euclidean projection onto the intersection,
//! not merely to some feasible point.

use crate::error::{Error, Result};
use crate::geometry::ConvexSet;
use crate::vector::Vector;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_CYCLES: usize = 10_000;

/// Projects `x` onto the intersection of `members`.
///
/// Stops when both the correction-vector displacement over a full cycle and
/// the worst feasibility residual fall below `tol`. Deterministic for a fixed
/// member order.
pub fn dykstra_project(
    members: &[ConvexSet],
    x: &Vector,
    tol: f64,
    max_cycles: usize,
) -> Result<Vector> {
    let elems = flatten(members);
    if elems.is_empty() {
        return Ok(x.clone());
    }
    if elems.len() == 1 {
        return elems[0].project(x);
    }
    let d = x.dim();
    let mut z = x.clone();
    let mut corrections: Vec<Vector> = vec![Vector::zeros(d); elems.len()];
    let mut residual = f64::INFINITY;
    for _cycle in 0..max_cycles {
        let mut correction_shift2 = 0.0f64;
        for (i, set) in elems.iter().enumerate() {
            let target = z.add(&corrections[i]);
            let projected = set.project(&target)?;
            let new_correction = target.sub(&projected);
            let delta = new_correction.sub(&corrections[i]);
            correction_shift2 += delta.dot(&delta);
            corrections[i] = new_correction;
            z = projected;
        }
        residual = elems
            .iter()
            .map(|s| s.margin(&z).max(0.0))
            .fold(0.0, f64::max);
        if correction_shift2.sqrt() <= tol && residual <= tol.max(1e-12) {
            return Ok(z);
        }
    }
    Err(Error::NonConvergence {
        cycles: max_cycles,
        residual,
    })
}

/// Expands nested intersections and polytopes without cached vertices into
/// their elementary members, so every cyclic step is an exact projection.
fn flatten(members: &[ConvexSet]) -> Vec<ConvexSet> {
    let mut out = Vec::with_capacity(members.len());
    for m in members {
        match m {
            ConvexSet::Intersection { members, .. } => out.extend(flatten(members)),
            ConvexSet::Polytope(p) if p.vertices.is_empty() => {
                out.extend(p.halfspaces.iter().cloned().map(ConvexSet::Halfspace));
            }
            other => out.push(other.clone()),
        }
    }
    out
}
