//! Shared test oracles, kept independent of the projection machinery they
//! check: membership uses closed-form margins only, and minimization is a
//! literal grid sweep with local refinement.

use coco_core::geometry::ConvexSet;
use coco_core::vector::Vector;

/// Axis-aligned bounding box of a bounded set (d = 2), intersected over
/// members for intersections.
pub fn bounding_box_2d(set: &ConvexSet) -> ([f64; 2], [f64; 2]) {
    match set {
        ConvexSet::Ball { center, radius } => (
            [center[0] - radius, center[1] - radius],
            [center[0] + radius, center[1] + radius],
        ),
        ConvexSet::Box { lo, hi } => ([lo[0], lo[1]], [hi[0], hi[1]]),
        ConvexSet::Polytope(p) => {
            let mut lo = [f64::INFINITY; 2];
            let mut hi = [f64::NEG_INFINITY; 2];
            for v in &p.vertices {
                for i in 0..2 {
                    lo[i] = lo[i].min(v[i]);
                    hi[i] = hi[i].max(v[i]);
                }
            }
            (lo, hi)
        }
        ConvexSet::Halfspace(_) => ([f64::NEG_INFINITY; 2], [f64::INFINITY; 2]),
        ConvexSet::Intersection { members, .. } => {
            let mut lo = [f64::NEG_INFINITY; 2];
            let mut hi = [f64::INFINITY; 2];
            for m in members {
                let (ml, mh) = bounding_box_2d(m);
                for i in 0..2 {
                    lo[i] = lo[i].max(ml[i]);
                    hi[i] = hi[i].min(mh[i]);
                }
            }
            (lo, hi)
        }
    }
}

/// Nearest point of `set` to `x`, via a direction sweep with radial
/// bisection on the closed-form membership margin, locally refined in angle.
/// Exact membership only; never touches `project`.
///
/// A plain rectangular grid stalls on curved boundaries (the best grid point
/// hugs the boundary at an essentially random arc position), so the sweep is
/// over ray directions: for each direction the first feasible radius is
/// bisected to machine precision, and the minimizing direction is refined.
/// The ray through the true projection has maximal penetration, so nearby
/// sampled directions always see a fat feasible segment.
pub fn oracle_project_2d(set: &ConvexSet, x: &Vector, initial_dirs: usize) -> Option<Vector> {
    if set.margin(x) <= 1e-12 {
        return Some(x.clone());
    }
    let (lo, hi) = bounding_box_2d(set);
    if !lo.iter().all(|v| v.is_finite()) || !hi.iter().all(|v| v.is_finite()) {
        return None;
    }
    // every feasible point lies within r_max of x
    let corners = [
        [lo[0], lo[1]],
        [lo[0], hi[1]],
        [hi[0], lo[1]],
        [hi[0], hi[1]],
    ];
    let r_max = corners
        .iter()
        .map(|c| ((c[0] - x[0]).powi(2) + (c[1] - x[1]).powi(2)).sqrt())
        .fold(0.0f64, f64::max);

    let entry_radius = |phi: f64| -> Option<f64> {
        let dir = [phi.cos(), phi.sin()];
        let at = |r: f64| Vector(vec![x[0] + r * dir[0], x[1] + r * dir[1]]);
        // bracket: find any feasible radius along the ray
        let mut hi_r = None;
        for k in 1..=512 {
            let r = r_max * k as f64 / 512.0;
            if set.margin(&at(r)) <= 0.0 {
                hi_r = Some(r);
                break;
            }
        }
        let mut hi_r = hi_r?;
        let mut lo_r = 0.0f64;
        for _ in 0..80 {
            let mid = 0.5 * (lo_r + hi_r);
            if set.margin(&at(mid)) <= 0.0 {
                hi_r = mid;
            } else {
                lo_r = mid;
            }
        }
        Some(hi_r)
    };

    let n0 = initial_dirs.max(64);
    let mut best: Option<(f64, f64)> = None; // (phi, radius)
    for k in 0..n0 {
        let phi = std::f64::consts::TAU * k as f64 / n0 as f64;
        if let Some(r) = entry_radius(phi) {
            if best.map_or(true, |(_, br)| r < br) {
                best = Some((phi, r));
            }
        }
    }
    let (mut phi_best, mut r_best) = best?;
    let mut window = std::f64::consts::TAU / n0 as f64;
    for _ in 0..6 {
        for k in 0..=64 {
            let phi = phi_best - window + 2.0 * window * k as f64 / 64.0;
            if let Some(r) = entry_radius(phi) {
                if r < r_best {
                    r_best = r;
                    phi_best = phi;
                }
            }
        }
        window /= 16.0;
    }
    Some(Vector(vec![
        x[0] + r_best * phi_best.cos(),
        x[1] + r_best * phi_best.sin(),
    ]))
}
