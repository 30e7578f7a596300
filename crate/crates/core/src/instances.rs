//! Seeded generators for the benchmark problem families. Every family emits
//! a validated `Instance` with a certified diameter, Lipschitz constant and
//! feasibility witness.
//!
//! The certified `G` covers the constraint functions (and the costs for all
//! families except the one-dimensional worst case, whose cost scale is
//! deliberately much larger than the constraint scale).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::ScalarConvexFunction;
use crate::geometry::{ball, box_set, sample_unit_sphere, ConvexSet, Halfspace, Polytope};
use crate::metrics::{monotonicity_check, projection_hyperplanes};
use crate::policies::{run_policy, Instance, ProjOgd, Round, StartPoint};
use crate::vector::Vector;

/// Whether a family draws costs or plays pure constraint satisfaction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CostMode {
    #[default]
    Zero,
    RandomAffine,
}

/// Family-specific parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Family {
    NestedBalls {
        diameter: f64,
        shrink: f64,
        cost_mode: CostMode,
    },
    NestedBoxes {
        diameter: f64,
        shrink: f64,
        cost_mode: CostMode,
    },
    WorstCaseD1 {
        a: f64,
        c: f64,
    },
    OcsRandom {
        diameter: f64,
    },
    Monotone2d {
        diameter: f64,
        /// Constant per-round rotation of the cutting halfspace, radians.
        step: f64,
    },
    RotatingPolytope {
        diameter: f64,
        rotation_step: f64,
        /// Slab half-width as a fraction of the diameter.
        slab_frac: f64,
    },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::NestedBalls { .. } => "nested_balls",
            Family::NestedBoxes { .. } => "nested_boxes",
            Family::WorstCaseD1 { .. } => "worst_case_d1",
            Family::OcsRandom { .. } => "ocs_random",
            Family::Monotone2d { .. } => "monotone_2d",
            Family::RotatingPolytope { .. } => "rotating_polytope",
        }
    }
}

/// Everything needed to regenerate an instance deterministically. Round data
/// is never stored: it is a pure function of this descriptor.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: Family,
    pub d: usize,
    pub horizon: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<Instance> {
        if self.horizon < 1 {
            return Err(Error::InvalidConfig("horizon must be at least 1".into()));
        }
        if self.d < 1 {
            return Err(Error::InvalidConfig("dimension must be at least 1".into()));
        }
        match &self.family {
            Family::NestedBalls {
                diameter,
                shrink,
                cost_mode,
            } => gen_nested_balls(
                self.d,
                self.horizon,
                *diameter,
                *shrink,
                *cost_mode,
                self.seed,
            ),
            Family::NestedBoxes {
                diameter,
                shrink,
                cost_mode,
            } => gen_nested_boxes(
                self.d,
                self.horizon,
                *diameter,
                *shrink,
                *cost_mode,
                self.seed,
            ),
            Family::WorstCaseD1 { a, c } => {
                if self.d != 1 {
                    return Err(Error::InvalidConfig(
                        "worst_case_d1 is one-dimensional".into(),
                    ));
                }
                gen_worst_case_d1(*a, *c, self.horizon, self.seed)
            }
            Family::OcsRandom { diameter } => {
                gen_ocs_random(self.d, self.horizon, *diameter, self.seed)
            }
            Family::Monotone2d { diameter, step } => {
                if self.d != 2 {
                    return Err(Error::InvalidConfig(
                        "monotone_2d is two-dimensional".into(),
                    ));
                }
                let schedule = vec![*step; self.horizon];
                gen_monotone_2d(*diameter, &schedule, self.seed)
            }
            Family::RotatingPolytope {
                diameter,
                rotation_step,
                slab_frac,
            } => gen_rotating_polytope(
                self.d,
                self.horizon,
                *diameter,
                *rotation_step,
                *slab_frac,
                self.seed,
            ),
        }
    }

    /// Serializable identity of a generated instance.
    pub fn describe(&self, instance: &Instance) -> InstanceDescriptor {
        InstanceDescriptor {
            family: self.family.clone(),
            d: self.d,
            horizon: self.horizon,
            seed: self.seed,
            witness: instance.witness.clone(),
            diameter: instance.diameter,
            lipschitz: instance.lipschitz,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceDescriptor {
    pub family: Family,
    pub d: usize,
    pub horizon: usize,
    pub seed: u64,
    pub witness: Vector,
    pub diameter: f64,
    pub lipschitz: f64,
}

fn maybe_affine_cost<R: Rng + ?Sized>(
    mode: CostMode,
    d: usize,
    rng: &mut R,
) -> ScalarConvexFunction {
    match mode {
        CostMode::Zero => ScalarConvexFunction::zero(),
        CostMode::RandomAffine => {
            let u = sample_unit_sphere(d, rng);
            let mag: f64 = 0.2 + 0.8 * rng.random::<f64>();
            ScalarConvexFunction::affine(u.scale(mag), 0.0)
        }
    }
}

/// Concentric balls shrinking linearly: `r_t = R (1 - shrink t/T)`, `R = D/2`.
pub fn gen_nested_balls(
    d: usize,
    horizon: usize,
    diameter: f64,
    shrink: f64,
    cost_mode: CostMode,
    seed: u64,
) -> Result<Instance> {
    if d < 2 {
        return Err(Error::InvalidConfig("nested_balls needs d >= 2".into()));
    }
    if !(0.0..1.0).contains(&shrink) {
        return Err(Error::InvalidConfig("shrink must lie in [0, 1)".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = diameter / 2.0;
    let center = vec![0.0; d];
    let admissible = ball(&center, radius);
    let rounds: Vec<Round> = (1..=horizon)
        .map(|t| {
            let r_t = radius * (1.0 - shrink * t as f64 / horizon as f64);
            let set = ball(&center, r_t);
            Round {
                cost: maybe_affine_cost(cost_mode, d, &mut rng),
                constraint: ScalarConvexFunction::set_margin(set.clone()),
                constraint_set: set,
            }
        })
        .collect();
    Instance::new(
        "nested_balls",
        admissible,
        diameter,
        1.0,
        Vector::zeros(d),
        rounds,
    )
}

/// Axis-parallel boxes shrinking around a common center, with seeded per-axis
/// shrink rates.
pub fn gen_nested_boxes(
    d: usize,
    horizon: usize,
    diameter: f64,
    shrink: f64,
    cost_mode: CostMode,
    seed: u64,
) -> Result<Instance> {
    if d < 2 {
        return Err(Error::InvalidConfig("nested_boxes needs d >= 2".into()));
    }
    if !(0.0..1.0).contains(&shrink) {
        return Err(Error::InvalidConfig("shrink must lie in [0, 1)".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = diameter / (2.0 * (d as f64).sqrt());
    let rates: Vec<f64> = (0..d)
        .map(|_| shrink * (0.5 + 0.5 * rng.random::<f64>()))
        .collect();
    let admissible = box_set(&vec![-half; d], &vec![half; d]);
    let rounds: Vec<Round> = (1..=horizon)
        .map(|t| {
            let frac = t as f64 / horizon as f64;
            let lo: Vec<f64> = rates.iter().map(|s| -half * (1.0 - s * frac)).collect();
            let hi: Vec<f64> = rates.iter().map(|s| half * (1.0 - s * frac)).collect();
            let set = box_set(&lo, &hi);
            Round {
                cost: maybe_affine_cost(cost_mode, d, &mut rng),
                constraint: ScalarConvexFunction::set_margin(set.clone()),
                constraint_set: set,
            }
        })
        .collect();
    Instance::new(
        "nested_boxes",
        admissible,
        diameter,
        1.0,
        Vector::zeros(d),
        rounds,
    )
}

/// The one-dimensional stress case: `X = [1, a]`, constant cost `c x^2` and
/// constant constraint `g(x) = a/2 - x`, so the feasible set is `[a/2, a]`.
///
/// The certified Lipschitz constant is the constraint's (`G = 1`); the cost's
/// much larger bound `2ca` is carried on the cost function itself.
pub fn gen_worst_case_d1(a: f64, c: f64, horizon: usize, _seed: u64) -> Result<Instance> {
    if a <= 2.0 {
        return Err(Error::InvalidConfig("worst_case_d1 needs a > 2".into()));
    }
    if c <= 0.0 {
        return Err(Error::InvalidConfig("worst_case_d1 needs c > 0".into()));
    }
    let admissible = box_set(&[1.0], &[a]);
    let feasible = box_set(&[a / 2.0], &[a]);
    let rounds: Vec<Round> = (0..horizon)
        .map(|_| Round {
            cost: ScalarConvexFunction::scaled_square(c, 2.0 * c * a),
            // g(x) = a/2 - x, 1-Lipschitz with {g <= 0} = [a/2, a] inside X
            constraint: ScalarConvexFunction::affine(Vector::from_slice(&[-1.0]), a / 2.0),
            constraint_set: feasible.clone(),
        })
        .collect();
    Instance::new(
        "worst_case_d1",
        admissible,
        a - 1.0,
        1.0,
        Vector::from_slice(&[a / 2.0]),
        rounds,
    )
}

/// Pure constraint satisfaction with random halfspaces through points near a
/// fixed witness, oriented to keep the witness feasible.
pub fn gen_ocs_random(d: usize, horizon: usize, diameter: f64, seed: u64) -> Result<Instance> {
    if d < 2 {
        return Err(Error::InvalidConfig("ocs_random needs d >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = diameter / (2.0 * (d as f64).sqrt());
    let admissible = box_set(&vec![-half; d], &vec![half; d]);
    let witness = Vector::zeros(d);
    let rounds: Vec<Round> = (0..horizon)
        .map(|_| {
            let dir = sample_unit_sphere(d, &mut rng);
            let rho = diameter / 4.0 * rng.random::<f64>().powf(1.0 / d as f64);
            let anchor = dir.scale(rho);
            let mut normal = sample_unit_sphere(d, &mut rng);
            // orient so the witness stays on the feasible side
            if normal.dot(&witness.sub(&anchor)) > 0.0 {
                normal = normal.neg();
            }
            let offset = normal.dot(&anchor);
            let set = ConvexSet::Halfspace(Halfspace { normal, offset });
            Round {
                cost: ScalarConvexFunction::zero(),
                constraint: ScalarConvexFunction::set_margin(set.clone()),
                constraint_set: set,
            }
        })
        .collect();
    Instance::new("ocs_random", admissible, diameter, 1.0, witness, rounds)
}

/// Halfspace cuts whose normals rotate by a non-decreasing positive schedule
/// (summing to at most pi) while the cutting boundary creeps toward the
/// witness; a fixed affine pull presses the iterate against the sweep so the
/// induced projection hyperplanes rotate monotonically.
///
/// The construction is validated post hoc by running the double-projection
/// policy and checking monotonicity; on failure the press geometry is varied
/// and the run retried (up to 32 times).
pub fn gen_monotone_2d(diameter: f64, schedule: &[f64], seed: u64) -> Result<Instance> {
    if schedule.is_empty() {
        return Err(Error::InvalidConfig("schedule must be non-empty".into()));
    }
    if schedule.iter().any(|s| *s < 0.0) {
        return Err(Error::InvalidConfig(
            "schedule steps must be positive".into(),
        ));
    }
    if schedule.windows(2).any(|w| w[1] < w[0] - 1e-15) {
        return Err(Error::InvalidConfig(
            "schedule steps must be non-decreasing".into(),
        ));
    }
    let total: f64 = schedule.iter().sum();
    if total > std::f64::consts::PI + 1e-12 {
        return Err(Error::InvalidConfig(
            "schedule must sum to at most pi".into(),
        ));
    }

    for attempt in 0..32u64 {
        let instance = build_monotone_attempt(diameter, schedule, seed, attempt)?;
        let mut policy = ProjOgd::new(&instance, &StartPoint::ProjectedOrigin, seed)?;
        let trace = run_policy(&instance, &mut policy, seed)?;
        if !trace.valid {
            continue;
        }
        let normals = projection_hyperplanes(&trace);
        if normals.len() < 2 {
            continue;
        }
        if monotonicity_check(&normals).monotone {
            return Ok(instance);
        }
    }
    Err(Error::MonotonicityUnattainable { retries: 32 })
}

pub fn build_monotone_attempt(
    diameter: f64,
    schedule: &[f64],
    seed: u64,
    attempt: u64,
) -> Result<Instance> {
    let horizon = schedule.len();
    let half = diameter / (2.0 * 2f64.sqrt());
    let admissible = box_set(&[-half, -half], &[half, half]);
    let witness = Vector::zeros(2);

    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9)));
    // cutting boundary starts at a fraction of the box and creeps inward
    let rho0 = half * (0.30 + 0.05 * rng.random::<f64>());
    // press ahead of the sweep: the iterate must stay on the side the
    // rotating normal is turning toward, otherwise the cuts stop reaching it
    let total: f64 = schedule.iter().sum();
    let tilt = total * (0.70 + 0.10 * rng.random::<f64>()) + 0.02 * attempt as f64 / 32.0;
    let press = Vector(vec![-tilt.sin(), tilt.cos()]);
    let press = press.normalized().unwrap();
    // pull magnitude ~ 1/sqrt(T): strong enough to keep the iterate pressed
    // against the sweep, weak enough that the cumulative tangential slide
    // stays well inside the box
    let kappa = (0.2 / (horizon as f64).sqrt()) * (1.0 + 0.2 * rng.random::<f64>());

    let mut theta = 0.0f64;
    let rounds: Vec<Round> = schedule
        .iter()
        .enumerate()
        .map(|(idx, step)| {
            theta += step;
            let t = idx + 1;
            let normal = Vector(vec![-theta.sin(), theta.cos()]);
            let rho = rho0 * (1.0 - 0.5 * t as f64 / horizon as f64);
            let set = ConvexSet::Halfspace(Halfspace {
                normal,
                offset: rho,
            });
            Round {
                cost: ScalarConvexFunction::affine(press.scale(-kappa), 0.0),
                constraint: ScalarConvexFunction::set_margin(set.clone()),
                constraint_set: set,
            }
        })
        .collect();
    Instance::new("monotone_2d", admissible, diameter, 1.0, witness, rounds)
}

/// A thin slab (two parallel halfspaces) through the witness, rotating each
/// round. Long slivers with a small cone cosine stress the switching
/// threshold: the sliver's tip recedes round after round and the chasing
/// policy pays the full recession as violation.
pub fn gen_rotating_polytope(
    d: usize,
    horizon: usize,
    diameter: f64,
    rotation_step: f64,
    slab_frac: f64,
    seed: u64,
) -> Result<Instance> {
    if d < 2 {
        return Err(Error::InvalidConfig(
            "rotating_polytope needs d >= 2".into(),
        ));
    }
    if slab_frac <= 0.0 || slab_frac > 0.5 {
        return Err(Error::InvalidConfig(
            "slab_frac must lie in (0, 0.5]".into(),
        ));
    }
    let _ = seed; // the construction is deterministic
    let half = diameter / (2.0 * (d as f64).sqrt());
    let admissible = box_set(&vec![-half; d], &vec![half; d]);
    let witness = Vector::zeros(d);
    let h = slab_frac * diameter;
    let rounds: Vec<Round> = (1..=horizon)
        .map(|t| {
            let theta = rotation_step * t as f64;
            let mut up = vec![0.0; d];
            up[0] = -theta.sin();
            up[1] = theta.cos();
            let normal = Vector(up);
            let slab = Polytope::from_halfspaces(vec![
                Halfspace {
                    normal: normal.clone(),
                    offset: h,
                },
                Halfspace {
                    normal: normal.neg(),
                    offset: h,
                },
            ]);
            let set = ConvexSet::Polytope(slab);
            Round {
                cost: ScalarConvexFunction::zero(),
                constraint: ScalarConvexFunction::set_margin(set.clone()),
                constraint_set: set,
            }
        })
        .collect();
    Instance::new(
        "rotating_polytope",
        admissible,
        diameter,
        1.0,
        witness,
        rounds,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policies::PolicyTag;

    #[test]
    fn nested_ball_radii_follow_formula() {
        let inst = gen_nested_balls(2, 4, 2.0, 0.5, CostMode::Zero, 0).unwrap();
        let expected = [0.875, 0.75, 0.625, 0.5];
        for (round, want) in inst.rounds.iter().zip(expected) {
            match &round.constraint_set {
                ConvexSet::Ball { radius, .. } => assert!((radius - want).abs() < 1e-12),
                other => panic!("expected ball, got {other:?}"),
            }
        }
        // intersection of concentric balls is the smallest ball
        match inst.final_set().unwrap() {
            ConvexSet::Ball { radius, .. } => assert!((radius - 0.5).abs() < 1e-12),
            other => panic!("expected ball, got {other:?}"),
        }
    }

    #[test]
    fn nested_boxes_center_feasible_and_nested() {
        let inst = gen_nested_boxes(3, 10, 2.0, 0.5, CostMode::RandomAffine, 7).unwrap();
        let sets: Vec<ConvexSet> = inst.set_sequence().unwrap().map(|s| s.unwrap()).collect();
        for w in sets.windows(2) {
            // sampled inclusion: corners of the later box belong to the earlier
            if let ConvexSet::Box { lo, hi } = &w[1] {
                for corner in [lo, hi] {
                    assert!(w[0].margin(corner) <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn worst_case_values() {
        let inst = gen_worst_case_d1(4.0, 10.0, 5, 0).unwrap();
        assert_eq!(inst.diameter, 3.0);
        assert_eq!(inst.lipschitz, 1.0);
        let g = &inst.rounds[0].constraint;
        assert_eq!(g.eval(&Vector::from_slice(&[3.0])).unwrap(), -1.0);
        assert_eq!(g.eval(&Vector::from_slice(&[1.5])).unwrap(), 0.5);
        // projection policy violates only in round one
        let mut ogd = ProjOgd::new(&inst, &StartPoint::ProjectedOrigin, 0).unwrap();
        let trace = run_policy(&inst, &mut ogd, 0).unwrap();
        for rec in &trace.records[1..] {
            assert_eq!(rec.violation, 0.0, "round {}", rec.t);
        }
    }

    #[test]
    fn worst_case_rejects_small_a() {
        assert!(gen_worst_case_d1(2.0, 1.0, 5, 0).is_err());
    }

    #[test]
    fn ocs_random_witness_always_feasible() {
        let inst = gen_ocs_random(2, 50, 2.0, 3).unwrap();
        for r in &inst.rounds {
            assert!(r.constraint_set.margin(&inst.witness) <= 1e-12);
        }
    }

    #[test]
    fn generators_are_deterministic() {
        let a = gen_ocs_random(2, 20, 2.0, 11).unwrap();
        let b = gen_ocs_random(2, 20, 2.0, 11).unwrap();
        for (ra, rb) in a.rounds.iter().zip(&b.rounds) {
            assert_eq!(ra.constraint_set, rb.constraint_set);
        }
        let c = gen_ocs_random(2, 20, 2.0, 12).unwrap();
        let same = a
            .rounds
            .iter()
            .zip(&c.rounds)
            .all(|(ra, rc)| ra.constraint_set == rc.constraint_set);
        assert!(!same, "different seeds must differ");
    }

    #[test]
    fn monotone_generator_produces_monotone_trace() {
        let schedule = vec![5f64.to_radians(); 20];
        let inst = gen_monotone_2d(2.0, &schedule, 5).unwrap();
        let mut ogd = ProjOgd::new(&inst, &StartPoint::ProjectedOrigin, 5).unwrap();
        let trace = run_policy(&inst, &mut ogd, 5).unwrap();
        let normals = projection_hyperplanes(&trace);
        assert!(normals.len() >= 2);
        let rep = monotonicity_check(&normals);
        assert!(rep.monotone);
        let total: f64 = schedule.iter().sum();
        if let Some((_, last)) = rep.theta.last() {
            assert!(*last <= total + 1e-6);
        }
    }

    #[test]
    fn monotone_rejects_decreasing_schedule() {
        let schedule = vec![0.2, 0.1];
        assert!(matches!(
            gen_monotone_2d(2.0, &schedule, 0),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn rotating_slab_zero_step_degenerates() {
        let inst = gen_rotating_polytope(2, 20, 2.0, 0.0, 0.05, 0).unwrap();
        let mut ogd = ProjOgd::new(&inst, &StartPoint::BoundaryRandom, 1).unwrap();
        let trace = run_policy(&inst, &mut ogd, 1).unwrap();
        assert!(trace.valid);
        // fixed slab: once projected, no further violation
        for rec in &trace.records[1..] {
            assert!(rec.violation <= 1e-9, "round {} violated", rec.t);
        }
        assert!(trace.records.iter().all(|r| r.tag == PolicyTag::ProjOgd));
    }

    #[test]
    fn rotating_slab_witness_feasible() {
        let inst = gen_rotating_polytope(2, 30, 2.0, 0.1, 0.01, 0).unwrap();
        for r in &inst.rounds {
            assert!(r.constraint_set.margin(&inst.witness) <= 1e-12);
        }
    }

    #[test]
    fn spec_build_dispatch_and_validation() {
        let spec = GeneratorSpec {
            family: Family::NestedBalls {
                diameter: 2.0,
                shrink: 0.5,
                cost_mode: CostMode::Zero,
            },
            d: 2,
            horizon: 4,
            seed: 0,
        };
        let inst = spec.build().unwrap();
        assert_eq!(inst.horizon(), 4);
        let desc = spec.describe(&inst);
        let json = serde_json::to_string(&desc).unwrap();
        assert!(json.contains("nested_balls"));

        let bad = GeneratorSpec {
            family: Family::WorstCaseD1 { a: 4.0, c: 10.0 },
            d: 2,
            horizon: 4,
            seed: 0,
        };
        assert!(bad.build().is_err());
    }

    #[test]
    fn monotone_zero_steps_trivially_monotone() {
        let schedule = vec![0.0; 30];
        let inst = gen_monotone_2d(2.0, &schedule, 1).unwrap();
        let mut ogd = ProjOgd::new(&inst, &StartPoint::ProjectedOrigin, 1).unwrap();
        let trace = run_policy(&inst, &mut ogd, 1).unwrap();
        let normals = projection_hyperplanes(&trace);
        let rep = monotonicity_check(&normals);
        assert!(rep.monotone);
        assert!(rep.theta.iter().all(|(_, a)| *a < 1e-9));
    }
}
