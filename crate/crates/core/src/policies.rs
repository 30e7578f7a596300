//! Online policies behind a single step-wise contract, plus the runner that
//! plays the interaction protocol and records a full trace.
//!
//! Protocol per round: the policy commits `x_t`, then the round's cost and
//! constraint are revealed, the running intersection `S_t` absorbs the new
//! constraint set, and the policy updates to `x_{t+1}`. Gradients are always
//! evaluated at the committed action, never at a peeked future point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::{positive_part, ScalarConvexFunction};
use crate::geometry::{ConvexSet, RunningIntersection, MEMBERSHIP_TOL};
use crate::vector::{KahanSum, Vector};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One revealed round: cost `f_t`, constraint `g_t` and its zero-sublevel set.
#[derive(Clone, Debug)]
pub struct Round {
    pub cost: ScalarConvexFunction,
    pub constraint: ScalarConvexFunction,
    pub constraint_set: ConvexSet,
}

/// A full problem instance satisfying the standing assumptions: bounded
/// admissible set, a common Lipschitz certificate, and a witness action that
/// is feasible for every round.
#[derive(Clone, Debug)]
pub struct Instance {
    pub family: String,
    pub admissible: ConvexSet,
    pub diameter: f64,
    pub lipschitz: f64,
    pub witness: Vector,
    pub rounds: Vec<Round>,
}

impl Instance {
    /// Validates the assumptions at construction: the witness must belong to
    /// the admissible set and every constraint set (tolerance `1e-8`), and a
    /// sampled support-width check confirms `diameter` really bounds the
    /// admissible set.
    pub fn new(
        family: impl Into<String>,
        admissible: ConvexSet,
        diameter: f64,
        lipschitz: f64,
        witness: Vector,
        rounds: Vec<Round>,
    ) -> Result<Self> {
        let inst = Instance {
            family: family.into(),
            admissible,
            diameter,
            lipschitz,
            witness,
            rounds,
        };
        inst.validate()?;
        Ok(inst)
    }

    fn validate(&self) -> Result<()> {
        if self.rounds.is_empty() {
            return Err(Error::InvalidConfig(
                "instance needs at least one round".into(),
            ));
        }
        if !self.admissible.contains(&self.witness, MEMBERSHIP_TOL)? {
            return Err(Error::InvalidConfig(
                "witness lies outside the admissible set".into(),
            ));
        }
        for (i, r) in self.rounds.iter().enumerate() {
            if r.constraint_set.margin(&self.witness) > MEMBERSHIP_TOL {
                return Err(Error::InvalidConfig(format!(
                    "witness violates the constraint set of round {}",
                    i + 1
                )));
            }
        }
        // sampled width never exceeds the declared diameter
        let mut rng = ChaCha8Rng::seed_from_u64(0xD1A);
        let d = self.dim();
        for _ in 0..16 {
            let u = crate::geometry::sample_unit_sphere(d, &mut rng);
            let width = self
                .admissible
                .support(&u)
                .and_then(|a| Ok(a + self.admissible.support(&u.neg())?))
                .map_err(|_| Error::InvalidConfig("admissible set must be bounded".into()))?;
            if width > self.diameter + 1e-6 {
                return Err(Error::InvalidConfig(format!(
                    "sampled width {width} exceeds declared diameter {}",
                    self.diameter
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.witness.dim()
    }

    pub fn horizon(&self) -> usize {
        self.rounds.len()
    }

    /// Iterator over the nested sets `S_1 ⊇ S_2 ⊇ ...`, rebuilt with the same
    /// reduction rules the runner uses, so metric code sees identical sets.
    pub fn set_sequence(&self) -> Result<SetSequence<'_>> {
        Ok(SetSequence {
            running: RunningIntersection::new(&self.admissible, &self.witness)?,
            rounds: self.rounds.iter(),
        })
    }

    /// The final feasible set `S_T`.
    pub fn final_set(&self) -> Result<ConvexSet> {
        let mut last = None;
        for s in self.set_sequence()? {
            last = Some(s?);
        }
        last.ok_or_else(|| Error::InvalidConfig("empty instance".into()))
    }
}

pub struct SetSequence<'a> {
    running: RunningIntersection,
    rounds: std::slice::Iter<'a, Round>,
}

impl Iterator for SetSequence<'_> {
    type Item = Result<ConvexSet>;

    fn next(&mut self) -> Option<Self::Item> {
        let round = self.rounds.next()?;
        Some(
            self.running
                .intersect(&round.constraint_set)
                .map(|()| self.running.current().clone()),
        )
    }
}

/// Which concrete update rule produced a round's action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyTag {
    ProjOgd,
    Sinha,
}

impl std::fmt::Display for PolicyTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PolicyTag::ProjOgd => write!(f, "proj_ogd"),
            PolicyTag::Sinha => write!(f, "sinha"),
        }
    }
}

/// Everything a policy may look at after committing its round-`t` action.
pub struct Observation<'a> {
    pub t: usize,
    pub cost: &'a ScalarConvexFunction,
    pub constraint: &'a ScalarConvexFunction,
    /// `S_{t-1}` (the admissible set when `t = 1`).
    pub prev_set: &'a ConvexSet,
    /// `S_t`, including the constraint set just revealed.
    pub set: &'a ConvexSet,
}

/// Per-round bookkeeping returned by a policy update.
pub struct StepInfo {
    /// Intermediate point of the update (for the double-projection policy the
    /// first projection's output; for the potential policy the pre-projection
    /// gradient point).
    pub y: Vector,
    pub grad: Vector,
    pub eta: f64,
    pub tag: PolicyTag,
}

pub trait Policy {
    fn name(&self) -> &'static str;
    /// The committed action for the upcoming round.
    fn action(&self) -> &Vector;
    /// Consume the round-`t` feedback and move to the next action.
    fn update(&mut self, obs: &Observation<'_>) -> Result<StepInfo>;
    /// Round at which a meta-policy permanently changed its delegate.
    fn switch_time(&self) -> Option<usize> {
        None
    }
}

/// How a policy picks its first action.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartPoint {
    /// Projection of the origin onto the admissible set.
    #[default]
    ProjectedOrigin,
    /// Seeded point on the boundary of the admissible set, reached from the
    /// witness along a random direction.
    BoundaryRandom,
    /// A fixed point, projected onto the admissible set.
    Fixed(Vec<f64>),
}

impl StartPoint {
    pub fn resolve(&self, instance: &Instance, seed: u64) -> Result<Vector> {
        match self {
            StartPoint::ProjectedOrigin => {
                instance.admissible.project(&Vector::zeros(instance.dim()))
            }
            StartPoint::BoundaryRandom => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x57A2_7000);
                let u = crate::geometry::sample_unit_sphere(instance.dim(), &mut rng);
                Ok(boundary_point(
                    &instance.admissible,
                    &instance.witness,
                    &u,
                    instance.diameter,
                ))
            }
            StartPoint::Fixed(coords) => instance.admissible.project(&Vector::from_slice(coords)),
        }
    }
}

/// Farthest feasible point from `from` along `dir`, found by bisection on the
/// step length.
pub fn boundary_point(set: &ConvexSet, from: &Vector, dir: &Vector, scale: f64) -> Vector {
    let mut lo = 0.0f64;
    let mut hi = scale.max(1e-9);
    // grow until infeasible (from is feasible, sets are bounded)
    while set.margin(&from.add_scaled(dir, hi)) <= 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            break;
        }
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if set.margin(&from.add_scaled(dir, mid)) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    from.add_scaled(dir, lo)
}

// ---------------------------------------------------------------------------
// Projected online gradient descent with the trailing double projection
// ---------------------------------------------------------------------------

/// Gradient step from `x_t`, projected onto `S_{t-1}` to get `y_t`, then onto
/// `S_t` to get `x_{t+1}`. Step size `eta_t = D / (G sqrt(t))`. The second
/// projection runs even when it is redundant; the hyperplane it induces is
/// what the d = 2 analysis keys on.
pub struct ProjOgd {
    x: Vector,
    diameter: f64,
    lipschitz: f64,
}

impl ProjOgd {
    pub fn new(instance: &Instance, start: &StartPoint, seed: u64) -> Result<Self> {
        Ok(ProjOgd {
            x: start.resolve(instance, seed)?,
            diameter: instance.diameter,
            lipschitz: instance.lipschitz,
        })
    }

    pub fn step_size(&self, t: usize) -> f64 {
        self.diameter / (self.lipschitz * (t as f64).sqrt())
    }
}

impl Policy for ProjOgd {
    fn name(&self) -> &'static str {
        "proj_ogd"
    }

    fn action(&self) -> &Vector {
        &self.x
    }

    fn update(&mut self, obs: &Observation<'_>) -> Result<StepInfo> {
        let eta = self.step_size(obs.t);
        let grad = obs.cost.subgradient(&self.x)?;
        let y = obs.prev_set.project(&self.x.add_scaled(&grad, -eta))?;
        self.x = obs.set.project(&y)?;
        Ok(StepInfo {
            y,
            grad,
            eta,
            tag: PolicyTag::ProjOgd,
        })
    }
}

// ---------------------------------------------------------------------------
// Potential-based single-loss policy
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SinhaMode {
    Convex,
    StronglyConvex,
}

/// Folds the running violation into a single surrogate loss
/// `V f~ + Phi'(CCV) g~` and plays adaptive-step projected gradient descent
/// on the admissible set only.
pub struct Sinha {
    x: Vector,
    admissible: ConvexSet,
    diameter: f64,
    mode: SinhaMode,
    beta: f64,
    v_weight: f64,
    lambda: f64,
    ccv_internal: KahanSum,
    grad_sq: KahanSum,
    strong_sum: f64,
    dim: usize,
}

impl Sinha {
    pub fn new(instance: &Instance, mode: SinhaMode) -> Result<Self> {
        let start = instance
            .admissible
            .project(&Vector::zeros(instance.dim()))?;
        let alpha = match mode {
            SinhaMode::Convex => 0.0,
            SinhaMode::StronglyConvex => {
                let a = instance
                    .rounds
                    .iter()
                    .map(|r| r.cost.strong_convexity(instance.dim()))
                    .fold(f64::INFINITY, f64::min);
                if !(a > 0.0 && a.is_finite()) {
                    return Err(Error::InvalidConfig(
                        "strongly convex mode needs strongly convex costs".into(),
                    ));
                }
                a
            }
        };
        Self::build(
            instance.admissible.clone(),
            instance.diameter,
            instance.lipschitz,
            instance.horizon(),
            mode,
            alpha,
            start,
        )
    }

    /// Start from an arbitrary admissible point with fresh counters; the
    /// switching meta-policy hands over its current action here. `horizon` is
    /// the full horizon `T` (the exponential potential keys on it).
    fn build(
        admissible: ConvexSet,
        diameter: f64,
        lipschitz: f64,
        horizon: usize,
        mode: SinhaMode,
        alpha: f64,
        start: Vector,
    ) -> Result<Self> {
        let horizon = horizon as f64;
        let (beta, v_weight, lambda) = match mode {
            SinhaMode::Convex => (
                1.0 / (2.0 * lipschitz * diameter),
                1.0,
                1.0 / (2.0 * horizon.sqrt()),
            ),
            SinhaMode::StronglyConvex => {
                let v = 8.0 * lipschitz * lipschitz * (horizon * std::f64::consts::E).ln() / alpha;
                (1.0, v, 0.0)
            }
        };
        let dim = start.dim();
        Ok(Sinha {
            x: start,
            admissible,
            diameter,
            mode,
            beta,
            v_weight,
            lambda,
            ccv_internal: KahanSum::new(),
            grad_sq: KahanSum::new(),
            strong_sum: 0.0,
            dim,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    fn phi_prime(&self, ccv: f64) -> f64 {
        match self.mode {
            SinhaMode::Convex => self.lambda * (self.lambda * ccv).exp(),
            SinhaMode::StronglyConvex => 2.0 * ccv,
        }
    }
}

impl Policy for Sinha {
    fn name(&self) -> &'static str {
        "sinha"
    }

    fn action(&self) -> &Vector {
        &self.x
    }

    fn update(&mut self, obs: &Observation<'_>) -> Result<StepInfo> {
        let g_val = obs.constraint.eval(&self.x)?;
        self.ccv_internal.add(self.beta * positive_part(g_val));
        let phi_prime = self.phi_prime(self.ccv_internal.value());

        let grad_f = obs.cost.subgradient(&self.x)?;
        let grad_g = if g_val > 0.0 {
            obs.constraint.subgradient(&self.x)?
        } else {
            Vector::zeros(self.dim)
        };
        let grad = grad_f
            .scale(self.beta * self.v_weight)
            .add(&grad_g.scale(self.beta * phi_prime));

        let eta = match self.mode {
            SinhaMode::Convex => {
                self.grad_sq.add(grad.dot(&grad));
                let total = self.grad_sq.value();
                if total <= 0.0 {
                    0.0 // nothing observed yet: stay put
                } else {
                    std::f64::consts::SQRT_2 * self.diameter / (2.0 * total.sqrt())
                }
            }
            SinhaMode::StronglyConvex => {
                self.strong_sum += obs.cost.strong_convexity(self.dim);
                if self.strong_sum <= 0.0 {
                    0.0
                } else {
                    1.0 / self.strong_sum
                }
            }
        };

        let y = self.x.add_scaled(&grad, -eta);
        if eta > 0.0 {
            self.x = self.admissible.project(&y)?;
        }
        Ok(StepInfo {
            y,
            grad,
            eta,
            tag: PolicyTag::Sinha,
        })
    }
}

// ---------------------------------------------------------------------------
// Switching meta-policy
// ---------------------------------------------------------------------------

/// Follows the double-projection policy while its accumulated violation stays
/// below `sqrt(T) ln T`; the first time the threshold is exceeded it hands
/// over -- permanently -- to the potential-based policy with a reset internal
/// violation counter and a fresh gradient accumulator, inheriting the current
/// action. Reported CCV still includes the pre-switch violations.
pub struct Switch {
    ogd: ProjOgd,
    sinha: Option<Sinha>,
    instance_view: InstanceView,
    ccv_pre: KahanSum,
    threshold: f64,
    switched_at: Option<usize>,
}

/// The instance data the post-switch policy needs to boot.
struct InstanceView {
    admissible: ConvexSet,
    diameter: f64,
    lipschitz: f64,
    horizon: usize,
}

impl Switch {
    pub fn new(instance: &Instance, start: &StartPoint, seed: u64) -> Result<Self> {
        let horizon = instance.horizon() as f64;
        Ok(Switch {
            ogd: ProjOgd::new(instance, start, seed)?,
            sinha: None,
            instance_view: InstanceView {
                admissible: instance.admissible.clone(),
                diameter: instance.diameter,
                lipschitz: instance.lipschitz,
                horizon: instance.horizon(),
            },
            ccv_pre: KahanSum::new(),
            // natural logarithm, matching the appendix bound
            threshold: horizon.sqrt() * horizon.ln(),
            switched_at: None,
        })
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }
}

impl Policy for Switch {
    fn name(&self) -> &'static str {
        "switch"
    }

    fn action(&self) -> &Vector {
        match &self.sinha {
            Some(s) => s.action(),
            None => self.ogd.action(),
        }
    }

    fn update(&mut self, obs: &Observation<'_>) -> Result<StepInfo> {
        if self.sinha.is_none() && self.ccv_pre.value() <= self.threshold {
            let violation = positive_part(obs.constraint.eval(self.ogd.action())?);
            let info = self.ogd.update(obs)?;
            self.ccv_pre.add(violation);
            return Ok(info);
        }
        if self.sinha.is_none() {
            // permanent hand-over, inheriting the current action
            let sinha = Sinha::build(
                self.instance_view.admissible.clone(),
                self.instance_view.diameter,
                self.instance_view.lipschitz,
                self.instance_view.horizon,
                SinhaMode::Convex,
                0.0,
                self.ogd.action().clone(),
            )?;
            self.switched_at = Some(obs.t);
            self.sinha = Some(sinha);
        }
        self.sinha.as_mut().unwrap().update(obs)
    }

    fn switch_time(&self) -> Option<usize> {
        self.switched_at
    }
}

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

/// State of one completed round.
#[derive(Clone, Debug, Serialize)]
pub struct RoundRecord {
    pub t: usize,
    pub x: Vector,
    pub y: Vector,
    pub b: Vector,
    pub cost: f64,
    pub violation: f64,
    pub dist: f64,
    pub grad: Vector,
    pub eta: f64,
    pub ccv_running: f64,
    pub tag: PolicyTag,
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceMeta {
    pub policy: String,
    pub family: String,
    pub seed: u64,
    pub dim: usize,
    pub horizon: usize,
    pub diameter: f64,
    pub lipschitz: f64,
}

/// Result of one policy run. Immutable once complete and safe to share.
#[derive(Clone, Debug)]
pub struct Trace {
    pub records: Vec<RoundRecord>,
    pub meta: TraceMeta,
    pub valid: bool,
    pub failure: Option<String>,
    pub switch_time: Option<usize>,
    pub final_set: Option<ConvexSet>,
}

impl Trace {
    pub fn total_ccv(&self) -> f64 {
        self.records.last().map(|r| r.ccv_running).unwrap_or(0.0)
    }
}

/// Plays the full interaction protocol of `policy` against `instance`.
///
/// The runner computes `b_t` (the projection of the committed action onto
/// `S_t`), the violation `(g_t(x_t))^+` and the running CCV with compensated
/// summation. A projection failure aborts the run and flags the partial
/// trace invalid rather than discarding it.
pub fn run_policy(instance: &Instance, policy: &mut dyn Policy, seed: u64) -> Result<Trace> {
    let mut running = RunningIntersection::new(&instance.admissible, &instance.witness)?;
    let mut records: Vec<RoundRecord> = Vec::with_capacity(instance.horizon());
    let mut ccv = KahanSum::new();
    let mut failure: Option<String> = None;

    for (idx, round) in instance.rounds.iter().enumerate() {
        let t = idx + 1;
        let x = policy.action().clone();
        let prev_set = running.current().clone();
        let step = (|| -> Result<RoundRecord> {
            running.intersect(&round.constraint_set)?;
            let set = running.current();
            let cost = round.cost.eval(&x)?;
            let violation = positive_part(round.constraint.eval(&x)?);
            let b = set.project(&x)?;
            let dist = x.dist(&b);
            let info = policy.update(&Observation {
                t,
                cost: &round.cost,
                constraint: &round.constraint,
                prev_set: &prev_set,
                set,
            })?;
            ccv.add(violation);
            Ok(RoundRecord {
                t,
                x,
                y: info.y,
                b,
                cost,
                violation,
                dist,
                grad: info.grad,
                eta: info.eta,
                ccv_running: ccv.value(),
                tag: info.tag,
            })
        })();
        match step {
            Ok(rec) => records.push(rec),
            Err(e) => {
                failure = Some(e.to_string());
                break;
            }
        }
    }

    let valid = failure.is_none();
    Ok(Trace {
        meta: TraceMeta {
            policy: policy.name().to_string(),
            family: instance.family.clone(),
            seed,
            dim: instance.dim(),
            horizon: instance.horizon(),
            diameter: instance.diameter,
            lipschitz: instance.lipschitz,
        },
        switch_time: policy.switch_time(),
        final_set: valid.then(|| running.current().clone()),
        records,
        valid,
        failure,
    })
}
