//! Experiment front-end: single runs, horizon sweeps, and bound verification,
//! emitting machine-readable reports plus optional SVG charts.

pub mod output;
pub mod svg;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::FunctionKind;
use crate::instances::GeneratorSpec;
use crate::metrics::{
    cone_c_estimate, curve_length, fit_power_law, mean_and_stderr, movement_cost,
    self_expanded_check, width_decrement_check, MetricsOptions, MetricsReport, PolylineCurve,
};
use crate::policies::{
    run_policy, Instance, Policy, ProjOgd, Sinha, SinhaMode, StartPoint, Switch, Trace,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyChoice {
    Sinha,
    ProjOgd,
    Switch,
}

impl std::fmt::Display for PolicyChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PolicyChoice::Sinha => write!(f, "sinha"),
            PolicyChoice::ProjOgd => write!(f, "proj_ogd"),
            PolicyChoice::Switch => write!(f, "switch"),
        }
    }
}

impl std::str::FromStr for PolicyChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sinha" => Ok(PolicyChoice::Sinha),
            "proj_ogd" => Ok(PolicyChoice::ProjOgd),
            "switch" => Ok(PolicyChoice::Switch),
            other => Err(Error::InvalidConfig(format!(
                "policy: unknown value `{other}` (expected sinha | proj_ogd | switch)"
            ))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolicyParams {
    #[serde(default)]
    pub start: StartPoint,
    #[serde(default = "default_mode")]
    pub mode: SinhaMode,
}

fn default_mode() -> SinhaMode {
    SinhaMode::Convex
}

impl Default for PolicyParams {
    fn default() -> Self {
        PolicyParams {
            start: StartPoint::default(),
            mode: SinhaMode::Convex,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricsConfig {
    #[serde(default)]
    pub c_star: bool,
    #[serde(default)]
    pub widths: bool,
    #[serde(default)]
    pub monotonicity: bool,
    #[serde(default = "default_cone_samples")]
    pub cone_samples: usize,
    #[serde(default = "default_width_dirs")]
    pub width_dirs: usize,
}

fn default_cone_samples() -> usize {
    10_000
}

fn default_width_dirs() -> usize {
    4096
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig {
            c_star: false,
            widths: false,
            monotonicity: false,
            cone_samples: default_cone_samples(),
            width_dirs: default_width_dirs(),
        }
    }
}

/// One experiment: a generator, a policy, and the (seed, horizon) grid to
/// run it over.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub generator: GeneratorSpec,
    pub policy: PolicyChoice,
    #[serde(default)]
    pub policy_params: PolicyParams,
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub t_sweep: Vec<usize>,
    pub out_dir: PathBuf,
    #[serde(default)]
    pub metrics: MetricsConfig,
    #[serde(default)]
    pub plots: bool,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
    }

    pub fn seeds(&self) -> Vec<u64> {
        if self.seeds.is_empty() {
            vec![self.generator.seed]
        } else {
            self.seeds.clone()
        }
    }

    pub fn horizons(&self) -> Vec<usize> {
        if self.t_sweep.is_empty() {
            vec![self.generator.horizon]
        } else {
            self.t_sweep.clone()
        }
    }

    fn spec_for(&self, horizon: usize, seed: u64) -> GeneratorSpec {
        GeneratorSpec {
            family: self.generator.family.clone(),
            d: self.generator.d,
            horizon,
            seed,
        }
    }
}

/// Builds the configured policy against an instance.
pub fn build_policy(
    choice: PolicyChoice,
    params: &PolicyParams,
    instance: &Instance,
    seed: u64,
) -> Result<Box<dyn Policy>> {
    Ok(match choice {
        PolicyChoice::Sinha => Box::new(Sinha::new(instance, params.mode)?),
        PolicyChoice::ProjOgd => Box::new(ProjOgd::new(instance, &params.start, seed)?),
        PolicyChoice::Switch => Box::new(Switch::new(instance, &params.start, seed)?),
    })
}

pub struct RunOutput {
    pub instance: Instance,
    pub trace: Trace,
    pub report: MetricsReport,
    pub spec: GeneratorSpec,
}

/// Generates the instance, plays the policy, and computes the metric report.
pub fn execute_run(config: &ExperimentConfig, horizon: usize, seed: u64) -> Result<RunOutput> {
    let spec = config.spec_for(horizon, seed);
    let instance = spec.build()?;
    let mut policy = build_policy(config.policy, &config.policy_params, &instance, seed)?;
    let trace = run_policy(&instance, policy.as_mut(), seed)?;
    if !trace.valid {
        return Err(Error::RunAborted {
            reason: trace
                .failure
                .clone()
                .unwrap_or_else(|| "unknown failure".into()),
        });
    }
    let opts = MetricsOptions {
        c_star: config.metrics.c_star,
        widths: config.metrics.widths,
        monotonicity: config.metrics.monotonicity,
        cone_samples: config.metrics.cone_samples,
        width_dirs: config.metrics.width_dirs,
        seed,
    };
    let report = MetricsReport::compute(&instance, &trace, &opts)?;
    Ok(RunOutput {
        instance,
        trace,
        report,
        spec,
    })
}

fn run_dir(config: &ExperimentConfig, horizon: usize, seed: u64) -> PathBuf {
    config.out_dir.join(format!(
        "{}_{}_T{}_seed{}",
        config.generator.family.name(),
        config.policy,
        horizon,
        seed
    ))
}

fn write_run_files(config: &ExperimentConfig, out: &RunOutput, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    output::write_trace_csv(&out.trace, &dir.join("trace.csv"))?;
    let instance_json = serde_json::to_value(out.spec.describe(&out.instance))?;
    let policy_params = serde_json::to_value(&config.policy_params)?;
    output::write_metrics_json(
        &out.trace,
        &out.report,
        &instance_json,
        &policy_params,
        &dir.join("metrics.json"),
    )?;
    output::atomic_write(
        &dir.join("instance.json"),
        serde_json::to_string_pretty(&instance_json)?.as_bytes(),
    )?;
    if !out.report.width_curve.is_empty() {
        output::write_width_csv(&out.report.width_curve, &dir.join("widths.csv"))?;
    }
    if !out.report.theta_curve.is_empty() {
        output::write_theta_csv(&out.report.theta_curve, &dir.join("theta.csv"))?;
    }
    if config.plots {
        let ccv: Vec<(f64, f64)> = out
            .report
            .ccv_curve
            .iter()
            .map(|(t, v)| (*t as f64, *v))
            .collect();
        svg::write_line_chart(
            "cumulative constraint violation",
            "t",
            "ccv",
            &[svg::Series {
                label: "ccv",
                points: ccv,
            }],
            &dir.join("ccv.svg"),
        )?;
        if !out.report.theta_curve.is_empty() {
            let theta: Vec<(f64, f64)> = out
                .report
                .theta_curve
                .iter()
                .map(|(t, v)| (*t as f64, *v))
                .collect();
            svg::write_line_chart(
                "hyperplane angle vs first",
                "t",
                "theta (rad)",
                &[svg::Series {
                    label: "theta",
                    points: theta,
                }],
                &dir.join("theta.svg"),
            )?;
        }
        if !out.report.width_curve.is_empty() {
            let widths: Vec<(f64, f64)> = out
                .report
                .width_curve
                .iter()
                .map(|(t, w, _)| (*t as f64, *w))
                .collect();
            svg::write_line_chart(
                "mean width of the running intersection",
                "t",
                "width",
                &[svg::Series {
                    label: "width",
                    points: widths,
                }],
                &dir.join("widths.svg"),
            )?;
        }
    }
    Ok(())
}

/// `run`: one experiment per (seed, horizon), with full per-run artifacts.
pub fn cmd_run(config: &ExperimentConfig) -> Result<()> {
    std::fs::create_dir_all(&config.out_dir)?;
    for horizon in config.horizons() {
        for seed in config.seeds() {
            let out = execute_run(config, horizon, seed)?;
            write_run_files(config, &out, &run_dir(config, horizon, seed))?;
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
struct SweepRow {
    horizon: usize,
    policy: String,
    median_ccv: f64,
    median_regret: f64,
    median_movement: f64,
    mean_ccv: f64,
    mean_regret: f64,
    mean_movement: f64,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = values.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Number of sweep workers: `COCO_THREADS` when set, otherwise the available
/// parallelism.
fn worker_count(jobs: usize) -> usize {
    let cap = std::env::var("COCO_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|v| *v >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        });
    cap.min(jobs).max(1)
}

/// `sweep`: every (horizon, seed) pair, aggregated per horizon with medians
/// (and means), plus power-law fits of the aggregates against the horizon
/// and against `sqrt(T) ln T`.
pub fn cmd_sweep(config: &ExperimentConfig) -> Result<()> {
    let horizons = config.horizons();
    if horizons.len() < 3 {
        return Err(Error::InvalidConfig(
            "t_sweep: a sweep needs at least 3 horizon values".into(),
        ));
    }
    std::fs::create_dir_all(&config.out_dir)?;
    let seeds = config.seeds();
    let jobs: Vec<(usize, u64)> = horizons
        .iter()
        .flat_map(|t| seeds.iter().map(move |s| (*t, *s)))
        .collect();

    // order-independent aggregation keyed by (horizon, seed)
    let results: Mutex<BTreeMap<(usize, u64), (f64, f64, f64)>> = Mutex::new(BTreeMap::new());
    let next: Mutex<usize> = Mutex::new(0);
    let failure: Mutex<Option<Error>> = Mutex::new(None);
    let workers = worker_count(jobs.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let job = {
                    let mut idx = next.lock().unwrap();
                    if *idx >= jobs.len() || failure.lock().unwrap().is_some() {
                        return;
                    }
                    let j = jobs[*idx];
                    *idx += 1;
                    j
                };
                match execute_run(config, job.0, job.1) {
                    Ok(out) => {
                        let ccv = out.trace.total_ccv();
                        let movement = movement_cost(&out.trace);
                        results
                            .lock()
                            .unwrap()
                            .insert(job, (ccv, out.report.regret, movement));
                    }
                    Err(e) => {
                        failure.lock().unwrap().get_or_insert(e);
                        return;
                    }
                }
            });
        }
    });
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    let results = results.into_inner().unwrap();

    let mut rows: Vec<SweepRow> = Vec::new();
    for t in &horizons {
        let mut ccvs: Vec<f64> = Vec::new();
        let mut regrets: Vec<f64> = Vec::new();
        let mut movements: Vec<f64> = Vec::new();
        for seed in &seeds {
            let (c, r, m) = results[&(*t, *seed)];
            ccvs.push(c);
            regrets.push(r);
            movements.push(m);
        }
        let (mean_ccv, _) = mean_and_stderr(&ccvs);
        let (mean_regret, _) = mean_and_stderr(&regrets);
        let (mean_movement, _) = mean_and_stderr(&movements);
        rows.push(SweepRow {
            horizon: *t,
            policy: config.policy.to_string(),
            median_ccv: median(&mut ccvs),
            median_regret: median(&mut regrets),
            median_movement: median(&mut movements),
            mean_ccv,
            mean_regret,
            mean_movement,
        });
    }

    let mut csv = String::from(
        "T,policy,median_ccv,median_regret,median_M_T,mean_ccv,mean_regret,mean_M_T\n",
    );
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.horizon,
            r.policy,
            output::format_float(r.median_ccv),
            output::format_float(r.median_regret),
            output::format_float(r.median_movement),
            output::format_float(r.mean_ccv),
            output::format_float(r.mean_regret),
            output::format_float(r.mean_movement),
        ));
    }
    output::atomic_write(&config.out_dir.join("sweep.csv"), csv.as_bytes())?;

    let fit_of = |xs: &dyn Fn(usize) -> f64, ys: &dyn Fn(&SweepRow) -> f64| {
        let samples: Vec<(f64, f64)> = rows
            .iter()
            .map(|r| (xs(r.horizon), ys(r)))
            .filter(|(x, y)| *x > 0.0 && *y > 0.0)
            .collect();
        fit_power_law(&samples).ok()
    };
    let sqrt_t_log_t = |t: usize| (t as f64).sqrt() * (t as f64).ln();
    let plain_t = |t: usize| t as f64;
    let summary = serde_json::json!({
        "policy": config.policy.to_string(),
        "family": config.generator.family.name(),
        "rows": rows,
        "fits": {
            "ccv_vs_T": fit_of(&plain_t, &|r| r.median_ccv),
            "ccv_vs_sqrtT_lnT": fit_of(&sqrt_t_log_t, &|r| r.median_ccv),
            "regret_vs_T": fit_of(&plain_t, &|r| r.median_regret),
            "movement_vs_T": fit_of(&plain_t, &|r| r.median_movement),
        },
    });
    output::atomic_write(
        &config.out_dir.join("summary.json"),
        serde_json::to_string_pretty(&summary)?.as_bytes(),
    )?;
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyCheck {
    pub name: String,
    pub seed: u64,
    pub observed: f64,
    pub bound: f64,
    pub pass: bool,
}

impl VerifyCheck {
    fn upper(name: impl Into<String>, seed: u64, observed: f64, bound: f64) -> Self {
        VerifyCheck {
            name: name.into(),
            seed,
            observed,
            bound,
            pass: observed <= bound,
        }
    }

    fn lower(name: impl Into<String>, seed: u64, observed: f64, bound: f64) -> Self {
        VerifyCheck {
            name: name.into(),
            seed,
            observed,
            bound,
            pass: observed >= bound,
        }
    }

    fn flag(name: impl Into<String>, seed: u64, ok: bool) -> Self {
        VerifyCheck {
            name: name.into(),
            seed,
            observed: if ok { 1.0 } else { 0.0 },
            bound: 1.0,
            pass: ok,
        }
    }
}

/// `verify`: family-dispatched bound checks, written to `verify.json`.
/// Returns whether every check passed.
pub fn cmd_verify(config: &ExperimentConfig) -> Result<bool> {
    std::fs::create_dir_all(&config.out_dir)?;
    let mut checks: Vec<VerifyCheck> = Vec::new();
    for horizon in config.horizons() {
        for seed in config.seeds() {
            let mut cfg = config.clone();
            cfg.metrics.c_star = true;
            if config.generator.d == 2 {
                cfg.metrics.monotonicity = true;
            }
            let out = execute_run(&cfg, horizon, seed)?;
            checks.extend(verify_run(&cfg, &out, seed)?);
        }
    }
    let all_pass = checks.iter().all(|c| c.pass);
    let doc = serde_json::json!({
        "family": config.generator.family.name(),
        "policy": config.policy.to_string(),
        "all_pass": all_pass,
        "checks": checks,
    });
    output::atomic_write(
        &config.out_dir.join("verify.json"),
        serde_json::to_string_pretty(&doc)?.as_bytes(),
    )?;
    Ok(all_pass)
}

fn is_pure_constraint_run(instance: &Instance) -> bool {
    instance
        .rounds
        .iter()
        .all(|r| matches!(r.cost.kind, FunctionKind::Zero))
}

/// The family-relevant checks for one completed run.
pub fn verify_run(
    config: &ExperimentConfig,
    out: &RunOutput,
    seed: u64,
) -> Result<Vec<VerifyCheck>> {
    let mut checks = Vec::new();
    let instance = &out.instance;
    let d = instance.dim();
    let movement = movement_cost(&out.trace);
    let ccv = out.trace.total_ccv();

    // generic: CCV <= G * M_T, and the cone-based envelope when defined
    checks.push(VerifyCheck::upper(
        "ccv_le_lipschitz_times_movement",
        seed,
        ccv,
        instance.lipschitz * movement + 1e-6,
    ));
    for bc in &out.report.bound_report {
        if bc.name != "ccv_le_lipschitz_times_movement" {
            checks.push(VerifyCheck {
                name: bc.name.clone(),
                seed,
                observed: bc.observed,
                bound: bc.bound,
                pass: bc.pass,
            });
        }
    }

    let family = instance.family.as_str();
    if family == "nested_balls" || family == "nested_boxes" {
        let bound = (d as f64).powf(1.5) * instance.diameter;
        checks.push(VerifyCheck::upper(
            "movement_le_d32_diameter",
            seed,
            movement,
            bound + 1e-6,
        ));
    }

    if is_pure_constraint_run(instance) && config.policy == PolicyChoice::ProjOgd {
        let curve = PolylineCurve::from_actions(&out.trace);
        let reversed = curve.reversed();
        checks.push(VerifyCheck::flag(
            "reverse_curve_self_expanded",
            seed,
            self_expanded_check(&reversed, 1e-7),
        ));
        checks.push(VerifyCheck::upper(
            "curve_length_le_10_diameter",
            seed,
            curve_length(&curve),
            10.0 * instance.diameter,
        ));
    }

    if family == "monotone_2d" {
        let monotone = out.report.monotone.unwrap_or(false);
        checks.push(VerifyCheck::flag(
            "hyperplane_angles_monotone",
            seed,
            monotone,
        ));
        checks.push(VerifyCheck::upper(
            "ccv_le_20_lipschitz_diameter",
            seed,
            ccv,
            20.0 * instance.lipschitz * instance.diameter,
        ));
    }

    if (family == "nested_balls" || family == "nested_boxes")
        && d == 2
        && is_pure_constraint_run(instance)
    {
        let frac = width_decrement_pass_fraction(
            instance,
            &out.trace,
            config.metrics.width_dirs.max(1000),
            config.metrics.cone_samples,
            seed,
        )?;
        if let Some(frac) = frac {
            checks.push(VerifyCheck::lower(
                "width_decrement_pass_fraction",
                seed,
                frac,
                0.95,
            ));
        }
    }

    Ok(checks)
}

/// Fraction of eligible infeasible rounds whose shared-direction width
/// decrement passes the per-round envelope. `None` when no round qualifies.
pub fn width_decrement_pass_fraction(
    instance: &Instance,
    trace: &Trace,
    n_dirs: usize,
    cone_samples: usize,
    seed: u64,
) -> Result<Option<f64>> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x71D7);
    let boundary_tol = 1e-6 * (1.0 + instance.diameter);
    let mut prev: Option<crate::geometry::ConvexSet> = None;
    let mut total = 0usize;
    let mut passed = 0usize;
    for (set, rec) in instance.set_sequence()?.zip(&trace.records) {
        let set = set?;
        if let Some(prev_set) = prev.take() {
            // eligible: x_t on the boundary of S_{t-1} and outside S_t
            if rec.dist > 1e-7 && prev_set.margin(&rec.x).abs() <= boundary_tol {
                let m = rec.x.mid(&rec.b);
                if set.margin(&m) > 0.0 {
                    if let Some(w) = rec.b.sub(&rec.x).normalized() {
                        let c_t = cone_c_estimate(
                            &m,
                            &set,
                            &w,
                            cone_samples,
                            2.0 * instance.diameter,
                            &mut rng,
                        )?;
                        if c_t > 0.0 {
                            let wd = width_decrement_check(
                                &prev_set, &set, &rec.x, &rec.b, c_t, n_dirs, &mut rng,
                            )?;
                            total += 1;
                            if wd.pass {
                                passed += 1;
                            }
                        }
                    }
                }
            }
        }
        prev = Some(set);
    }
    if total == 0 {
        return Ok(None);
    }
    Ok(Some(passed as f64 / total as f64))
}
