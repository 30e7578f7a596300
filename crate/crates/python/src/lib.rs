//! Python bindings: convex sets, instance generators, policy runs and the
//! headline metrics, driven in-process from Python.
//!
//! Usage from Python:
//!
//!     import coco_lab as cl
//!     inst = cl.Instance.nested_balls(d=3, horizon=500, diameter=2.0,
//!                                     shrink=0.5, seed=7)
//!     trace = cl.run(inst, policy="proj_ogd", seed=7, start="boundary")
//!     print(trace.total_ccv(), trace.movement_cost())

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use coco_core::error::Error;
use coco_core::geometry::{self, ConvexSet as CoreSet, Polytope};
use coco_core::instances;
use coco_core::metrics;
use coco_core::policies::{
    self, Instance as CoreInstance, Policy, ProjOgd, Sinha, SinhaMode, StartPoint, Switch,
    Trace as CoreTrace,
};
use coco_core::vector::Vector;

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidConfig(_) | Error::DegenerateInput(_) => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn vec_of(v: &Vector) -> Vec<f64> {
    v.0.clone()
}

/// A closed convex region with projection, distance, support and membership.
#[pyclass(name = "ConvexSet", skip_from_py_object)]
#[derive(Clone)]
struct PyConvexSet {
    inner: CoreSet,
}

#[pymethods]
impl PyConvexSet {
    #[staticmethod]
    fn ball(center: Vec<f64>, radius: f64) -> Self {
        PyConvexSet {
            inner: geometry::ball(&center, radius),
        }
    }

    #[staticmethod]
    #[pyo3(name = "box")]
    fn box_(lo: Vec<f64>, hi: Vec<f64>) -> PyResult<Self> {
        if lo.len() != hi.len() || lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(PyValueError::new_err("box needs lo <= hi componentwise"));
        }
        Ok(PyConvexSet {
            inner: geometry::box_set(&lo, &hi),
        })
    }

    #[staticmethod]
    fn halfspace(normal: Vec<f64>, offset: f64) -> PyResult<Self> {
        let h = geometry::Halfspace::new(Vector(normal), offset).map_err(to_py_err)?;
        Ok(PyConvexSet {
            inner: CoreSet::Halfspace(h),
        })
    }

    /// Convex polygon through the given 2-d points.
    #[staticmethod]
    fn polygon(points: Vec<Vec<f64>>) -> PyResult<Self> {
        let pts: Vec<Vector> = points.into_iter().map(Vector).collect();
        let poly = Polytope::from_points_2d(&pts).map_err(to_py_err)?;
        Ok(PyConvexSet {
            inner: CoreSet::Polytope(poly),
        })
    }

    fn project(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(vec_of(&self.inner.project(&Vector(x)).map_err(to_py_err)?))
    }

    fn distance(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.distance(&Vector(x)).map_err(to_py_err)
    }

    #[pyo3(signature = (x, tol = 1e-8))]
    fn contains(&self, x: Vec<f64>, tol: f64) -> PyResult<bool> {
        self.inner.contains(&Vector(x), tol).map_err(to_py_err)
    }

    fn support(&self, direction: Vec<f64>) -> PyResult<f64> {
        self.inner.support(&Vector(direction)).map_err(to_py_err)
    }

    /// Monte-Carlo mean width: returns (estimate, standard_error).
    #[pyo3(signature = (n_dirs = 4096, seed = 0))]
    fn mean_width(&self, n_dirs: usize, seed: u64) -> PyResult<(f64, f64)> {
        metrics::mean_width_seeded(&self.inner, n_dirs, seed).map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        format!("ConvexSet({:?})", self.inner)
    }
}

/// A generated problem instance.
#[pyclass(name = "Instance")]
struct PyInstance {
    inner: CoreInstance,
}

#[pymethods]
impl PyInstance {
    #[staticmethod]
    #[pyo3(signature = (d, horizon, diameter = 2.0, shrink = 0.5, seed = 0, affine_costs = false))]
    fn nested_balls(
        d: usize,
        horizon: usize,
        diameter: f64,
        shrink: f64,
        seed: u64,
        affine_costs: bool,
    ) -> PyResult<Self> {
        let mode = if affine_costs {
            instances::CostMode::RandomAffine
        } else {
            instances::CostMode::Zero
        };
        Ok(PyInstance {
            inner: instances::gen_nested_balls(d, horizon, diameter, shrink, mode, seed)
                .map_err(to_py_err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (d, horizon, diameter = 2.0, shrink = 0.5, seed = 0, affine_costs = false))]
    fn nested_boxes(
        d: usize,
        horizon: usize,
        diameter: f64,
        shrink: f64,
        seed: u64,
        affine_costs: bool,
    ) -> PyResult<Self> {
        let mode = if affine_costs {
            instances::CostMode::RandomAffine
        } else {
            instances::CostMode::Zero
        };
        Ok(PyInstance {
            inner: instances::gen_nested_boxes(d, horizon, diameter, shrink, mode, seed)
                .map_err(to_py_err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (horizon, a = 4.0, c = 10.0, seed = 0))]
    fn worst_case_d1(horizon: usize, a: f64, c: f64, seed: u64) -> PyResult<Self> {
        Ok(PyInstance {
            inner: instances::gen_worst_case_d1(a, c, horizon, seed).map_err(to_py_err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (d, horizon, diameter = 2.0, seed = 0))]
    fn ocs_random(d: usize, horizon: usize, diameter: f64, seed: u64) -> PyResult<Self> {
        Ok(PyInstance {
            inner: instances::gen_ocs_random(d, horizon, diameter, seed).map_err(to_py_err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (horizon, diameter = 2.0, step = 1e-4, seed = 0))]
    fn monotone_2d(horizon: usize, diameter: f64, step: f64, seed: u64) -> PyResult<Self> {
        let schedule = vec![step; horizon];
        Ok(PyInstance {
            inner: instances::gen_monotone_2d(diameter, &schedule, seed).map_err(to_py_err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (d, horizon, diameter = 2.0, rotation_step = 1e-3, slab_frac = 0.05, seed = 0))]
    fn rotating_polytope(
        d: usize,
        horizon: usize,
        diameter: f64,
        rotation_step: f64,
        slab_frac: f64,
        seed: u64,
    ) -> PyResult<Self> {
        Ok(PyInstance {
            inner: instances::gen_rotating_polytope(
                d,
                horizon,
                diameter,
                rotation_step,
                slab_frac,
                seed,
            )
            .map_err(to_py_err)?,
        })
    }

    #[getter]
    fn family(&self) -> String {
        self.inner.family.clone()
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn horizon(&self) -> usize {
        self.inner.horizon()
    }

    #[getter]
    fn diameter(&self) -> f64 {
        self.inner.diameter
    }

    #[getter]
    fn lipschitz(&self) -> f64 {
        self.inner.lipschitz
    }

    #[getter]
    fn witness(&self) -> Vec<f64> {
        vec_of(&self.inner.witness)
    }

    /// Best fixed feasible comparator for the instance's cost sequence.
    fn best_comparator(&self) -> PyResult<Vec<f64>> {
        Ok(vec_of(
            &metrics::best_fixed_comparator(&self.inner).map_err(to_py_err)?,
        ))
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(family='{}', d={}, horizon={})",
            self.inner.family,
            self.inner.dim(),
            self.inner.horizon()
        )
    }
}

/// A completed policy run.
#[pyclass(name = "Trace")]
struct PyTrace {
    inner: CoreTrace,
}

#[pymethods]
impl PyTrace {
    #[getter]
    fn policy(&self) -> String {
        self.inner.meta.policy.clone()
    }

    #[getter]
    fn valid(&self) -> bool {
        self.inner.valid
    }

    #[getter]
    fn switch_time(&self) -> Option<usize> {
        self.inner.switch_time
    }

    fn total_ccv(&self) -> f64 {
        self.inner.total_ccv()
    }

    fn movement_cost(&self) -> f64 {
        metrics::movement_cost(&self.inner)
    }

    fn actions(&self) -> Vec<Vec<f64>> {
        self.inner.records.iter().map(|r| vec_of(&r.x)).collect()
    }

    fn violations(&self) -> Vec<f64> {
        self.inner.records.iter().map(|r| r.violation).collect()
    }

    fn ccv_curve(&self) -> Vec<f64> {
        self.inner.records.iter().map(|r| r.ccv_running).collect()
    }

    fn tags(&self) -> Vec<String> {
        self.inner
            .records
            .iter()
            .map(|r| r.tag.to_string())
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.records.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Trace(policy='{}', rounds={}, ccv={:.6})",
            self.inner.meta.policy,
            self.inner.records.len(),
            self.inner.total_ccv()
        )
    }
}

fn parse_start(start: &str) -> PyResult<StartPoint> {
    Ok(match start {
        "projected_origin" | "origin" => StartPoint::ProjectedOrigin,
        "boundary" | "boundary_random" => StartPoint::BoundaryRandom,
        other => {
            return Err(PyValueError::new_err(format!(
                "start: unknown value '{other}' (expected 'projected_origin' or 'boundary')"
            )))
        }
    })
}

/// Play a policy against an instance and return the trace.
#[pyfunction]
#[pyo3(signature = (instance, policy = "proj_ogd", seed = 0, start = "projected_origin", strongly_convex = false))]
fn run(
    instance: &PyInstance,
    policy: &str,
    seed: u64,
    start: &str,
    strongly_convex: bool,
) -> PyResult<PyTrace> {
    let start = parse_start(start)?;
    let mode = if strongly_convex {
        SinhaMode::StronglyConvex
    } else {
        SinhaMode::Convex
    };
    let mut policy: Box<dyn Policy> = match policy {
        "proj_ogd" => Box::new(ProjOgd::new(&instance.inner, &start, seed).map_err(to_py_err)?),
        "sinha" => Box::new(Sinha::new(&instance.inner, mode).map_err(to_py_err)?),
        "switch" => Box::new(Switch::new(&instance.inner, &start, seed).map_err(to_py_err)?),
        other => {
            return Err(PyValueError::new_err(format!(
                "policy: unknown value '{other}' (expected proj_ogd | sinha | switch)"
            )))
        }
    };
    let trace = policies::run_policy(&instance.inner, policy.as_mut(), seed).map_err(to_py_err)?;
    Ok(PyTrace { inner: trace })
}

/// Regret of a trace against a comparator (defaults to the best fixed one).
#[pyfunction]
#[pyo3(signature = (instance, trace, comparator = None))]
fn regret(instance: &PyInstance, trace: &PyTrace, comparator: Option<Vec<f64>>) -> PyResult<f64> {
    let comparator = match comparator {
        Some(c) => Vector(c),
        None => metrics::best_fixed_comparator(&instance.inner).map_err(to_py_err)?,
    };
    metrics::regret(&instance.inner, &trace.inner, &comparator).map_err(to_py_err)
}

/// Surface measure of the unit sphere in d dimensions.
#[pyfunction]
fn unit_sphere_measure(d: usize) -> PyResult<f64> {
    if d < 1 {
        return Err(PyValueError::new_err("d must be at least 1"));
    }
    Ok(geometry::unit_sphere_measure(d))
}

/// Movement-cost envelope from a cone cosine.
#[pyfunction]
fn movement_bound(c_star: f64, d: usize, diameter: f64) -> PyResult<f64> {
    if d < 2 || !(c_star > 0.0 && c_star <= 1.0) {
        return Err(PyValueError::new_err(
            "movement_bound needs d >= 2 and c_star in (0, 1]",
        ));
    }
    Ok(metrics::movement_bound(c_star, d, diameter))
}

/// Least-squares power-law fit of y against x: returns (exponent, r_squared).
#[pyfunction]
fn fit_power_law(xs: Vec<f64>, ys: Vec<f64>) -> PyResult<(f64, f64)> {
    if xs.len() != ys.len() {
        return Err(PyValueError::new_err("xs and ys must have equal length"));
    }
    let samples: Vec<(f64, f64)> = xs.into_iter().zip(ys).collect();
    let fit = metrics::fit_power_law(&samples).map_err(to_py_err)?;
    Ok((fit.exponent, fit.r_squared))
}

/// True when the polyline satisfies the self-expansion inequality.
#[pyfunction]
#[pyo3(signature = (points, tol = 1e-7))]
fn self_expanded(points: Vec<Vec<f64>>, tol: f64) -> bool {
    let curve = metrics::PolylineCurve::new(points.into_iter().map(Vector));
    metrics::self_expanded_check(&curve, tol)
}

/// Total length of a polyline.
#[pyfunction]
fn curve_length(points: Vec<Vec<f64>>) -> f64 {
    let curve = metrics::PolylineCurve::new(points.into_iter().map(Vector));
    metrics::curve_length(&curve)
}

#[pymodule]
fn coco_lab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyConvexSet>()?;
    m.add_class::<PyInstance>()?;
    m.add_class::<PyTrace>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(regret, m)?)?;
    m.add_function(wrap_pyfunction!(unit_sphere_measure, m)?)?;
    m.add_function(wrap_pyfunction!(movement_bound, m)?)?;
    m.add_function(wrap_pyfunction!(fit_power_law, m)?)?;
    m.add_function(wrap_pyfunction!(self_expanded, m)?)?;
    m.add_function(wrap_pyfunction!(curve_length, m)?)?;
    Ok(())
}
