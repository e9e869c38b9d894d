//! Python bindings: deformations, both models, bracket checks, simulation
//! and the verification suites.

use std::cell::RefCell;

use pyo3::exceptions::{PyFloatingPointError, PyOSError, PyTypeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyString};

use nhtwist_core::checks::{run_check as core_run_check, CheckOptions, Suite};
use nhtwist_core::constant_force::{
    ConstantForceModel as CoreConstantForce, ConstantForceParams, InitialData,
};
use nhtwist_core::deformations::{DeformationSpec as CoreSpec, Family, Variant};
use nhtwist_core::integrator::estimate_order as core_estimate_order;
use nhtwist_core::oscillator::{
    classify_conservative as core_classify, OscillatorModel as CoreOscillator, OscillatorParams,
};
use nhtwist_core::phase_space::{
    from_noncommutative as core_from_nc, poisson_bracket as core_bracket,
    to_noncommutative as core_to_nc, verify_deformed_brackets as core_verify_brackets,
    verify_jacobi as core_verify_jacobi, CanonicalState as CoreState, NoncommutativeCoords,
    DEFAULT_STEP,
};
use nhtwist_core::simulate::{simulate as core_simulate, ModelKind, RunConfig};
use nhtwist_core::Error;

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::BlowUp { .. } | Error::NonFiniteObservable { .. } => {
            PyFloatingPointError::new_err(e.to_string())
        }
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn json_to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A config given either as a JSON string or as a JSON-compatible object.
fn config_text(obj: &Bound<'_, PyAny>) -> PyResult<String> {
    if let Ok(s) = obj.cast::<PyString>() {
        return Ok(s.to_string());
    }
    obj.py()
        .import("json")?
        .call_method1("dumps", (obj,))?
        .extract()
}

/// Deformation function `f(t)` of one family, variant, strength and time scale.
#[pyclass(name = "DeformationSpec", module = "nhtwist", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct DeformationSpec {
    inner: CoreSpec,
}

#[pymethods]
impl DeformationSpec {
    #[new]
    #[pyo3(signature = (family, variant, kappa, tau = None))]
    fn new(family: &str, variant: &str, kappa: f64, tau: Option<f64>) -> PyResult<Self> {
        let family: Family = family.parse().map_err(to_py_err)?;
        let variant: Variant = variant.parse().map_err(to_py_err)?;
        let inner = CoreSpec::new(family, variant, kappa, tau).map_err(to_py_err)?;
        Ok(Self { inner })
    }

    /// All 18 family × variant combinations.
    #[staticmethod]
    fn all_configurations(kappa: f64, tau: f64) -> PyResult<Vec<Self>> {
        Ok(CoreSpec::all_configurations(kappa, tau)
            .map_err(to_py_err)?
            .into_iter()
            .map(|inner| Self { inner })
            .collect())
    }

    #[getter]
    fn family(&self) -> String {
        self.inner.family().to_string()
    }

    #[getter]
    fn variant(&self) -> String {
        self.inner.variant().to_string()
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.inner.kappa()
    }

    #[getter]
    fn tau(&self) -> Option<f64> {
        self.inner.tau()
    }

    fn f(&self, t: f64) -> f64 {
        self.inner.f(t)
    }

    fn f_dot(&self, t: f64) -> f64 {
        self.inner.f_dot(t)
    }

    /// `∫₀ᵗ f(s) ds`.
    fn f_integral(&self, t: f64) -> f64 {
        self.inner.f_integral(t)
    }

    fn galilean_limit(&self) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.galilean_limit().map_err(to_py_err)?,
        })
    }

    fn is_time_independent(&self) -> bool {
        self.inner.is_time_independent()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("DeformationSpec({})", self.inner)
    }
}

#[pyclass(name = "CanonicalState", module = "nhtwist", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct CanonicalState {
    inner: CoreState,
}

#[pymethods]
impl CanonicalState {
    #[new]
    fn new(t: f64, x: [f64; 3], p: [f64; 3]) -> Self {
        Self {
            inner: CoreState::new(t, x, p),
        }
    }

    #[getter]
    fn t(&self) -> f64 {
        self.inner.t
    }

    #[getter]
    fn x(&self) -> [f64; 3] {
        self.inner.x
    }

    #[getter]
    fn p(&self) -> [f64; 3] {
        self.inner.p
    }

    fn __repr__(&self) -> String {
        format!(
            "CanonicalState(t={}, x={:?}, p={:?})",
            self.inner.t, self.inner.x, self.inner.p
        )
    }
}

fn state(inner: CoreState) -> CanonicalState {
    CanonicalState { inner }
}

/// Particle under a constant force on the deformed space-time.
#[pyclass(
    name = "ConstantForceModel",
    module = "nhtwist",
    frozen,
    from_py_object
)]
#[derive(Clone, Copy)]
struct ConstantForceModel {
    inner: CoreConstantForce,
}

#[pymethods]
impl ConstantForceModel {
    #[new]
    fn new(m: f64, force: [f64; 3], spec: DeformationSpec) -> PyResult<Self> {
        let params = ConstantForceParams::new(m, force).map_err(to_py_err)?;
        Ok(Self {
            inner: CoreConstantForce::new(params, spec.inner).map_err(to_py_err)?,
        })
    }

    #[getter]
    fn spec(&self) -> DeformationSpec {
        DeformationSpec {
            inner: self.inner.spec,
        }
    }

    fn hamiltonian(&self, s: CanonicalState) -> f64 {
        self.inner.hamiltonian(&s.inner)
    }

    /// `(ẋ, ṗ)` at a phase-space point.
    fn eom_rhs(&self, s: CanonicalState) -> ([f64; 3], [f64; 3]) {
        let r = self.inner.eom_rhs(&s.inner);
        (r.x_dot, r.p_dot)
    }

    fn force_g(&self, t: f64) -> [f64; 3] {
        self.inner.force_g(t)
    }

    fn potential(&self, x: [f64; 3], t: f64) -> f64 {
        self.inner.potential(&x, t)
    }

    #[pyo3(signature = (t, x, h = 1e-4))]
    fn curl_g(&self, t: f64, x: [f64; 3], h: f64) -> [f64; 3] {
        self.inner.curl_g(t, &x, h)
    }

    fn acceleration_offset(&self, t: f64) -> [f64; 3] {
        self.inner.acceleration_offset(t)
    }

    #[pyo3(signature = (x0, v0, t0 = 0.0))]
    fn initial_state(&self, x0: [f64; 3], v0: [f64; 3], t0: f64) -> CanonicalState {
        state(self.inner.initial_state_at(&InitialData { x0, v0 }, t0))
    }

    /// Closed-form position for `x(0) = x0`, `ẋ(0) = v0`.
    fn analytic_solution(&self, t: f64, x0: [f64; 3], v0: [f64; 3]) -> [f64; 3] {
        self.inner.analytic_solution(t, &InitialData { x0, v0 })
    }
}

/// Isotropic oscillator on the deformed space-time.
#[pyclass(name = "OscillatorModel", module = "nhtwist", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct OscillatorModel {
    inner: CoreOscillator,
}

#[pymethods]
impl OscillatorModel {
    #[new]
    fn new(m: f64, omega: f64, spec: DeformationSpec) -> PyResult<Self> {
        let params = OscillatorParams::new(m, omega).map_err(to_py_err)?;
        Ok(Self {
            inner: CoreOscillator::new(params, spec.inner).map_err(to_py_err)?,
        })
    }

    #[getter]
    fn spec(&self) -> DeformationSpec {
        DeformationSpec {
            inner: self.inner.spec,
        }
    }

    fn effective_mass(&self, t: f64) -> f64 {
        self.inner.effective_mass(t)
    }

    fn hamiltonian(&self, s: CanonicalState) -> f64 {
        self.inner.hamiltonian(&s.inner)
    }

    fn hamiltonian_time_partial(&self, s: CanonicalState) -> f64 {
        self.inner.hamiltonian_time_partial(&s.inner)
    }

    fn eom_rhs(&self, s: CanonicalState) -> ([f64; 3], [f64; 3]) {
        let r = self.inner.eom_rhs(&s.inner);
        (r.x_dot, r.p_dot)
    }

    /// Newtonian force `m ẍ` as a function of position, velocity and time.
    fn force_h(&self, x: [f64; 3], xdot: [f64; 3], t: f64) -> [f64; 3] {
        self.inner.force_h(&x, &xdot, t)
    }

    fn curl_h_analytic(&self, t: f64) -> [f64; 3] {
        self.inner.curl_h_analytic(t)
    }

    #[pyo3(signature = (x, xdot, t, h = 1e-3))]
    fn curl_h_fd(&self, x: [f64; 3], xdot: [f64; 3], t: f64, h: f64) -> [f64; 3] {
        self.inner.curl_h_fd(&x, &xdot, t, h)
    }

    fn is_conservative(&self) -> bool {
        core_classify(&self.inner.spec)
    }

    #[pyo3(signature = (x0, v0, t0 = 0.0))]
    fn initial_state(&self, x0: [f64; 3], v0: [f64; 3], t0: f64) -> CanonicalState {
        state(self.inner.initial_state_at(&InitialData { x0, v0 }, t0))
    }
}

/// `(x̄, p̄)` for a canonical state.
#[pyfunction]
fn to_noncommutative(s: CanonicalState, spec: DeformationSpec) -> ([f64; 3], [f64; 3]) {
    let nc = core_to_nc(&s.inner, &spec.inner);
    (nc.xbar, nc.pbar)
}

#[pyfunction]
fn from_noncommutative(
    xbar: [f64; 3],
    pbar: [f64; 3],
    t: f64,
    spec: DeformationSpec,
) -> CanonicalState {
    state(core_from_nc(
        &NoncommutativeCoords { xbar, pbar },
        t,
        &spec.inner,
    ))
}

/// Finite-difference Poisson bracket of two callables taking a `CanonicalState`.
#[pyfunction]
#[pyo3(signature = (a, b, at, h = DEFAULT_STEP))]
fn poisson_bracket(
    a: &Bound<'_, PyAny>,
    b: &Bound<'_, PyAny>,
    at: CanonicalState,
    h: f64,
) -> PyResult<f64> {
    let failure: RefCell<Option<PyErr>> = RefCell::new(None);
    let call = |f: &Bound<'_, PyAny>, s: &CoreState| -> f64 {
        match f.call1((state(*s),)).and_then(|v| v.extract::<f64>()) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let value = core_bracket(|s| call(a, s), |s| call(b, s), &at.inner, h);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    value.map_err(to_py_err)
}

#[pyfunction]
#[pyo3(signature = (spec, at, tol = 1e-6))]
fn verify_deformed_brackets<'py>(
    py: Python<'py>,
    spec: DeformationSpec,
    at: CanonicalState,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    json_to_py(py, &core_verify_brackets(&spec.inner, &at.inner, tol))
}

#[pyfunction]
#[pyo3(signature = (spec, at, tol = 1e-6))]
fn verify_jacobi<'py>(
    py: Python<'py>,
    spec: DeformationSpec,
    at: CanonicalState,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    json_to_py(py, &core_verify_jacobi(&spec.inner, &at.inner, tol))
}

#[pyfunction]
fn classify_conservative(spec: DeformationSpec) -> bool {
    core_classify(&spec.inner)
}

/// Empirical RK4 order for either model from `x(t0) = x0`, `ẋ(t0) = v0`.
#[pyfunction]
#[pyo3(signature = (model, x0, v0, t_end, t0 = 0.0))]
fn estimate_order(
    model: &Bound<'_, PyAny>,
    x0: [f64; 3],
    v0: [f64; 3],
    t_end: f64,
    t0: f64,
) -> PyResult<Option<f64>> {
    let init = InitialData { x0, v0 };
    let result = if let Ok(m) = model.extract::<ConstantForceModel>() {
        core_estimate_order(
            |s: &CoreState| m.inner.eom_rhs(s),
            &m.inner.initial_state_at(&init, t0),
            t_end,
        )
    } else if let Ok(m) = model.extract::<OscillatorModel>() {
        core_estimate_order(
            |s: &CoreState| m.inner.eom_rhs(s),
            &m.inner.initial_state_at(&init, t0),
            t_end,
        )
    } else {
        return Err(PyTypeError::new_err(
            "model must be a ConstantForceModel or an OscillatorModel",
        ));
    };
    result.map_err(to_py_err)
}

/// Runs one simulation from a run configuration (dict or JSON string).
///
/// Returns a dict with per-sample lists `t`, `x`, `p`, `energy`, `f_t` and
/// the run `summary`.
#[pyfunction]
fn simulate<'py>(py: Python<'py>, config: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyDict>> {
    let cfg = RunConfig::from_json(&config_text(config)?).map_err(to_py_err)?;
    let outcome = py.detach(|| core_simulate(&cfg)).map_err(to_py_err)?;
    let traj = &outcome.trajectory;
    let out = PyDict::new(py);
    out.set_item("t", traj.times().collect::<Vec<_>>())?;
    out.set_item("x", traj.samples.iter().map(|s| s.x).collect::<Vec<_>>())?;
    out.set_item("p", traj.samples.iter().map(|s| s.p).collect::<Vec<_>>())?;
    out.set_item(
        "energy",
        traj.diagnostics
            .iter()
            .map(|d| d.energy)
            .collect::<Vec<_>>(),
    )?;
    out.set_item(
        "f_t",
        traj.diagnostics.iter().map(|d| d.f_t).collect::<Vec<_>>(),
    )?;
    out.set_item("summary", json_to_py(py, &outcome.summary)?)?;
    Ok(out)
}

/// Runs a verification suite; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (suite, model = "constant_force", only = None, kappa = None, tau = None, samples = None, tolerance = None, seed = None))]
#[allow(clippy::too_many_arguments)]
fn run_check<'py>(
    py: Python<'py>,
    suite: &str,
    model: &str,
    only: Option<DeformationSpec>,
    kappa: Option<f64>,
    tau: Option<f64>,
    samples: Option<usize>,
    tolerance: Option<f64>,
    seed: Option<u64>,
) -> PyResult<Bound<'py, PyAny>> {
    let suite: Suite = suite.parse().map_err(to_py_err)?;
    let mut opts = CheckOptions::new(suite);
    opts.model = model.parse::<ModelKind>().map_err(to_py_err)?;
    opts.only = only.map(|s| s.inner);
    opts.kappa = kappa.unwrap_or(opts.kappa);
    opts.tau = tau.unwrap_or(opts.tau);
    opts.samples = samples.unwrap_or(opts.samples);
    opts.tolerance = tolerance.unwrap_or(opts.tolerance);
    opts.seed = seed.unwrap_or(opts.seed);
    let report = py.detach(|| core_run_check(&opts)).map_err(to_py_err)?;
    json_to_py(py, &report)
}

#[pymodule]
fn nhtwist(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<DeformationSpec>()?;
    m.add_class::<CanonicalState>()?;
    m.add_class::<ConstantForceModel>()?;
    m.add_class::<OscillatorModel>()?;
    m.add_function(wrap_pyfunction!(to_noncommutative, m)?)?;
    m.add_function(wrap_pyfunction!(from_noncommutative, m)?)?;
    m.add_function(wrap_pyfunction!(poisson_bracket, m)?)?;
    m.add_function(wrap_pyfunction!(verify_deformed_brackets, m)?)?;
    m.add_function(wrap_pyfunction!(verify_jacobi, m)?)?;
    m.add_function(wrap_pyfunction!(classify_conservative, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_order, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(run_check, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
