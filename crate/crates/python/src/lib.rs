//! Python bindings: tableau construction, exact audits, spectra and
//! integration of builtin or user-supplied Hamiltonian systems.

use csrk::exact::{fmt_rational, parse_rational, Rational, RationalMatrix};
use csrk::harness::{make_nonsymmetric_control, problem_by_name};
use csrk::integrator::canonical_structure;
use csrk::spectral::{parallelizable, DEFAULT_SPECTRAL_TOL};
use csrk::tableau::{
    audit, make_avf, make_avf_collocation, make_bnonconst4, make_parallel4, make_parallel6, make_parallel6_preset,
};
use csrk::{integrate, CsrkTableau, HamiltonianSystem, SolveMode, SolverConfig, Trajectory};
use nalgebra::DVector;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn rational(text: &str) -> PyResult<Rational> {
    parse_rational(text).map_err(value_err)
}

fn to_python<'py>(py: Python<'py>, v: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(runtime_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Continuous-stage tableau given by its exact coefficient matrix `M`.
#[pyclass(name = "Tableau", module = "csrk", frozen)]
struct PyTableau {
    inner: CsrkTableau,
}

#[pymethods]
impl PyTableau {
    /// Builds a tableau from rows of exact entries (`"p/q"`, integers or decimals).
    #[new]
    #[pyo3(signature = (rows, name = "custom"))]
    fn new(rows: Vec<Vec<String>>, name: &str) -> PyResult<Self> {
        let s = rows.len();
        if rows.iter().any(|r| r.len() != s) {
            return Err(PyValueError::new_err("M must be square"));
        }
        let entries = rows.iter().flatten().map(|x| rational(x)).collect::<PyResult<Vec<_>>>()?;
        let m = RationalMatrix::from_row_major(s, s, entries).map_err(value_err)?;
        Ok(Self { inner: CsrkTableau::new(name, m).map_err(value_err)? })
    }

    #[staticmethod]
    fn avf() -> Self {
        Self { inner: make_avf() }
    }

    #[staticmethod]
    fn avf_collocation(s: usize) -> PyResult<Self> {
        Ok(Self { inner: make_avf_collocation(s).map_err(value_err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (theta = "1"))]
    fn parallel4(theta: &str) -> PyResult<Self> {
        Ok(Self { inner: make_parallel4(&rational(theta)?).map_err(value_err)? })
    }

    /// Order-6 family; without arguments the default preset.
    #[staticmethod]
    #[pyo3(signature = (a = None, c = None, gamma_shift = None))]
    fn parallel6(a: Option<&str>, c: Option<&str>, gamma_shift: Option<&str>) -> PyResult<Self> {
        match (a, c, gamma_shift) {
            (None, None, None) => Ok(Self { inner: make_parallel6_preset() }),
            (Some(a), Some(c), shift) => {
                let shift = rational(shift.unwrap_or("0"))?;
                Ok(Self { inner: make_parallel6(&rational(a)?, &rational(c)?, &shift).map_err(value_err)? })
            }
            _ => Err(PyValueError::new_err("give both a and c, or neither")),
        }
    }

    #[staticmethod]
    fn bnonconst4() -> Self {
        Self { inner: make_bnonconst4() }
    }

    #[staticmethod]
    fn nonsymmetric_control() -> Self {
        Self { inner: make_nonsymmetric_control() }
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    /// `M` as rows of exact strings.
    #[getter]
    fn matrix(&self) -> Vec<Vec<String>> {
        let m = self.inner.matrix();
        (0..m.rows()).map(|i| (0..m.cols()).map(|j| fmt_rational(&m[(i, j)])).collect()).collect()
    }

    fn is_energy_preserving(&self) -> bool {
        csrk::tableau::check_energy_preserving(&self.inner)
    }

    #[pyo3(signature = (max_order = 6))]
    fn audit<'py>(&self, py: Python<'py>, max_order: usize) -> PyResult<Bound<'py, PyAny>> {
        to_python(py, &audit(&self.inner, max_order).map_err(value_err)?)
    }

    #[pyo3(signature = (max_order = 8))]
    fn order(&self, max_order: usize) -> PyResult<usize> {
        csrk::order_of(&self.inner, max_order).map_err(value_err)
    }

    /// Eigenvalues of the stage transformation and the decoupling verdict.
    #[pyo3(signature = (tol = DEFAULT_SPECTRAL_TOL))]
    fn spectrum<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyDict>> {
        if !(tol > 0.0) {
            return Err(PyValueError::new_err("tol must be positive"));
        }
        let r = parallelizable(&self.inner, tol);
        let d = PyDict::new(py);
        d.set_item("char_poly", r.char_poly.coeffs().iter().map(fmt_rational).collect::<Vec<_>>())?;
        d.set_item("eigenvalues", r.eigenvalues.iter().map(|z| (z.re, z.im)).collect::<Vec<_>>())?;
        d.set_item("real_distinct", r.real_distinct)?;
        d.set_item("condition_estimate", r.condition_estimate)?;
        Ok(d)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner.to_json()).map_err(runtime_err)
    }

    fn __repr__(&self) -> String {
        format!("Tableau(name={:?}, s={})", self.inner.name(), self.inner.degree())
    }
}

fn solver_config(
    t: &CsrkTableau,
    sys: &HamiltonianSystem,
    mode: &str,
    tol: f64,
    quad_nodes: Option<usize>,
    workers: Option<usize>,
) -> PyResult<SolverConfig> {
    let mode: SolveMode = mode.parse().map_err(value_err)?;
    let mut cfg = SolverConfig::for_tableau(t).with_exact_quadrature(t, sys).with_mode(mode).with_tol(tol);
    if let Some(q) = quad_nodes {
        cfg = cfg.with_quad_nodes(q);
    }
    if let Some(w) = workers {
        cfg = cfg.with_workers(w);
    }
    cfg.validate(t.degree()).map_err(value_err)?;
    Ok(cfg)
}

fn trajectory_dict<'py>(py: Python<'py>, traj: &Trajectory) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("times", &traj.times)?;
    d.set_item("states", traj.states.iter().map(|y| y.as_slice().to_vec()).collect::<Vec<_>>())?;
    d.set_item("energies", &traj.energies)?;
    d.set_item("max_energy_drift", traj.max_energy_drift())?;
    d.set_item("newton_iterations", traj.total_iterations)?;
    d.set_item("mode", traj.mode.to_string())?;
    Ok(d)
}

/// Integrates a builtin problem (`oscillator`, `pendulum`, `kepler`, `henon-heiles`).
#[pyfunction]
#[pyo3(signature = (tableau, problem, h, steps, mode = "decoupled", tol = 1e-12, quad_nodes = None, workers = None))]
#[allow(clippy::too_many_arguments)]
fn integrate_problem<'py>(
    py: Python<'py>,
    tableau: &PyTableau,
    problem: &str,
    h: f64,
    steps: usize,
    mode: &str,
    tol: f64,
    quad_nodes: Option<usize>,
    workers: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let prob = problem_by_name(problem).map_err(value_err)?;
    let t = &tableau.inner;
    let cfg = solver_config(t, &prob.system, mode, tol, quad_nodes, workers)?;
    let traj = py.detach(|| integrate(t, &prob.system, &prob.y0, h, steps, &cfg)).map_err(runtime_err)?;
    trajectory_dict(py, &traj)
}

fn call_vector(f: &Py<PyAny>, y: &DVector<f64>) -> PyResult<Vec<f64>> {
    Python::attach(|py| f.call1(py, (y.as_slice().to_vec(),))?.extract::<Vec<f64>>(py))
}

/// Integrates `y' = J ∇H(y)` for canonical `J` with `y = (q, p)`.
/// `hamiltonian` and `gradient` take and return plain lists of floats.
#[pyfunction]
#[pyo3(signature = (tableau, hamiltonian, gradient, y0, h, steps, mode = "decoupled", tol = 1e-12, quad_nodes = None, poly_degree = None))]
#[allow(clippy::too_many_arguments)]
fn integrate_system<'py>(
    py: Python<'py>,
    tableau: &PyTableau,
    hamiltonian: Py<PyAny>,
    gradient: Py<PyAny>,
    y0: Vec<f64>,
    h: f64,
    steps: usize,
    mode: &str,
    tol: f64,
    quad_nodes: Option<usize>,
    poly_degree: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    if y0.is_empty() || !y0.len().is_multiple_of(2) {
        return Err(PyValueError::new_err("y0 must have even, nonzero length"));
    }
    let dim = y0.len();
    let h_fn = move |y: &DVector<f64>| {
        Python::attach(|py| hamiltonian.call1(py, (y.as_slice().to_vec(),))?.extract::<f64>(py)).unwrap_or(f64::NAN)
    };
    let g_fn = move |y: &DVector<f64>| match call_vector(&gradient, y) {
        Ok(v) if v.len() == dim => DVector::from_vec(v),
        _ => DVector::from_element(dim, f64::NAN),
    };
    let mut sys = HamiltonianSystem::new(canonical_structure(dim / 2), h_fn, g_fn).map_err(value_err)?;
    if let Some(d) = poly_degree {
        sys = sys.with_poly_degree(d);
    }
    let t = &tableau.inner;
    let cfg = solver_config(t, &sys, mode, tol, quad_nodes, Some(1))?;
    let y0 = DVector::from_vec(y0);
    let traj = py.detach(|| integrate(t, &sys, &y0, h, steps, &cfg)).map_err(runtime_err)?;
    trajectory_dict(py, &traj)
}

#[pymodule(name = "csrk")]
fn csrk_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTableau>()?;
    m.add_function(wrap_pyfunction!(integrate_problem, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_system, m)?)?;
    m.add("PROBLEMS", csrk::harness::PROBLEM_NAMES.to_vec())?;
    Ok(())
}
