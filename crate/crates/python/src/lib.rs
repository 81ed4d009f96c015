//! Python bindings: model parameters, Hilbert spaces, model matrices,
//! verification suites, propagation and the sideband tables.

use std::path::Path;

use ndarray::Array2;
use optomech::cli::{self, RunConfig};
use optomech::fock::{displacement_factor, DisplacementMethod};
use optomech::hamiltonians::ModelId;
use optomech::open_dynamics::closed_form_damped;
use optomech::suites::{displacement_oracle, SuiteId};
use optomech::C64;
use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::{Map, Value};

fn py_err(e: optomech::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn loads<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

fn dumps(obj: &Bound<'_, PyAny>) -> PyResult<String> {
    obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()
}

fn to_rows(a: &Array2<C64>) -> Vec<Vec<C64>> {
    a.rows().into_iter().map(|r| r.to_vec()).collect()
}

fn from_rows(rows: Vec<Vec<C64>>) -> PyResult<Array2<C64>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("expected a square matrix"));
    }
    Ok(Array2::from_shape_fn((n, n), |(i, j)| rows[i][j]))
}

fn run_config(config: Option<&Bound<'_, PyDict>>) -> PyResult<RunConfig> {
    match config {
        None => Ok(RunConfig::default()),
        Some(d) => RunConfig::from_json(&dumps(d.as_any())?).map_err(py_err),
    }
}

/// Physical parameters; keyword arguments override the defaults.
#[pyclass(name = "ModelParams", module = "optomech_py", from_py_object)]
#[derive(Clone)]
struct PyModelParams {
    inner: optomech::ModelParams,
}

impl PyModelParams {
    fn map(&self) -> Map<String, Value> {
        match serde_json::to_value(self.inner) {
            Ok(Value::Object(m)) => m,
            _ => Map::new(),
        }
    }

    fn set_map(&mut self, map: Map<String, Value>) -> PyResult<()> {
        let p: optomech::ModelParams = serde_json::from_value(Value::Object(map)).map_err(json_err)?;
        p.validate().map_err(py_err)?;
        self.inner = p;
        Ok(())
    }
}

#[pymethods]
impl PyModelParams {
    #[new]
    #[pyo3(signature = (**kwargs))]
    fn new(kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut p = PyModelParams { inner: optomech::ModelParams::default() };
        if let Some(kw) = kwargs {
            p.update(kw)?;
        }
        Ok(p)
    }

    /// Set several parameters at once; unknown names raise `KeyError`.
    fn update(&mut self, values: &Bound<'_, PyDict>) -> PyResult<()> {
        let mut map = self.map();
        let given: Map<String, Value> = serde_json::from_str(&dumps(values.as_any())?).map_err(json_err)?;
        for (k, v) in given {
            if !map.contains_key(&k) {
                return Err(PyKeyError::new_err(format!("unknown parameter {k}")));
            }
            map.insert(k, v);
        }
        self.set_map(map)
    }

    fn __getattr__<'py>(&self, py: Python<'py>, name: &str) -> PyResult<Bound<'py, PyAny>> {
        let map = self.map();
        let v = map.get(name).ok_or_else(|| pyo3::exceptions::PyAttributeError::new_err(name.to_string()))?;
        loads(py, &v.to_string())
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        loads(py, &Value::Object(self.map()).to_string())
    }

    /// `δ_p = ω_c − ω_p`
    #[getter]
    fn delta_p(&self) -> f64 {
        self.inner.delta_p()
    }

    /// Polaron shift ratio `g / ω_m`.
    #[getter]
    fn alpha(&self) -> PyResult<f64> {
        self.inner.alpha().map_err(py_err)
    }

    /// Kerr strength `g² / ω_m`.
    #[getter]
    fn kerr(&self) -> PyResult<f64> {
        self.inner.kerr().map_err(py_err)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("ModelParams({})", Value::Object(self.map()))
    }
}

/// Product space qubit ⊗ cavity ⊗ mechanics with truncated ladders.
#[pyclass(name = "HilbertSpace", module = "optomech_py", from_py_object)]
#[derive(Clone, Copy)]
struct PyHilbertSpace {
    inner: optomech::HilbertSpace,
}

#[pymethods]
impl PyHilbertSpace {
    #[new]
    #[pyo3(signature = (n_cavity, n_mech, has_qubit = false))]
    fn new(n_cavity: usize, n_mech: usize, has_qubit: bool) -> PyResult<Self> {
        let inner = optomech::HilbertSpace::new(has_qubit, n_cavity, n_mech).map_err(py_err)?;
        Ok(PyHilbertSpace { inner })
    }

    #[getter]
    fn n_cavity(&self) -> usize {
        self.inner.n_cavity()
    }

    #[getter]
    fn n_mech(&self) -> usize {
        self.inner.n_mech()
    }

    #[getter]
    fn has_qubit(&self) -> bool {
        self.inner.has_qubit()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.inner.dims()
    }

    /// Flat index of `|q, c, m⟩`; `q` is ignored without a qubit.
    #[pyo3(signature = (c, m, q = 0))]
    fn index(&self, c: usize, m: usize, q: usize) -> PyResult<usize> {
        if c >= self.inner.n_cavity() || m >= self.inner.n_mech() || q >= self.inner.n_qubit() {
            return Err(PyValueError::new_err("level out of range"));
        }
        Ok(self.inner.index(q, c, m))
    }

    /// `(q, c, m)` of a flat index.
    fn decompose(&self, idx: usize) -> PyResult<(usize, usize, usize)> {
        if idx >= self.inner.dim() {
            return Err(PyValueError::new_err(format!("index {idx} out of range")));
        }
        Ok(self.inner.decompose(idx))
    }

    fn __repr__(&self) -> String {
        format!(
            "HilbertSpace(n_cavity={}, n_mech={}, has_qubit={})",
            self.inner.n_cavity(),
            self.inner.n_mech(),
            if self.inner.has_qubit() { "True" } else { "False" }
        )
    }
}

/// Model ids accepted by `build_model`.
#[pyfunction]
fn models() -> Vec<&'static str> {
    ModelId::ALL.iter().map(|m| m.as_str()).collect()
}

/// Suite ids accepted by `verify`.
#[pyfunction]
fn suites() -> Vec<&'static str> {
    SuiteId::ALL.iter().map(|s| s.as_str()).collect()
}

/// Dense model Hamiltonian as nested lists of complex numbers.
#[pyfunction]
#[pyo3(signature = (model, params, space, t = 0.0))]
fn build_model(model: &str, params: &PyModelParams, space: &PyHilbertSpace, t: f64) -> PyResult<Vec<Vec<C64>>> {
    let id: ModelId = model.parse().map_err(py_err)?;
    let h = id.build(&params.inner, space.inner, t).map_err(py_err)?;
    Ok(to_rows(h.data()))
}

/// Displacement operator on one `n`-level ladder.
#[pyfunction]
#[pyo3(signature = (n, xi, method = "expm"))]
fn displacement(n: usize, xi: C64, method: &str) -> PyResult<Vec<Vec<C64>>> {
    let method = match method {
        "expm" => DisplacementMethod::Expm,
        "laguerre" => DisplacementMethod::Laguerre,
        other => return Err(PyValueError::new_err(format!("unknown method {other}; use expm or laguerre"))),
    };
    Ok(to_rows(&displacement_factor(n, xi, method).map_err(py_err)?))
}

/// Expm-versus-Laguerre comparison of `D(alpha)` with mechanical headroom.
#[pyfunction]
#[pyo3(signature = (alpha, n_mech = 24, buffer_mech = 4))]
fn check_displacement<'py>(
    py: Python<'py>,
    alpha: f64,
    n_mech: usize,
    buffer_mech: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let r = displacement_oracle(alpha, n_mech, buffer_mech).map_err(py_err)?;
    loads(py, &serde_json::to_string(&r).map_err(json_err)?)
}

/// Closed-form damped-oscillator density matrix at time `t`.
#[pyfunction]
fn damped_closed_form(rho0: Vec<Vec<C64>>, t: f64, omega_m: f64, gamma: f64) -> PyResult<Vec<Vec<C64>>> {
    let rho = closed_form_damped(&from_rows(rho0)?, t, omega_m, gamma).map_err(py_err)?;
    Ok(to_rows(&rho))
}

/// Run a suite (or `"all"`); returns the report document.
#[pyfunction]
#[pyo3(signature = (suite, config = None))]
fn verify<'py>(py: Python<'py>, suite: &str, config: Option<&Bound<'py, PyDict>>) -> PyResult<Bound<'py, PyAny>> {
    let cfg = run_config(config)?;
    let outcome = py.detach(|| cli::verify(&cfg, suite, None)).map_err(py_err)?;
    loads(py, &outcome.stdout)
}

fn csv_columns<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyDict>> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); header.len()];
    for line in lines {
        for (col, field) in cols.iter_mut().zip(line.split(',')) {
            col.push(field.parse().unwrap_or(f64::NAN));
        }
    }
    let dict = PyDict::new(py);
    for (name, col) in header.into_iter().zip(cols) {
        dict.set_item(name, PyList::new(py, col)?)?;
    }
    Ok(dict)
}

/// Propagate `state` under a model or Lindblad generator. Returns
/// `(columns, passed)` where `columns` maps CSV headers to values.
#[pyfunction]
#[pyo3(signature = (model, state = "fock:0,0", config = None))]
fn evolve<'py>(
    py: Python<'py>,
    model: &str,
    state: &str,
    config: Option<&Bound<'py, PyDict>>,
) -> PyResult<(Bound<'py, PyDict>, bool)> {
    let cfg = run_config(config)?;
    let outcome = py.detach(|| cli::evolve(&cfg, model, state, None)).map_err(py_err)?;
    Ok((csv_columns(py, &outcome.stdout)?, !outcome.failed))
}

/// Band-coupling table and orientation report: `(columns, report)`.
#[pyfunction]
#[pyo3(signature = (config = None))]
fn sidebands<'py>(
    py: Python<'py>,
    config: Option<&Bound<'py, PyDict>>,
) -> PyResult<(Bound<'py, PyDict>, Bound<'py, PyAny>)> {
    let cfg = run_config(config)?;
    let outcome = py.detach(|| cli::sidebands(&cfg, Some(Path::new("sidebands.csv")))).map_err(py_err)?;
    let table = outcome.files.first().map(|(_, b)| String::from_utf8_lossy(b).into_owned()).unwrap_or_default();
    Ok((csv_columns(py, &table)?, loads(py, &outcome.stdout)?))
}

#[pymodule]
fn optomech_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModelParams>()?;
    m.add_class::<PyHilbertSpace>()?;
    m.add_function(wrap_pyfunction!(models, m)?)?;
    m.add_function(wrap_pyfunction!(suites, m)?)?;
    m.add_function(wrap_pyfunction!(build_model, m)?)?;
    m.add_function(wrap_pyfunction!(displacement, m)?)?;
    m.add_function(wrap_pyfunction!(check_displacement, m)?)?;
    m.add_function(wrap_pyfunction!(damped_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(sidebands, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
