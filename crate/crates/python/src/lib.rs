//! Python module `mapbayes`.
//!
//! Results come back as plain dicts and lists, mirroring the JSON the CLI
//! writes. Search boxes are `(lo, hi)` floats in 1D or coordinate lists in 2D.

use mapbayes_core::convergence::{self, default_ladder};
use mapbayes_core::counterexample::{self, CounterexampleSpec};
use mapbayes_core::format::{density_from_json, density_to_json, load_density_file};
use mapbayes_core::mollifier;
use mapbayes_core::{BallObjective, GridDensity, LossSpec, SearchBox};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;
use serde_json::Value;

create_exception!(mapbayes, MapBayesError, PyValueError, "Raised for invalid densities, boxes and arguments.");

fn err(e: mapbayes_core::Error) -> PyErr {
    MapBayesError::new_err(e.to_string())
}

fn value_to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_i64(), n.as_f64()) {
            (Some(i), _) => i.into_pyobject(py)?.into_any(),
            (None, Some(f)) => f.into_pyobject(py)?.into_any(),
            _ => py.None().into_bound(py),
        },
        // non-finite reals are serialized as strings
        Value::String(s) => match s.as_str() {
            "inf" => f64::INFINITY.into_pyobject(py)?.into_any(),
            "-inf" => f64::NEG_INFINITY.into_pyobject(py)?.into_any(),
            "nan" => f64::NAN.into_pyobject(py)?.into_any(),
            _ => s.into_pyobject(py)?.into_any(),
        },
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(value_to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, value_to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn to_py<'py, T: Serialize>(py: Python<'py>, x: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(x).map_err(|e| MapBayesError::new_err(e.to_string()))?;
    value_to_py(py, &v)
}

fn coords(x: &Bound<'_, PyAny>) -> PyResult<Vec<f64>> {
    match x.extract::<f64>() {
        Ok(v) => Ok(vec![v]),
        Err(_) => x.extract::<Vec<f64>>(),
    }
}

fn search_box(lo: &Bound<'_, PyAny>, hi: &Bound<'_, PyAny>) -> PyResult<SearchBox> {
    Ok(SearchBox {
        lo: coords(lo)?,
        hi: coords(hi)?,
    })
}

/// A piecewise 1D density or a 1D/2D histogram.
#[pyclass(name = "Density", module = "mapbayes", frozen)]
struct PyDensity {
    inner: mapbayes_core::Density,
}

#[pymethods]
impl PyDensity {
    /// Parses the JSON piece or grid format.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        density_from_json(text).map(|inner| PyDensity { inner }).map_err(err)
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        load_density_file(&path).map(|inner| PyDensity { inner }).map_err(err)
    }

    /// The non-convergence example with bumps `1..=max_bump`.
    #[staticmethod]
    #[pyo3(signature = (max_bump = counterexample::DEFAULT_MAX_BUMP))]
    fn counterexample(max_bump: u32) -> PyResult<Self> {
        counterexample::build_density(&CounterexampleSpec { max_bump })
            .map(|inner| PyDensity { inner })
            .map_err(err)
    }

    /// Cell-constant histogram; `values` is row-major.
    #[staticmethod]
    #[pyo3(signature = (origin, spacing, shape, values, normalize = false))]
    fn grid(origin: Vec<f64>, spacing: Vec<f64>, shape: Vec<usize>, values: Vec<f64>, normalize: bool) -> PyResult<Self> {
        let g = if normalize {
            GridDensity::normalized(origin, spacing, shape, values)
        } else {
            GridDensity::new(origin, spacing, shape, values)
        };
        g.map(|g| PyDensity { inner: g.into() }).map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn evaluate(&self, theta: &Bound<'_, PyAny>) -> PyResult<f64> {
        let p = coords(theta)?;
        if p.len() != self.inner.dim() {
            return Err(err(mapbayes_core::Error::DimensionMismatch {
                expected: self.inner.dim(),
                got: p.len(),
            }));
        }
        Ok(self.inner.evaluate(&p))
    }

    /// Exact integral over `[lo, hi]` (one-dimensional densities).
    fn integrate(&self, lo: f64, hi: f64) -> PyResult<f64> {
        let pw = self
            .inner
            .as_piecewise()
            .ok_or_else(|| MapBayesError::new_err("integrate needs a one-dimensional density"))?;
        Ok(pw.integrate(lo, hi))
    }

    fn to_json(&self) -> PyResult<String> {
        density_to_json(&self.inner).map_err(err)
    }

    fn __repr__(&self) -> String {
        match &self.inner {
            mapbayes_core::Density::Piecewise(p) => format!("Density(pieces={})", p.pieces().len()),
            mapbayes_core::Density::Grid(g) => format!("Density(grid shape={:?})", g.shape()),
        }
    }
}

#[pyfunction]
fn map_estimate<'py>(py: Python<'py>, d: &PyDensity, lo: &Bound<'py, PyAny>, hi: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let r = mapbayes_core::map_estimate(&d.inner, &search_box(lo, hi)?).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
fn bayes_estimate<'py>(
    py: Python<'py>,
    d: &PyDensity,
    c: f64,
    lo: &Bound<'py, PyAny>,
    hi: &Bound<'py, PyAny>,
) -> PyResult<Bound<'py, PyAny>> {
    let loss = LossSpec::new(c).map_err(err)?;
    let r = mapbayes_core::bayes_estimate(&d.inner, &loss, &search_box(lo, hi)?).map_err(err)?;
    to_py(py, &r)
}

/// Bayes-optimal ball mass minus the ball mass at `theta`.
#[pyfunction]
fn approx_gap(d: &PyDensity, c: f64, theta: &Bound<'_, PyAny>, lo: &Bound<'_, PyAny>, hi: &Bound<'_, PyAny>) -> PyResult<f64> {
    let loss = LossSpec::new(c).map_err(err)?;
    let g = mapbayes_core::approx_gap(&d.inner, &loss, &coords(theta)?, &search_box(lo, hi)?).map_err(err)?;
    Ok(g.gap)
}

#[pyfunction]
#[pyo3(signature = (d, theta, radius, normalized = false))]
fn ball_integral(d: &PyDensity, theta: &Bound<'_, PyAny>, radius: f64, normalized: bool) -> PyResult<f64> {
    let b = BallObjective::new(&d.inner, radius, normalized).map_err(err)?;
    let p = coords(theta)?;
    if p.len() != d.inner.dim() {
        return Err(MapBayesError::new_err("theta has the wrong dimension"));
    }
    Ok(mapbayes_core::ball_integral(&b, &p))
}

#[pyfunction]
fn mollified_sup<'py>(
    py: Python<'py>,
    d: &PyDensity,
    nu: f64,
    lo: &Bound<'py, PyAny>,
    hi: &Bound<'py, PyAny>,
) -> PyResult<Bound<'py, PyAny>> {
    let b = BallObjective::mollified(&d.inner, nu).map_err(err)?;
    let r = mollifier::mollified_sup(&b, &search_box(lo, hi)?).map_err(err)?;
    to_py(py, &r)
}

/// Bayes estimators along `ladder` (default `2·4^ν`, ν = 1..=6).
#[pyfunction]
#[pyo3(signature = (d, lo, hi, ladder = None))]
fn sweep<'py>(
    py: Python<'py>,
    d: &PyDensity,
    lo: &Bound<'py, PyAny>,
    hi: &Bound<'py, PyAny>,
    ladder: Option<Vec<f64>>,
) -> PyResult<Bound<'py, PyAny>> {
    let ladder = ladder.unwrap_or_else(|| default_ladder(6));
    let sbox = search_box(lo, hi)?;
    let inner = &d.inner;
    let trace = py
        .detach(|| convergence::sweep(inner, &ladder, &sbox))
        .map_err(err)?;
    to_py(py, &trace)
}

#[pyfunction]
#[pyo3(signature = (d, alpha_grid, seed = 0))]
fn check_conditions<'py>(py: Python<'py>, d: &PyDensity, alpha_grid: Vec<f64>, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let r = convergence::check_conditions(&d.inner, &alpha_grid, seed).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
fn hypo_diagnostic<'py>(
    py: Python<'py>,
    d: &PyDensity,
    nu_list: Vec<f64>,
    boxes: Vec<(f64, f64)>,
    opens: Vec<(f64, f64)>,
) -> PyResult<Bound<'py, PyAny>> {
    let r = convergence::hypo_diagnostic(&d.inner, &nu_list, &boxes, &opens).map_err(err)?;
    to_py(py, &r)
}

/// Ball mass at the origin of the counterexample for `c = 2·4^ν`.
#[pyfunction]
fn objective_at_origin(nu: u32) -> f64 {
    counterexample::objective_at_origin(nu)
}

#[pyfunction]
#[pyo3(signature = (nu, max_bump = counterexample::DEFAULT_MAX_BUMP))]
fn plateau_bound(nu: u32, max_bump: u32) -> PyResult<f64> {
    counterexample::plateau_bound(nu, max_bump).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (nu_max, max_bump = counterexample::DEFAULT_MAX_BUMP))]
fn verify_nonconvergence(py: Python<'_>, nu_max: u32, max_bump: u32) -> PyResult<Bound<'_, PyAny>> {
    let d = counterexample::build_density(&CounterexampleSpec { max_bump }).map_err(err)?;
    let r = counterexample::verify_nonconvergence(&d, nu_max, &counterexample::search_box(nu_max)).map_err(err)?;
    to_py(py, &r)
}

#[pymodule]
fn mapbayes(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("MapBayesError", m.py().get_type::<MapBayesError>())?;
    m.add_class::<PyDensity>()?;
    m.add_function(wrap_pyfunction!(map_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(bayes_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(approx_gap, m)?)?;
    m.add_function(wrap_pyfunction!(ball_integral, m)?)?;
    m.add_function(wrap_pyfunction!(mollified_sup, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(check_conditions, m)?)?;
    m.add_function(wrap_pyfunction!(hypo_diagnostic, m)?)?;
    m.add_function(wrap_pyfunction!(objective_at_origin, m)?)?;
    m.add_function(wrap_pyfunction!(plateau_bound, m)?)?;
    m.add_function(wrap_pyfunction!(verify_nonconvergence, m)?)?;
    Ok(())
}
