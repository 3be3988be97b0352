//! Python bindings. The module is importable as `xychain`.
//!
//! Parameter objects are small frozen classes; results come back as floats,
//! tuples, lists and dicts so that they drop straight into numpy or pandas.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use xychain::oracle;
use xychain::scans::{self, FigureConfig, SweepRow, ThresholdSet};
use xychain::{CorrelatorSet, Cut, EntanglementReport, Error};

create_exception!(xychain, NumericalError, PyRuntimeError, "A numerical routine failed.");

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidParameter { .. } | Error::SizeLimit { .. } => PyValueError::new_err(e.to_string()),
        _ => NumericalError::new_err(e.to_string()),
    }
}

/// Field `h`, anisotropy `gamma` in [0, 1] and reduced temperature `t`.
#[pyclass(name = "ModelParams", frozen, eq, from_py_object)]
#[derive(Clone, Copy, PartialEq)]
pub struct PyModelParams(xychain::ModelParams);

#[pymethods]
impl PyModelParams {
    #[new]
    #[pyo3(signature = (h, gamma, t = 0.0))]
    fn new(h: f64, gamma: f64, t: f64) -> PyResult<Self> {
        xychain::ModelParams::new(h, gamma, t).map(Self).map_err(to_py)
    }

    #[getter]
    fn h(&self) -> f64 {
        self.0.h
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma
    }

    #[getter]
    fn t(&self) -> f64 {
        self.0.t
    }

    fn __repr__(&self) -> String {
        format!("ModelParams(h={}, gamma={}, t={})", self.0.h, self.0.gamma, self.0.t)
    }
}

/// Sites `i < j < k` with `j - i = alpha` and `k - j = beta`.
#[pyclass(name = "TripleGeometry", frozen, eq, from_py_object)]
#[derive(Clone, Copy, PartialEq)]
pub struct PyTripleGeometry(xychain::TripleGeometry);

#[pymethods]
impl PyTripleGeometry {
    #[new]
    #[pyo3(signature = (alpha = 1, beta = 1))]
    fn new(alpha: usize, beta: usize) -> PyResult<Self> {
        xychain::TripleGeometry::new(alpha, beta).map(Self).map_err(to_py)
    }

    #[getter]
    fn alpha(&self) -> usize {
        self.0.alpha()
    }

    #[getter]
    fn beta(&self) -> usize {
        self.0.beta()
    }

    fn __repr__(&self) -> String {
        format!("TripleGeometry(alpha={}, beta={})", self.0.alpha(), self.0.beta())
    }
}

#[pyclass(name = "QuadratureConfig", frozen, eq, from_py_object)]
#[derive(Clone, Copy, PartialEq)]
pub struct PyQuadratureConfig(xychain::QuadratureConfig);

#[pymethods]
impl PyQuadratureConfig {
    #[new]
    #[pyo3(signature = (abs_tol = 1e-10, max_subdivisions = 2048))]
    fn new(abs_tol: f64, max_subdivisions: usize) -> PyResult<Self> {
        xychain::QuadratureConfig::new(abs_tol, max_subdivisions)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn abs_tol(&self) -> f64 {
        self.0.abs_tol
    }

    #[getter]
    fn max_subdivisions(&self) -> usize {
        self.0.max_subdivisions
    }
}

fn quad(q: Option<PyQuadratureConfig>) -> xychain::QuadratureConfig {
    q.map(|q| q.0).unwrap_or_default()
}

/// Negativities, concurrences and classification of a three-spin state.
#[pyclass(name = "EntanglementReport", frozen)]
pub struct PyEntanglementReport(EntanglementReport);

#[pymethods]
impl PyEntanglementReport {
    /// Negativities across the cuts i|jk, j|ik, k|ij.
    #[getter]
    fn negativities(&self) -> [f64; 3] {
        Cut::ALL.map(|c| self.0.negativity(c))
    }

    /// Concurrences of the pairs (i, j), (j, k), (i, k).
    #[getter]
    fn concurrences(&self) -> [f64; 3] {
        self.0.conc
    }

    #[getter]
    fn classification(&self) -> &'static str {
        self.0.classification.label()
    }

    #[getter]
    fn npt_cuts(&self) -> Vec<&'static str> {
        self.0.npt_cuts.iter().map(|c| c.label()).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "EntanglementReport(classification={:?}, negativities={:?}, concurrences={:?})",
            self.classification(),
            self.negativities(),
            self.0.conc
        )
    }
}

#[pyfunction]
#[pyo3(signature = (k, params, quad = None))]
fn g_k(k: i64, params: PyModelParams, quad: Option<PyQuadratureConfig>) -> PyResult<f64> {
    xychain::g_k(k, &params.0, &self::quad(quad)).map_err(to_py)
}

/// The nineteen correlators as a name -> value dict.
#[pyfunction]
#[pyo3(signature = (geometry, params, quad = None))]
fn correlator_set<'py>(
    py: Python<'py>,
    geometry: PyTripleGeometry,
    params: PyModelParams,
    quad: Option<PyQuadratureConfig>,
) -> PyResult<Bound<'py, PyDict>> {
    let set = xychain::correlator_set(&geometry.0, &params.0, &self::quad(quad)).map_err(to_py)?;
    let d = PyDict::new(py);
    for (name, value) in CorrelatorSet::NAMES.iter().zip(set.values()) {
        d.set_item(name, value)?;
    }
    Ok(d)
}

fn rows(m: &xychain::state::Matrix8) -> Vec<Vec<f64>> {
    (0..8).map(|r| (0..8).map(|c| m[(r, c)]).collect()).collect()
}

/// The 8x8 density matrix as nested lists, basis index `4 s_i + 2 s_j + s_k` with 0 = up.
#[pyfunction]
#[pyo3(signature = (geometry, params, quad = None))]
fn rho3(geometry: PyTripleGeometry, params: PyModelParams, quad: Option<PyQuadratureConfig>) -> PyResult<Vec<Vec<f64>>> {
    let rho = xychain::state::rho3_for(&geometry.0, &params.0, &self::quad(quad)).map_err(to_py)?;
    Ok(rows(rho.matrix()))
}

#[pyfunction]
#[pyo3(signature = (params, geometry, quad = None))]
fn analyze_triple(
    params: PyModelParams,
    geometry: PyTripleGeometry,
    quad: Option<PyQuadratureConfig>,
) -> PyResult<PyEntanglementReport> {
    xychain::analyze_triple(&params.0, &geometry.0, &self::quad(quad))
        .map(PyEntanglementReport)
        .map_err(to_py)
}

/// `(range, capped)`: the largest entangled pair distance up to `d_max`.
#[pyfunction]
#[pyo3(signature = (params, d_max = 10, quad = None))]
fn pair_range(params: PyModelParams, d_max: usize, quad: Option<PyQuadratureConfig>) -> PyResult<(usize, bool)> {
    let r = scans::pair_range(&params.0, d_max, &self::quad(quad)).map_err(to_py)?;
    Ok((r.range, r.capped))
}

fn parse_config(s: &str) -> PyResult<FigureConfig> {
    let bad = || PyValueError::new_err(format!("config must look like 'a:4' or 'b:4', got {s:?}"));
    let (kind, d) = s.split_once(':').ok_or_else(bad)?;
    let d: usize = d.parse().map_err(|_| bad())?;
    match kind {
        "a" => Ok(FigureConfig::ConfigA(d)),
        "b" => Ok(FigureConfig::ConfigB(d)),
        _ => Err(bad()),
    }
}

fn sweep_row_dict<'py>(py: Python<'py>, r: &SweepRow) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("h", r.h)?;
    d.set_item("t", r.t)?;
    d.set_item("alpha", r.alpha)?;
    d.set_item("beta", r.beta)?;
    d.set_item("neg_first", r.neg_first)?;
    d.set_item("neg_middle", r.neg_middle)?;
    d.set_item("neg_last", r.neg_last)?;
    d.set_item("conc_ij", r.conc_ij)?;
    d.set_item("conc_jk", r.conc_jk)?;
    d.set_item("conc_ik", r.conc_ik)?;
    d.set_item("class_label", &r.class_label)?;
    d.set_item("error", &r.error)?;
    Ok(d)
}

/// One dict per field value, in grid order. `config` is `"a:<d>"` or `"b:<d>"`.
#[pyfunction]
#[pyo3(signature = (gamma, t, config, h_grid, quad = None))]
fn sweep_field<'py>(
    py: Python<'py>,
    gamma: f64,
    t: f64,
    config: &str,
    h_grid: Vec<f64>,
    quad: Option<PyQuadratureConfig>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let config = parse_config(config)?;
    let q = self::quad(quad);
    let rows = py
        .detach(|| scans::sweep_field(gamma, t, config, &h_grid, &q))
        .map_err(to_py)?;
    rows.iter().map(|r| sweep_row_dict(py, r)).collect()
}

fn thresholds_dict<'py>(py: Python<'py>, s: &ThresholdSet) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("h", s.h)?;
    d.set_item("gamma", s.gamma)?;
    let names = ["t_c2", "t_c1", "t_n_ext", "t_n_centr"];
    for (name, th) in names.iter().zip(s.ordered()) {
        d.set_item(name, th.map(|x| x.t))?;
    }
    d.set_item("ordering_holds", s.ordering_holds())?;
    Ok(d)
}

/// Death temperatures of the adjacent triple; absent quantities are None.
#[pyfunction]
#[pyo3(signature = (gamma, h, t_max = 2.0, quad = None))]
fn thermal_thresholds<'py>(
    py: Python<'py>,
    gamma: f64,
    h: f64,
    t_max: f64,
    quad: Option<PyQuadratureConfig>,
) -> PyResult<Bound<'py, PyDict>> {
    let q = self::quad(quad);
    let set = py
        .detach(|| scans::thermal_thresholds(gamma, h, t_max, &q))
        .map_err(to_py)?;
    thresholds_dict(py, &set)
}

#[pyfunction]
fn factorizing_field(gamma: f64) -> PyResult<f64> {
    scans::factorizing_field(gamma).map_err(to_py)
}

/// Max-abs deviations between exact diagonalization, finite free fermions
/// and the infinite chain for sites `(i, j, k)` of an open chain of `n` sites.
#[pyfunction]
#[pyo3(signature = (params, n, sites, quad = None))]
fn oracle_compare<'py>(
    py: Python<'py>,
    params: PyModelParams,
    n: usize,
    sites: [usize; 3],
    quad: Option<PyQuadratureConfig>,
) -> PyResult<Bound<'py, PyDict>> {
    let q = self::quad(quad);
    let c = py
        .detach(|| oracle::compare(&params.0, n, sites, &q))
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("ed_vs_fermion", c.ed_vs_fermion)?;
    d.set_item("ed_vs_thermodynamic", c.ed_vs_thermodynamic)?;
    d.set_item("fermion_vs_thermodynamic", c.fermion_vs_thermodynamic)?;
    Ok(d)
}

#[pymodule]
#[pyo3(name = "xychain")]
pub fn xychain_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModelParams>()?;
    m.add_class::<PyTripleGeometry>()?;
    m.add_class::<PyQuadratureConfig>()?;
    m.add_class::<PyEntanglementReport>()?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_function(wrap_pyfunction!(g_k, m)?)?;
    m.add_function(wrap_pyfunction!(correlator_set, m)?)?;
    m.add_function(wrap_pyfunction!(rho3, m)?)?;
    m.add_function(wrap_pyfunction!(analyze_triple, m)?)?;
    m.add_function(wrap_pyfunction!(pair_range, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_field, m)?)?;
    m.add_function(wrap_pyfunction!(thermal_thresholds, m)?)?;
    m.add_function(wrap_pyfunction!(factorizing_field, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_compare, m)?)?;
    Ok(())
}
