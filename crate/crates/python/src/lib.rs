//! Python bindings: `import piterbarg`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use piterbarg_core as core;
use piterbarg_core::rng::replication_stream;
use piterbarg_core::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidConfig(_) | Error::Domain(_) | Error::NotNested(_) | Error::ConfigMismatch => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn parse_domain(domain: &str) -> PyResult<core::Domain> {
    domain.parse().map_err(to_py)
}

fn json<T: serde::Serialize>(x: &T) -> String {
    serde_json::to_string(x).expect("serializable")
}

#[pyclass(frozen, skip_from_py_object, name = "EstimatorConfig")]
#[derive(Clone)]
struct PyEstimatorConfig(core::EstimatorConfig);

#[pymethods]
impl PyEstimatorConfig {
    /// `horizon` defaults to `plan_horizon(delta, alpha)`.
    #[new]
    #[pyo3(signature = (alpha, d, domain, delta, replications, seed, horizon = None))]
    fn new(alpha: f64, d: f64, domain: &str, delta: f64, replications: u64, seed: u64, horizon: Option<f64>) -> PyResult<Self> {
        let horizon = match horizon {
            Some(t) => t,
            None => core::plan_horizon(delta, alpha).map_err(to_py)?,
        };
        let config = core::EstimatorConfig { alpha, d, domain: parse_domain(domain)?, delta, horizon, replications, seed };
        config.validate().map_err(to_py)?;
        Ok(Self(config))
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.0.alpha
    }
    #[getter]
    fn d(&self) -> f64 {
        self.0.d
    }
    #[getter]
    fn domain(&self) -> String {
        self.0.domain.to_string()
    }
    #[getter]
    fn delta(&self) -> f64 {
        self.0.delta
    }
    #[getter]
    fn horizon(&self) -> f64 {
        self.0.horizon
    }
    #[getter]
    fn replications(&self) -> u64 {
        self.0.replications
    }
    #[getter]
    fn seed(&self) -> u64 {
        self.0.seed
    }
    fn to_json(&self) -> String {
        json(&self.0)
    }
    fn __repr__(&self) -> String {
        format!("EstimatorConfig({})", self.to_json())
    }
}

#[pyclass(frozen, name = "EstimateResult")]
struct PyEstimateResult(core::EstimateResult);

#[pymethods]
impl PyEstimateResult {
    #[getter]
    fn estimate(&self) -> f64 {
        self.0.estimate
    }
    #[getter]
    fn stderr(&self) -> Option<f64> {
        self.0.stderr
    }
    #[getter]
    fn ci_low(&self) -> Option<f64> {
        self.0.ci_low
    }
    #[getter]
    fn ci_high(&self) -> Option<f64> {
        self.0.ci_high
    }
    #[getter]
    fn method(&self) -> &'static str {
        match self.0.method {
            core::Method::SampleMean => "sample-mean",
            core::Method::MedianOfMeans => "median-of-means",
        }
    }
    #[getter]
    fn replications(&self) -> u64 {
        self.0.replications
    }
    #[getter]
    fn warning(&self) -> Option<String> {
        self.0.warning.clone()
    }
    #[getter]
    fn config(&self) -> PyEstimatorConfig {
        PyEstimatorConfig(self.0.config)
    }
    fn to_json(&self) -> String {
        json(&self.0)
    }
    fn __repr__(&self) -> String {
        format!("EstimateResult(estimate={}, method={:?})", self.0.estimate, self.method())
    }
}

#[pyclass(frozen, name = "BudgetReport")]
struct PyBudgetReport(core::BudgetReport);

#[pymethods]
impl PyBudgetReport {
    #[getter]
    fn delta(&self) -> f64 {
        self.0.delta
    }
    #[getter]
    fn horizon(&self) -> f64 {
        self.0.horizon
    }
    #[getter]
    fn disc_bound(&self) -> f64 {
        self.0.disc_bound
    }
    #[getter]
    fn trunc_bound(&self) -> f64 {
        self.0.trunc_bound
    }
    #[getter]
    fn stat_error(&self) -> Option<f64> {
        self.0.stat_error
    }
    #[getter]
    fn total(&self) -> f64 {
        self.0.total
    }
    #[getter]
    fn up_to_constant(&self) -> bool {
        self.0.up_to_constant
    }
    #[getter]
    fn short_horizon(&self) -> bool {
        self.0.short_horizon
    }
    fn to_json(&self) -> String {
        json(&self.0)
    }
    fn __repr__(&self) -> String {
        format!("BudgetReport({})", self.to_json())
    }
}

#[pyclass(frozen, name = "RatePoint")]
struct PyRatePoint(core::RatePoint);

#[pymethods]
impl PyRatePoint {
    #[getter]
    fn delta(&self) -> f64 {
        self.0.delta
    }
    #[getter]
    fn p_hat(&self) -> f64 {
        self.0.p_hat
    }
    #[getter]
    fn stderr(&self) -> f64 {
        self.0.stderr
    }
    #[getter]
    fn gap(&self) -> f64 {
        self.0.gap
    }
    #[getter]
    fn gap_stderr(&self) -> f64 {
        self.0.gap_stderr
    }
    #[getter]
    fn empirical_rate(&self) -> f64 {
        self.0.empirical_rate
    }
    #[getter]
    fn paired_gap(&self) -> f64 {
        self.0.paired_gap
    }
    #[getter]
    fn below_noise(&self) -> bool {
        self.0.below_noise
    }
    fn csv_row(&self) -> String {
        self.0.csv_row()
    }
    fn __repr__(&self) -> String {
        format!("RatePoint({})", json(&self.0))
    }
}

#[pyclass(frozen, name = "GapDecayReport")]
struct PyGapDecayReport(core::GapDecayReport);

#[pymethods]
impl PyGapDecayReport {
    #[getter]
    fn alpha(&self) -> f64 {
        self.0.alpha
    }
    /// `(delta, gap, gap_stderr)` relative to the finest grid.
    #[getter]
    fn points(&self) -> Vec<(f64, f64, f64)> {
        self.0.points.iter().map(|p| (p.delta, p.gap, p.gap_stderr)).collect()
    }
    /// `(coarse_delta, fine_delta, gap, gap_stderr)` between consecutive grids.
    #[getter]
    fn increments(&self) -> Vec<(f64, f64, f64, f64)> {
        self.0.increments.iter().map(|g| (g.coarse_delta, g.fine_delta, g.gap, g.gap_stderr)).collect()
    }
    #[getter]
    fn successive_ratios(&self) -> Vec<f64> {
        self.0.successive_ratios.clone()
    }
    #[getter]
    fn fitted_exponent(&self) -> Option<f64> {
        self.0.fitted_exponent
    }
    #[getter]
    fn exponent_stderr(&self) -> Option<f64> {
        self.0.exponent_stderr
    }
    fn to_json(&self) -> String {
        json(&self.0)
    }
}

#[pyfunction]
fn estimate_constant(py: Python<'_>, config: &PyEstimatorConfig) -> PyResult<PyEstimateResult> {
    let config = config.0;
    py.detach(|| core::estimate_constant(&config)).map(PyEstimateResult).map_err(to_py)
}

#[pyfunction]
fn plan_horizon(delta: f64, alpha: f64) -> PyResult<f64> {
    core::plan_horizon(delta, alpha).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (delta, alpha, c_disc = 1.0))]
fn discretization_bound(delta: f64, alpha: f64, c_disc: f64) -> PyResult<f64> {
    core::discretization_bound(delta, alpha, c_disc).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (horizon, alpha, c_trunc = 1.0))]
fn truncation_bound(horizon: f64, alpha: f64, c_trunc: f64) -> PyResult<f64> {
    core::truncation_bound(horizon, alpha, c_trunc).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (delta, alpha, horizon = None, c_disc = None, c_trunc = None))]
fn plan_budget(delta: f64, alpha: f64, horizon: Option<f64>, c_disc: Option<f64>, c_trunc: Option<f64>) -> PyResult<PyBudgetReport> {
    core::plan_budget(delta, alpha, horizon, c_disc, c_trunc).map(PyBudgetReport).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (config, result, c_disc = None, c_trunc = None))]
fn total_budget(
    config: &PyEstimatorConfig,
    result: &PyEstimateResult,
    c_disc: Option<f64>,
    c_trunc: Option<f64>,
) -> PyResult<PyBudgetReport> {
    core::total_budget(&config.0, &result.0, c_disc, c_trunc).map(PyBudgetReport).map_err(to_py)
}

#[pyfunction]
fn piterbarg_bm_half(d: f64) -> PyResult<f64> {
    core::piterbarg_bm_half(d).map_err(to_py)
}

#[pyfunction]
fn piterbarg_bm_full(d: f64) -> PyResult<f64> {
    core::piterbarg_bm_full(d).map_err(to_py)
}

/// `-zeta(1/2) / sqrt(pi)`.
#[pyfunction]
fn rate_constant() -> f64 {
    core::rate_constant().value
}

#[pyfunction]
fn fgn_autocovariance(alpha: f64, k: u64) -> PyResult<f64> {
    core::fgn_autocovariance(alpha, k).map_err(to_py)
}

/// Unit-spacing fBM on `{-neg, ..., pos}`, as a list indexed from `-neg`.
/// Draw `stream` of `seed` matches replication `stream` of the estimator.
#[pyfunction]
#[pyo3(signature = (alpha, neg, pos, seed, stream = 0))]
fn sample_two_sided_path(py: Python<'_>, alpha: f64, neg: usize, pos: usize, seed: u64, stream: u64) -> PyResult<Vec<f64>> {
    py.detach(|| core::sample_two_sided_path(alpha, neg, pos, &mut replication_stream(seed, stream)))
        .map(|p| p.values)
        .map_err(to_py)
}

#[pyfunction]
fn run_rate_study_bm(
    py: Python<'_>,
    d: f64,
    domain: &str,
    deltas: Vec<f64>,
    replications: u64,
    seed: u64,
) -> PyResult<Vec<PyRatePoint>> {
    let domain = parse_domain(domain)?;
    py.detach(|| core::run_rate_study_bm(d, domain, &deltas, replications, seed))
        .map(|points| points.into_iter().map(PyRatePoint).collect())
        .map_err(to_py)
}

#[pyfunction]
fn run_gap_decay(
    py: Python<'_>,
    alpha: f64,
    d: f64,
    domain: &str,
    deltas: Vec<f64>,
    replications: u64,
    seed: u64,
) -> PyResult<PyGapDecayReport> {
    let domain = parse_domain(domain)?;
    py.detach(|| core::run_gap_decay(alpha, d, domain, &deltas, replications, seed))
        .map(PyGapDecayReport)
        .map_err(to_py)
}

#[pyfunction]
fn rate_points_csv(points: Vec<PyRef<'_, PyRatePoint>>) -> String {
    let points: Vec<core::RatePoint> = points.iter().map(|p| p.0.clone()).collect();
    core::rate_study::rate_points_csv(&points)
}

#[pymodule]
fn piterbarg(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyEstimatorConfig>()?;
    m.add_class::<PyEstimateResult>()?;
    m.add_class::<PyBudgetReport>()?;
    m.add_class::<PyRatePoint>()?;
    m.add_class::<PyGapDecayReport>()?;
    m.add_function(wrap_pyfunction!(estimate_constant, m)?)?;
    m.add_function(wrap_pyfunction!(plan_horizon, m)?)?;
    m.add_function(wrap_pyfunction!(discretization_bound, m)?)?;
    m.add_function(wrap_pyfunction!(truncation_bound, m)?)?;
    m.add_function(wrap_pyfunction!(plan_budget, m)?)?;
    m.add_function(wrap_pyfunction!(total_budget, m)?)?;
    m.add_function(wrap_pyfunction!(piterbarg_bm_half, m)?)?;
    m.add_function(wrap_pyfunction!(piterbarg_bm_full, m)?)?;
    m.add_function(wrap_pyfunction!(rate_constant, m)?)?;
    m.add_function(wrap_pyfunction!(fgn_autocovariance, m)?)?;
    m.add_function(wrap_pyfunction!(sample_two_sided_path, m)?)?;
    m.add_function(wrap_pyfunction!(run_rate_study_bm, m)?)?;
    m.add_function(wrap_pyfunction!(run_gap_decay, m)?)?;
    m.add_function(wrap_pyfunction!(rate_points_csv, m)?)?;
    Ok(())
}
