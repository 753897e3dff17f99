//! Python bindings. Results come back as plain dicts and lists; experiment
//! and DGP configurations are passed as dicts or JSON strings.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyString;
use serde::de::DeserializeOwned;
use serde::Serialize;

use predreg::dgp::{self, DgpContinuousConfig, DgpDiscreteConfig};
use predreg::estimators::{self, Parity};
use predreg::experiments::{self, ExperimentGrid};
use predreg::inference::{self, Sided, VarianceEstimator};
use predreg::stats::RngStream;
use predreg::{io, Error, RegressionSample};

fn err(e: Error) -> PyErr {
    match e {
        Error::Io(m) => PyRuntimeError::new_err(m),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn json_text(obj: &Bound<'_, PyAny>) -> PyResult<String> {
    if let Ok(s) = obj.cast::<PyString>() {
        return Ok(s.to_string());
    }
    obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()
}

fn from_py<T: DeserializeOwned + Default>(obj: Option<&Bound<'_, PyAny>>) -> PyResult<T> {
    match obj {
        None => Ok(T::default()),
        Some(o) => serde_json::from_str(&json_text(o)?).map_err(|e| PyValueError::new_err(e.to_string())),
    }
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(err)
}

fn sample(y: Vec<f64>, x: Vec<f64>) -> PyResult<RegressionSample> {
    RegressionSample::new(y, x).map_err(err)
}

fn leveled(y: Vec<f64>, x_level: Vec<f64>) -> PyResult<RegressionSample> {
    RegressionSample::with_levels(y, x_level).map_err(err)
}

/// Sign-instrument slope estimate of `y_t` on `x_{t-1}`.
#[pyfunction]
fn cauchy_estimate<'py>(py: Python<'py>, y: Vec<f64>, x_lag: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &estimators::cauchy_estimate(&sample(y, x_lag)?).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (y, x_lag, q, alpha = 0.05, sided = "two"))]
fn t_q_test<'py>(
    py: Python<'py>,
    y: Vec<f64>,
    x_lag: Vec<f64>,
    q: usize,
    alpha: f64,
    sided: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let groups = estimators::group_gammas(&sample(y, x_lag)?, q).map_err(err)?;
    to_py(py, &inference::t_q_test(&groups, alpha, parse(sided)?).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (y, x_lag, alpha = 0.05, sided = "two", raw_y = false))]
fn hybrid_test<'py>(
    py: Python<'py>,
    y: Vec<f64>,
    x_lag: Vec<f64>,
    alpha: f64,
    sided: &str,
    raw_y: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let variance = if raw_y {
        VarianceEstimator::RawY
    } else {
        VarianceEstimator::OlsResidual
    };
    let out = inference::hybrid_test(&sample(y, x_lag)?, alpha, parse::<Sided>(sided)?, variance).map_err(err)?;
    to_py(py, &out)
}

/// `x_level` holds `x_0..x_T`, one more value than `y`.
#[pyfunction]
#[pyo3(signature = (y, x_level, parity = "odd", alpha = 0.05, sided = "right"))]
fn hybrid_test_intercept<'py>(
    py: Python<'py>,
    y: Vec<f64>,
    x_level: Vec<f64>,
    parity: &str,
    alpha: f64,
    sided: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let s = leveled(y, x_level)?;
    let out = inference::hybrid_test_intercept(&s, parse::<Parity>(parity)?, alpha, parse(sided)?).map_err(err)?;
    to_py(py, &out)
}

#[pyfunction]
#[pyo3(signature = (y, x_level, q, parity = "odd", alpha = 0.05, sided = "right"))]
fn grouped_hybrid_test<'py>(
    py: Python<'py>,
    y: Vec<f64>,
    x_level: Vec<f64>,
    q: usize,
    parity: &str,
    alpha: f64,
    sided: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let s = leveled(y, x_level)?;
    let out =
        inference::grouped_hybrid_test(&s, parse::<Parity>(parity)?, q, alpha, parse(sided)?).map_err(err)?;
    to_py(py, &out)
}

/// `columns[k]` is the lagged series of predictor `k`.
#[pyfunction]
#[pyo3(signature = (y, columns, method = "bonferroni", alpha = 0.05, sided = "two"))]
fn joint_test<'py>(
    py: Python<'py>,
    y: Vec<f64>,
    columns: Vec<Vec<f64>>,
    method: &str,
    alpha: f64,
    sided: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let s = RegressionSample::multivariate(y, columns).map_err(err)?;
    let out = match method {
        "bonferroni" => inference::bonferroni_joint(&s, alpha, parse(sided)?),
        "wald" => inference::wald_joint(&s, alpha),
        other => return Err(PyValueError::new_err(format!("unknown joint method `{other}` (bonferroni|wald)"))),
    }
    .map_err(err)?;
    to_py(py, &out)
}

/// Full continuous-time path: increments, levels, regressor and volatility.
#[pyfunction]
#[pyo3(signature = (config = None, seed = 0, stream = 0))]
fn simulate_continuous<'py>(
    py: Python<'py>,
    config: Option<&Bound<'py, PyAny>>,
    seed: u64,
    stream: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg: DgpContinuousConfig = from_py(config)?;
    let path = dgp::simulate_continuous_path(&cfg, &mut RngStream::new(seed, stream)).map_err(err)?;
    to_py(py, &path)
}

/// Returns `{"y": [...], "x_level": [...]}` with `x_level` one longer than `y`.
#[pyfunction]
#[pyo3(signature = (config = None, seed = 0, stream = 0))]
fn simulate_discrete<'py>(
    py: Python<'py>,
    config: Option<&Bound<'py, PyAny>>,
    seed: u64,
    stream: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg: DgpDiscreteConfig = from_py(config)?;
    let s = dgp::simulate_discrete(&cfg, &mut RngStream::new(seed, stream)).map_err(err)?;
    #[derive(Serialize)]
    struct Out<'a> {
        y: &'a [f64],
        x_level: &'a [f64],
    }
    to_py(
        py,
        &Out {
            y: s.y(),
            x_level: s.x_level().unwrap_or(&[]),
        },
    )
}

/// Run a Monte Carlo grid. `experiment` is an experiment file or a run
/// manifest, as a dict or JSON string.
#[pyfunction]
#[pyo3(signature = (experiment, workers = 1))]
fn run_grid<'py>(py: Python<'py>, experiment: &Bound<'py, PyAny>, workers: usize) -> PyResult<Bound<'py, PyAny>> {
    let grid: ExperimentGrid = io::parse_experiment(&json_text(experiment)?).map_err(err)?;
    let table = py.detach(|| experiments::run_grid(&grid, workers)).map_err(err)?;
    to_py(py, &table)
}

#[pyfunction]
#[pyo3(signature = (n_draws = 100_000, n_steps = 1000, threshold = 4.303, seed = 0, workers = 1))]
fn d2_study<'py>(
    py: Python<'py>,
    n_draws: usize,
    n_steps: usize,
    threshold: f64,
    seed: u64,
    workers: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let summary = py
        .detach(|| experiments::d2_study(n_draws, n_steps, threshold, seed, workers))
        .map_err(err)?;
    to_py(py, &summary)
}

#[pymodule]
fn predreg_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", io::TOOL_VERSION)?;
    m.add_function(wrap_pyfunction!(cauchy_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(t_q_test, m)?)?;
    m.add_function(wrap_pyfunction!(hybrid_test, m)?)?;
    m.add_function(wrap_pyfunction!(hybrid_test_intercept, m)?)?;
    m.add_function(wrap_pyfunction!(grouped_hybrid_test, m)?)?;
    m.add_function(wrap_pyfunction!(joint_test, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_continuous, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_discrete, m)?)?;
    m.add_function(wrap_pyfunction!(run_grid, m)?)?;
    m.add_function(wrap_pyfunction!(d2_study, m)?)?;
    Ok(())
}
