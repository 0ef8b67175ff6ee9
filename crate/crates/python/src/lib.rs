//! Python bindings: `import censored_llr`.

use llr::bandwidth::{BandwidthGrid, CvLoss};
use llr::estimators::EstimatorKind;
use llr::evaluation::{BandwidthPlan, EvalGrid, StudyConfig};
use llr::kernels::{Bandwidth, KernelSpec};
use llr::sampling::SimulationConfig;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_error(e: llr::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn kernel(name: &str) -> PyResult<KernelSpec> {
    name.parse().map_err(value_error)
}

fn bandwidth(h: f64) -> PyResult<Bandwidth> {
    Bandwidth::new(h).map_err(value_error)
}

/// Observed right-censored sample of `(x, y, delta)` records.
#[pyclass(frozen, module = "censored_llr")]
pub struct Dataset {
    inner: llr::sampling::Dataset,
}

#[pymethods]
impl Dataset {
    #[new]
    fn new(x: Vec<f64>, y: Vec<f64>, delta: Vec<bool>) -> PyResult<Self> {
        let inner = llr::sampling::Dataset::from_columns(&x, &y, &delta).map_err(value_error)?;
        Ok(Self { inner })
    }

    #[getter]
    fn x(&self) -> Vec<f64> {
        self.inner.xs().collect()
    }

    #[getter]
    fn y(&self) -> Vec<f64> {
        self.inner.records().iter().map(|r| r.y).collect()
    }

    #[getter]
    fn delta(&self) -> Vec<bool> {
        self.inner.records().iter().map(|r| r.delta).collect()
    }

    fn censored_fraction(&self) -> f64 {
        self.inner.censored_fraction()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Dataset(n={}, censored_fraction={})",
            self.inner.len(),
            self.inner.censored_fraction()
        )
    }
}

/// Right-continuous step survival function.
#[pyclass(frozen, module = "censored_llr")]
pub struct StepSurvival {
    inner: llr::survival::StepSurvival,
}

#[pymethods]
impl StepSurvival {
    #[new]
    fn new(jump_times: Vec<f64>, values: Vec<f64>) -> PyResult<Self> {
        let inner =
            llr::survival::StepSurvival::from_steps(jump_times, values).map_err(value_error)?;
        Ok(Self { inner })
    }

    fn evaluate(&self, t: f64) -> f64 {
        self.inner.evaluate(t)
    }

    fn __call__(&self, t: f64) -> f64 {
        self.inner.evaluate(t)
    }

    #[getter]
    fn jump_times(&self) -> Vec<f64> {
        self.inner.jump_times().to_vec()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }
}

/// Synthetic responses with their censoring weights.
#[pyclass(frozen, module = "censored_llr")]
pub struct SyntheticResponses {
    inner: llr::transform::SyntheticResponses,
}

#[pymethods]
impl SyntheticResponses {
    /// Wraps fully observed responses (unit weights).
    #[new]
    fn new(values: Vec<f64>) -> Self {
        Self {
            inner: llr::transform::SyntheticResponses::from_values(values),
        }
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.weights().to_vec()
    }

    #[getter]
    fn degenerate_count(&self) -> usize {
        self.inner.degenerate_count()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

#[pyclass(frozen, module = "censored_llr")]
pub struct FitResult {
    inner: llr::estimators::FitResult,
}

#[pymethods]
impl FitResult {
    #[getter]
    fn eval_points(&self) -> Vec<f64> {
        self.inner.eval_points.clone()
    }

    #[getter]
    fn estimates(&self) -> Vec<f64> {
        self.inner.estimates.clone()
    }

    #[getter]
    fn degenerate(&self) -> Vec<bool> {
        self.inner.degenerate.clone()
    }

    #[getter]
    fn bandwidth(&self) -> f64 {
        self.inner.bandwidth.value()
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind.name()
    }

    fn __repr__(&self) -> String {
        format!(
            "FitResult(kind={}, bandwidth={}, points={}, degenerate={})",
            self.inner.kind,
            self.inner.bandwidth,
            self.inner.eval_points.len(),
            self.inner.degenerate_count()
        )
    }
}

/// Draws `n` records; returns the dataset and the latent responses.
#[pyfunction]
#[pyo3(signature = (n, censor_location, seed, noise_scale = 0.2))]
fn simulate(
    n: usize,
    censor_location: f64,
    seed: u64,
    noise_scale: f64,
) -> PyResult<(Dataset, Vec<f64>)> {
    let sim = llr::sampling::simulate(&SimulationConfig::new(
        n,
        noise_scale,
        censor_location,
        seed,
    ))
    .map_err(value_error)?;
    Ok((Dataset { inner: sim.data }, sim.latent))
}

#[pyfunction]
#[pyo3(signature = (target_cp, noise_scale = 0.2))]
fn calibrate_censor_location(target_cp: f64, noise_scale: f64) -> PyResult<f64> {
    llr::sampling::calibrate_censor_location(target_cp, noise_scale).map_err(value_error)
}

#[pyfunction]
fn km_censoring_survival(data: &Dataset) -> PyResult<StepSurvival> {
    let inner = llr::survival::km_censoring_survival(&data.inner).map_err(value_error)?;
    Ok(StepSurvival { inner })
}

/// Synthetic responses from `survival`, or from the data's own Kaplan–Meier
/// estimate when omitted. `true_censor_location` uses the known `N(c, 1)`
/// censoring survival instead.
#[pyfunction]
#[pyo3(signature = (data, survival = None, true_censor_location = None))]
fn synthetic_responses(
    data: &Dataset,
    survival: Option<&StepSurvival>,
    true_censor_location: Option<f64>,
) -> PyResult<SyntheticResponses> {
    let inner = match (survival, true_censor_location) {
        (Some(_), Some(_)) => {
            return Err(PyValueError::new_err(
                "pass survival or true_censor_location, not both",
            ))
        }
        (Some(s), None) => llr::transform::synthetic_responses(&data.inner, &s.inner),
        (None, Some(c)) => {
            let g = llr::survival::NormalCensoringSurvival::unit(c).map_err(value_error)?;
            llr::transform::synthetic_responses(&data.inner, &g)
        }
        (None, None) => {
            let km = llr::survival::km_censoring_survival(&data.inner).map_err(value_error)?;
            llr::transform::synthetic_responses(&data.inner, &km)
        }
    };
    Ok(SyntheticResponses { inner })
}

type FitFn = fn(
    &llr::sampling::Dataset,
    &llr::transform::SyntheticResponses,
    &[f64],
    Bandwidth,
    KernelSpec,
) -> llr::Result<llr::estimators::FitResult>;

fn run_fit(
    py: Python<'_>,
    f: FitFn,
    data: &Dataset,
    synth: &SyntheticResponses,
    eval_points: Vec<f64>,
    h: f64,
    kernel_name: &str,
) -> PyResult<FitResult> {
    let (h, k) = (bandwidth(h)?, kernel(kernel_name)?);
    let inner = py
        .detach(|| f(&data.inner, &synth.inner, &eval_points, h, k))
        .map_err(value_error)?;
    Ok(FitResult { inner })
}

#[pyfunction]
#[pyo3(signature = (data, synth, eval_points, h, kernel = "gaussian"))]
fn llr_fit(
    py: Python<'_>,
    data: &Dataset,
    synth: &SyntheticResponses,
    eval_points: Vec<f64>,
    h: f64,
    kernel: &str,
) -> PyResult<FitResult> {
    run_fit(
        py,
        llr::estimators::llr_fit,
        data,
        synth,
        eval_points,
        h,
        kernel,
    )
}

/// Literal O(n^2) double-sum local linear fit.
#[pyfunction]
#[pyo3(signature = (data, synth, eval_points, h, kernel = "gaussian"))]
fn llr_fit_direct(
    py: Python<'_>,
    data: &Dataset,
    synth: &SyntheticResponses,
    eval_points: Vec<f64>,
    h: f64,
    kernel: &str,
) -> PyResult<FitResult> {
    run_fit(
        py,
        llr::estimators::llr_fit_direct,
        data,
        synth,
        eval_points,
        h,
        kernel,
    )
}

#[pyfunction]
#[pyo3(signature = (data, synth, eval_points, h, kernel = "gaussian"))]
fn cr_fit(
    py: Python<'_>,
    data: &Dataset,
    synth: &SyntheticResponses,
    eval_points: Vec<f64>,
    h: f64,
    kernel: &str,
) -> PyResult<FitResult> {
    run_fit(
        py,
        llr::estimators::cr_fit,
        data,
        synth,
        eval_points,
        h,
        kernel,
    )
}

fn estimator(name: &str) -> PyResult<EstimatorKind> {
    name.parse().map_err(value_error)
}

fn cv_loss(name: &str) -> PyResult<CvLoss> {
    name.parse().map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (data, synth, h, kernel = "gaussian", estimator = "llr", loss = "ipcw"))]
fn cv_score(
    py: Python<'_>,
    data: &Dataset,
    synth: &SyntheticResponses,
    h: f64,
    kernel: &str,
    estimator: &str,
    loss: &str,
) -> PyResult<f64> {
    let (h, k, kind, loss) = (
        bandwidth(h)?,
        self::kernel(kernel)?,
        self::estimator(estimator)?,
        cv_loss(loss)?,
    );
    py.detach(|| llr::bandwidth::cv_score(&data.inner, &synth.inner, h, k, kind, loss))
        .map_err(value_error)
}

/// Cross-validated bandwidth over `candidates`, or over the default
/// data-driven grid of `grid_count` values when omitted.
#[pyfunction]
#[pyo3(signature = (data, synth, candidates = None, kernel = "gaussian", estimator = "llr", loss = "ipcw", grid_count = 20))]
#[allow(clippy::too_many_arguments)]
fn select_bandwidth(
    py: Python<'_>,
    data: &Dataset,
    synth: &SyntheticResponses,
    candidates: Option<Vec<f64>>,
    kernel: &str,
    estimator: &str,
    loss: &str,
    grid_count: usize,
) -> PyResult<f64> {
    let grid = match candidates {
        Some(c) => BandwidthGrid::new(c),
        None => BandwidthGrid::default_for(&data.inner, grid_count),
    }
    .map_err(value_error)?;
    let (k, kind, loss) = (
        self::kernel(kernel)?,
        self::estimator(estimator)?,
        cv_loss(loss)?,
    );
    py.detach(|| llr::bandwidth::select_bandwidth(&data.inner, &synth.inner, &grid, k, kind, loss))
        .map(Bandwidth::value)
        .map_err(value_error)
}

#[pyfunction]
fn mse(fit: &FitResult, truth: Vec<f64>) -> PyResult<f64> {
    llr::evaluation::mse(&fit.inner, &truth).map_err(value_error)
}

#[pyfunction]
fn sup_error(fit: &FitResult, truth: Vec<f64>) -> PyResult<f64> {
    llr::evaluation::sup_error(&fit.inner, &truth).map_err(value_error)
}

/// Runs a Monte Carlo study. Returns `{"report": [...], "replications": [...]}`
/// with one dict per row.
#[pyfunction]
#[pyo3(signature = (
    sample_sizes,
    censoring_targets,
    replications,
    kernel = "gaussian",
    cv_loss = "ipcw",
    base_seed = 20_240_101,
    noise_scale = 0.2,
    grid_min = -2.0,
    grid_max = 2.0,
    grid_points = 101,
    bandwidths = None,
    grid_count = 20,
))]
#[allow(clippy::too_many_arguments)]
fn run_study<'py>(
    py: Python<'py>,
    sample_sizes: Vec<usize>,
    censoring_targets: Vec<f64>,
    replications: usize,
    kernel: &str,
    cv_loss: &str,
    base_seed: u64,
    noise_scale: f64,
    grid_min: f64,
    grid_max: f64,
    grid_points: usize,
    bandwidths: Option<Vec<f64>>,
    grid_count: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let bandwidth = match bandwidths {
        Some(values) => BandwidthPlan::Fixed(BandwidthGrid::new(values).map_err(value_error)?),
        None => BandwidthPlan::DataDriven { count: grid_count },
    };
    let config = StudyConfig {
        sample_sizes,
        censoring_targets,
        replications,
        kernel: self::kernel(kernel)?,
        grid: EvalGrid::equispaced(grid_min, grid_max, grid_points).map_err(value_error)?,
        bandwidth,
        cv_loss: self::cv_loss(cv_loss)?,
        base_seed,
        noise_scale,
    };
    let out = py
        .detach(|| llr::evaluation::run_study(&config))
        .map_err(value_error)?;

    let report = out
        .report
        .rows
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("censoring_target", r.target_cp)?;
            d.set_item("n", r.n)?;
            d.set_item("estimator", r.estimator.name())?;
            d.set_item("mean_mse", r.mean_mse)?;
            d.set_item("sd_mse", r.sd_mse)?;
            d.set_item("mean_selected_h", r.mean_bandwidth)?;
            d.set_item("mean_observed_cp", r.mean_observed_cp)?;
            d.set_item("degenerate_rate", r.degenerate_rate)?;
            Ok(d)
        })
        .collect::<PyResult<Vec<_>>>()?;
    let records = out
        .replications
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("censoring_target", r.target_cp)?;
            d.set_item("n", r.n)?;
            d.set_item("replication", r.replication)?;
            d.set_item("seed", r.seed)?;
            d.set_item("censor_location", r.censor_location)?;
            d.set_item("observed_cp", r.observed_cp)?;
            d.set_item("estimator", r.estimator.name())?;
            d.set_item("selected_h", r.bandwidth)?;
            d.set_item("mse", r.mse)?;
            d.set_item("sup_error", r.sup_error)?;
            d.set_item("edge_abs_error", r.edge_abs_error)?;
            d.set_item("degenerate_points", r.degenerate_points)?;
            d.set_item("synthetic_degenerate", r.synthetic_degenerate)?;
            Ok(d)
        })
        .collect::<PyResult<Vec<_>>>()?;
    let result = PyDict::new(py);
    result.set_item("report", report)?;
    result.set_item("replications", records)?;
    Ok(result)
}

#[pymodule]
fn censored_llr(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Dataset>()?;
    m.add_class::<StepSurvival>()?;
    m.add_class::<SyntheticResponses>()?;
    m.add_class::<FitResult>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate_censor_location, m)?)?;
    m.add_function(wrap_pyfunction!(km_censoring_survival, m)?)?;
    m.add_function(wrap_pyfunction!(synthetic_responses, m)?)?;
    m.add_function(wrap_pyfunction!(llr_fit, m)?)?;
    m.add_function(wrap_pyfunction!(llr_fit_direct, m)?)?;
    m.add_function(wrap_pyfunction!(cr_fit, m)?)?;
    m.add_function(wrap_pyfunction!(cv_score, m)?)?;
    m.add_function(wrap_pyfunction!(select_bandwidth, m)?)?;
    m.add_function(wrap_pyfunction!(mse, m)?)?;
    m.add_function(wrap_pyfunction!(sup_error, m)?)?;
    m.add_function(wrap_pyfunction!(run_study, m)?)?;
    Ok(())
}
