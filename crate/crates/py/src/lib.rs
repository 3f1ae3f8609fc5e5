//! Python bindings. Reports come back as plain dicts built from the same
//! JSON the Rust types serialize to.

use densenet::montecarlo::{simulate as mc_simulate, SimulationConfig};
use densenet::optimizer;
use densenet::power;
use densenet::rate::{self, RateOptions};
use densenet::scenario::{presets, NetworkScenario as CoreScenario, TierConfig, TrafficProfile};
use pyo3::create_exception;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

create_exception!(densenet_py, InfeasibleError, PyValueError);

fn to_py(e: densenet::Error) -> PyErr {
    match e {
        densenet::Error::Infeasible { .. } => InfeasibleError::new_err(e.to_string()),
        densenet::Error::Numerics(_) => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_dict<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Immutable network description.
#[pyclass(name = "Scenario", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Scenario {
    inner: CoreScenario,
}

#[pymethods]
impl Scenario {
    /// Parse the scenario JSON format used by the CLI.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: CoreScenario::from_json(text).map_err(to_py)?,
        })
    }

    /// Single-tier interference-limited Rayleigh network with α = 4.
    #[staticmethod]
    fn homogeneous(bs_density: f64, ue_density: f64) -> PyResult<Self> {
        Ok(Self {
            inner: CoreScenario::homogeneous(bs_density, ue_density).map_err(to_py)?,
        })
    }

    /// Dense-urban preset with any of the tiers "macro", "micro", "pico",
    /// each starting at 1 BS/km².
    #[staticmethod]
    fn dense_urban(tiers: Vec<String>) -> PyResult<Self> {
        let tiers = tiers
            .iter()
            .map(|t| match t.as_str() {
                "macro" => Ok(presets::macro_tier(1.0)),
                "micro" => Ok(presets::micro_tier(1.0)),
                "pico" => Ok(presets::pico_tier(1.0)),
                other => Err(PyValueError::new_err(format!("unknown preset tier '{other}'"))),
            })
            .collect::<PyResult<Vec<TierConfig>>>()?;
        if tiers.is_empty() {
            return Err(PyValueError::new_err("need at least one tier"));
        }
        Ok(Self {
            inner: presets::dense_urban(tiers),
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn ue_density(&self) -> f64 {
        self.inner.ue_density()
    }

    #[getter]
    fn densities(&self) -> Vec<f64> {
        self.inner.densities()
    }

    #[getter]
    fn tier_names(&self) -> Vec<String> {
        self.inner.tiers().iter().map(|t| t.name.clone()).collect()
    }

    fn with_densities(&self, densities: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.with_densities(&densities).map_err(to_py)?,
        })
    }

    fn with_load(&self, relative_load: f64) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.with_load(relative_load).map_err(to_py)?,
        })
    }

    fn with_ue_density(&self, ue_density: f64) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.with_ue_density(ue_density).map_err(to_py)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario(tiers={:?}, densities={:?}, ue_density={})",
            self.tier_names(),
            self.inner.densities(),
            self.inner.ue_density()
        )
    }
}

/// Average rate in b/s/Hz with per-tier details, as a dict.
#[pyfunction]
#[pyo3(signature = (scenario, full_load = false))]
fn average_rate<'py>(py: Python<'py>, scenario: &Scenario, full_load: bool) -> PyResult<Bound<'py, PyAny>> {
    let opts = if full_load { RateOptions::full_load() } else { RateOptions::default() };
    let r = py.detach(|| rate::average_rate_with(&scenario.inner, &opts)).map_err(to_py)?;
    to_dict(py, &r)
}

/// Single-tier α = 4 Rayleigh rate at activity `phi`.
#[pyfunction]
fn rate_alpha4(phi: f64) -> PyResult<f64> {
    Ok(rate::rate_alpha4_s_form(phi).map_err(to_py)?.0)
}

/// (lower, upper) closed-form rate bounds at activity `phi`.
#[pyfunction]
fn closed_form_rate_bounds(phi: f64) -> PyResult<(f64, f64)> {
    rate::closed_form_rate_bounds(phi).map_err(to_py)
}

/// Minimum-power deployment meeting `r0` b/s/Hz. Raises InfeasibleError
/// when no density reaches it.
#[pyfunction]
fn optimize<'py>(py: Python<'py>, scenario: &Scenario, r0: f64) -> PyResult<Bound<'py, PyAny>> {
    let sol = py
        .detach(|| optimizer::optimize_deployment(&scenario.inner, r0))
        .map_err(to_py)?;
    to_dict(py, &sol)
}

/// Closed-form density bracket for a single Rayleigh tier with α = 4.
#[pyfunction]
#[pyo3(signature = (ue_density, r0, shadow_moment = 1.0))]
fn closed_form_density_bounds<'py>(
    py: Python<'py>,
    ue_density: f64,
    r0: f64,
    shadow_moment: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let b = optimizer::closed_form_density_bounds(ue_density, shadow_moment, r0).map_err(to_py)?;
    to_dict(py, &b)
}

/// Hourly sleep-mode savings. Uses the scenario's profile, else the
/// built-in dense-urban one.
#[pyfunction]
fn daily_savings<'py>(py: Python<'py>, scenario: &Scenario, r0: f64) -> PyResult<Bound<'py, PyAny>> {
    let profile = scenario
        .inner
        .traffic_profile()
        .cloned()
        .unwrap_or_else(TrafficProfile::dense_urban);
    let report = py
        .detach(|| power::daily_savings(&scenario.inner, &profile, r0))
        .map_err(to_py)?;
    to_dict(py, &report)
}

/// Monte-Carlo summary: rate estimate, serving frequencies and activity.
#[pyfunction]
#[pyo3(signature = (scenario, trials, seed = 42, full_load = false))]
fn simulate<'py>(
    py: Python<'py>,
    scenario: &Scenario,
    trials: usize,
    seed: u64,
    full_load: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = SimulationConfig::new(scenario.inner.clone(), trials, seed)
        .map_err(to_py)?
        .with_full_load(full_load);
    let report = py.detach(|| mc_simulate(&cfg)).map_err(to_py)?;
    #[derive(Serialize)]
    struct Summary {
        rate: densenet::montecarlo::RateEstimate,
        serving_frequencies: Vec<f64>,
        activity: Vec<f64>,
        region_radius_km: f64,
        trials: usize,
        seed: u64,
    }
    to_dict(
        py,
        &Summary {
            rate: report.rate,
            serving_frequencies: report.serving_frequencies(),
            activity: report.activity.clone(),
            region_radius_km: cfg.region_radius_km,
            trials,
            seed,
        },
    )
}

#[pymodule]
fn densenet_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Scenario>()?;
    m.add("InfeasibleError", m.py().get_type::<InfeasibleError>())?;
    m.add_function(wrap_pyfunction!(average_rate, m)?)?;
    m.add_function(wrap_pyfunction!(rate_alpha4, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_rate_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(optimize, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_density_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(daily_savings, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    Ok(())
}
