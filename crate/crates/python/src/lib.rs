//! Python bindings: `import wellsqueeze`.

use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use wellsqueeze::control::{self, ELEMENTARY_CHARGE};
use wellsqueeze::diagnostics;
use wellsqueeze::dynamics;
use wellsqueeze::runner::{self, Prepared, ScenarioConfig};
use wellsqueeze::targetgen;
use wellsqueeze::{CouplingMatrix, Error, ModelTag, SpectralVector};

fn py_err(e: Error) -> PyErr {
    if e.is_numerical() {
        PyArithmeticError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

/// Infinite square well with `levels` eigenstates.
#[pyclass(frozen, module = "wellsqueeze")]
struct WellSpec {
    inner: wellsqueeze::WellSpec,
}

#[pymethods]
impl WellSpec {
    #[new]
    #[pyo3(signature = (levels, length = 1.0, mass = 1.0, hbar = 1.0))]
    fn new(levels: usize, length: f64, mass: f64, hbar: f64) -> PyResult<Self> {
        let inner = wellsqueeze::WellSpec::new(length, mass, hbar, levels).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn levels(&self) -> usize {
        self.inner.levels
    }

    #[getter]
    fn length(&self) -> f64 {
        self.inner.length
    }

    fn eigenenergy(&self, j: usize) -> PyResult<f64> {
        self.inner.eigenenergy(j).map_err(py_err)
    }

    fn eigenfunction(&self, j: usize, x: f64) -> PyResult<f64> {
        self.inner.eigenfunction(j, x).map_err(py_err)
    }

    fn transition_frequency(&self, j: usize) -> PyResult<f64> {
        self.inner.transition_frequency(j).map_err(py_err)
    }

    fn revival_period(&self) -> f64 {
        self.inner.revival_period()
    }

    /// Linear-profile coupling matrix `d[k-1][j-1]`.
    fn couplings(&self) -> Vec<Vec<f64>> {
        let d = CouplingMatrix::linear(&self.inner);
        let n = self.inner.levels;
        (1..=n).map(|k| (1..=n).map(|j| d.get(k, j)).collect()).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "WellSpec(levels={}, length={}, mass={}, hbar={})",
            self.inner.levels, self.inner.length, self.inner.mass, self.inner.hbar
        )
    }
}

/// Odd Gaussian-derivative target `B (x−x0) exp(−(x−x0)²/σ²)`.
#[pyclass(frozen, module = "wellsqueeze")]
struct TargetSpec {
    inner: wellsqueeze::TargetSpec,
}

#[pymethods]
impl TargetSpec {
    #[new]
    #[pyo3(signature = (sigma, x0 = None, length = 1.0))]
    fn new(sigma: f64, x0: Option<f64>, length: f64) -> PyResult<Self> {
        let inner = wellsqueeze::TargetSpec::new(sigma, x0.unwrap_or(0.5 * length), length).map_err(py_err)?;
        Ok(Self { inner })
    }

    fn value(&self, x: f64) -> f64 {
        self.inner.value(x)
    }

    /// `[a_1^T, …, a_N^T]` for the given well.
    fn coefficients(&self, well: &WellSpec) -> PyResult<Vec<f64>> {
        let v = targetgen::target_coefficients(&self.inner, &well.inner).map_err(py_err)?;
        Ok(v.amplitudes.iter().map(|c| c.re).collect())
    }

    #[pyo3(signature = (c_const = targetgen::DEFAULT_C_CONST))]
    fn choose_truncation(&self, c_const: f64) -> PyResult<usize> {
        targetgen::choose_truncation(&self.inner, c_const).map_err(py_err)
    }

    fn kinetic_energy(&self, well: &WellSpec) -> PyResult<f64> {
        targetgen::kinetic_energy(&self.inner, &well.inner).map_err(py_err)
    }
}

/// Propagated amplitudes at uniformly spaced sample times.
#[pyclass(frozen, module = "wellsqueeze")]
struct Trajectory {
    inner: wellsqueeze::TrajectoryRecord,
    spec: wellsqueeze::WellSpec,
}

#[pymethods]
impl Trajectory {
    #[getter]
    fn model(&self) -> &'static str {
        self.inner.model.as_str()
    }

    #[getter]
    fn times(&self) -> Vec<f64> {
        self.inner.times.clone()
    }

    /// One list of complex interaction-picture amplitudes per sample.
    #[getter]
    fn amplitudes(&self) -> Vec<Vec<Complex64>> {
        self.inner.states.iter().map(|s| s.amplitudes.clone()).collect()
    }

    fn norms(&self) -> Vec<f64> {
        self.inner.states.iter().map(SpectralVector::norm_sqr).collect()
    }

    /// Position-space width at every sample.
    #[pyo3(signature = (grid = 2048))]
    fn widths(&self, grid: usize) -> PyResult<Vec<f64>> {
        let basis = dynamics::GridBasis::new(&self.spec, grid).map_err(py_err)?;
        self.inner
            .states
            .iter()
            .map(|s| diagnostics::dispersion(&basis.reconstruct(s)?))
            .collect::<wellsqueeze::Result<_>>()
            .map_err(py_err)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Target, truncation and synthesized schedule for one scenario.
#[pyclass(frozen, module = "wellsqueeze")]
struct Scenario {
    config: ScenarioConfig,
    prepared: Prepared,
}

#[pymethods]
impl Scenario {
    /// Parses `key = value` scenario text.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Self::build(ScenarioConfig::parse(text).map_err(py_err)?)
    }

    /// One of `fig1`, `smallsigma`, `reduced-scale`.
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        Self::build(ScenarioConfig::builtin(name).map_err(py_err)?)
    }

    #[getter]
    fn levels(&self) -> usize {
        self.prepared.spec.levels
    }

    #[getter]
    fn horizon(&self) -> f64 {
        self.prepared.schedule.horizon()
    }

    #[getter]
    fn truncated_norm(&self) -> f64 {
        self.prepared.truncated_norm()
    }

    fn coefficients(&self) -> Vec<f64> {
        self.prepared.coefficients.amplitudes.iter().map(|c| c.re).collect()
    }

    /// `(mode, carrier, B_k, V_k)` per scheduled mode.
    fn schedule(&self) -> Vec<(usize, f64, f64, f64)> {
        self.prepared
            .schedule
            .entries()
            .iter()
            .map(|e| (e.mode, e.carrier, e.slope, e.amplitude()))
            .collect()
    }

    /// `(Σ B_k² T, Σ V_k² T)`.
    fn energy(&self) -> (f64, f64) {
        (
            self.prepared.schedule.total_energy(),
            self.prepared.schedule.envelope_energy(),
        )
    }

    #[pyo3(signature = (model, samples = None, tol = None))]
    fn propagate(&self, py: Python<'_>, model: &str, samples: Option<usize>, tol: Option<f64>) -> PyResult<Trajectory> {
        let tag = ModelTag::parse_model(model).map_err(py_err)?;
        let samples = samples.unwrap_or(self.config.samples);
        let tol = tol.unwrap_or(self.config.tol);
        let inner = py
            .detach(|| self.prepared.propagate(tag, samples, tol))
            .map_err(py_err)?;
        Ok(Trajectory {
            inner,
            spec: self.prepared.spec,
        })
    }

    /// Runs the scenario, writes its outputs to `output_dir` and returns the
    /// summary as JSON text.
    fn run(&self, py: Python<'_>, output_dir: &str) -> PyResult<String> {
        let mut cfg = self.config.clone();
        cfg.output_dir = output_dir.into();
        py.detach(|| runner::run_scenario(&cfg)).map_err(py_err)?;
        std::fs::read_to_string(cfg.output_dir.join("summary.json")).map_err(|e| PyValueError::new_err(e.to_string()))
    }
}

impl Scenario {
    fn build(config: ScenarioConfig) -> PyResult<Self> {
        let prepared = Prepared::new(&config).map_err(py_err)?;
        Ok(Self { config, prepared })
    }
}

/// Maximum amplitude deviation between two trajectories.
#[pyfunction]
fn max_deviation(a: &Trajectory, b: &Trajectory) -> PyResult<f64> {
    let all = diagnostics::TimeWindow {
        start: 0.0,
        end: f64::INFINITY,
    };
    Ok(diagnostics::compare_models(&a.inner, &b.inner, all)
        .map_err(py_err)?
        .max_deviation)
}

/// SI duration in seconds of the mode-`mode` transfer for a centred target of
/// width `sigma_ratio · L`. `charge` defaults to the elementary charge.
#[pyfunction]
#[pyo3(signature = (field, length, sigma_ratio, mode, charge = ELEMENTARY_CHARGE))]
fn si_estimate(field: f64, length: f64, sigma_ratio: f64, mode: usize, charge: f64) -> PyResult<f64> {
    let spec = wellsqueeze::WellSpec::internal(mode.max(2)).map_err(py_err)?;
    let target = wellsqueeze::TargetSpec::centered(sigma_ratio, &spec).map_err(py_err)?;
    let coeffs = targetgen::target_coefficients(&target, &spec).map_err(py_err)?;
    let d = CouplingMatrix::linear(&spec);
    control::estimate_si_duration(field, charge, length, &coeffs, &d, mode).map_err(py_err)
}

#[pymodule]
#[pyo3(name = "wellsqueeze")]
pub fn wellsqueeze_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<WellSpec>()?;
    m.add_class::<TargetSpec>()?;
    m.add_class::<Scenario>()?;
    m.add_class::<Trajectory>()?;
    m.add_function(wrap_pyfunction!(max_deviation, m)?)?;
    m.add_function(wrap_pyfunction!(si_estimate, m)?)?;
    Ok(())
}
