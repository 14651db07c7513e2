//! Scenario orchestration: build the target and schedule, run the requested
//! models, compute observables and persist everything under one directory.

mod config;
mod output;

pub use config::{Horizon, ScenarioConfig, Truncation, FIG1, OUTPUT_DIR_ENV, REDUCED_SCALE, SMALL_SIGMA};
pub use output::{emit_density_map, write_timeseries_csv, DensityMapFiles};

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::control::{self, AdiabaticityReport, ControlEntry, ControlSchedule, ModeResidual};
use crate::diagnostics::{self, ValidityWindow, DEFAULT_RIPPLE};
use crate::dynamics::{self, GridBasis, IntegratorMeta, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::state::{ModelTag, SpectralVector};
use crate::targetgen::{self, TargetSpec};
use crate::welltrap::{CouplingMatrix, Profile, ResonanceTable, WellSpec};

/// Everything a run needs before propagation.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub spec: WellSpec,
    pub target: TargetSpec,
    pub coefficients: SpectralVector,
    pub couplings: CouplingMatrix,
    pub schedule: ControlSchedule,
}

impl Prepared {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self> {
        let target = TargetSpec::new(cfg.sigma, cfg.x0, cfg.length)?;
        let levels = match cfg.truncation {
            Truncation::Levels(n) => n,
            Truncation::Residual(c) => targetgen::choose_truncation(&target, c)?,
        };
        let spec = WellSpec::new(cfg.length, cfg.mass, cfg.hbar, levels)?;
        let coefficients = targetgen::target_coefficients(&target, &spec)?;
        let couplings = CouplingMatrix::build(&spec, Profile::parse(&cfg.profile)?)?;
        let horizon = match cfg.horizon {
            Horizon::Time(t) => t,
            Horizon::Revivals(n) => n * spec.revival_period(),
            Horizon::Energy(e) => control::duration_from_energy(&coefficients, &couplings, e)?,
        };
        let schedule = control::synthesize(&coefficients, &couplings, horizon)?;
        Ok(Self {
            spec,
            target,
            coefficients,
            couplings,
            schedule,
        })
    }

    /// `s = (Σ_{k≥2} |a_k^T|²)^{1/2}`.
    pub fn truncated_norm(&self) -> f64 {
        self.coefficients.excited_population().sqrt()
    }

    pub fn propagate(&self, model: ModelTag, samples: usize, tol: f64) -> Result<TrajectoryRecord> {
        let psi0 = SpectralVector::ground(self.spec.levels);
        match model {
            ModelTag::Full => dynamics::propagate_full(&self.schedule, &self.couplings, &psi0, tol, samples),
            ModelTag::Rwa => {
                let table = ResonanceTable::build_by_factoring(&self.spec);
                dynamics::propagate_rwa(&self.schedule, &self.couplings, &table, &psi0, samples)
            }
            ModelTag::Reduced => dynamics::propagate_reduced(&self.schedule, &self.couplings, &psi0, samples),
            ModelTag::Analytic => dynamics::propagate_analytic(&self.schedule, &self.couplings, samples),
            other => Err(Error::InvalidInput(format!("`{other}` is not a propagation model"))),
        }
    }

    /// Runs several models on separate threads; results keep the input order.
    pub fn propagate_all(&self, models: &[ModelTag], samples: usize, tol: f64) -> Result<Vec<TrajectoryRecord>> {
        std::thread::scope(|scope| {
            let handles: Vec<_> = models
                .iter()
                .map(|&m| scope.spawn(move || self.propagate(m, samples, tol)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("propagation thread panicked"))
                .collect()
        })
    }

    pub fn validity_window(&self) -> Result<ValidityWindow> {
        diagnostics::validity_window(self.target.sigma(), self.spec.length, self.schedule.horizon())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelReport {
    pub model: ModelTag,
    pub times: Vec<f64>,
    pub widths: Vec<f64>,
    pub peak_densities: Vec<f64>,
    pub norms: Vec<f64>,
    pub ground_populations: Vec<f64>,
    pub excited_populations: Vec<f64>,
    /// Overlap of `Ψ(x, T)` with the target packet.
    pub final_fidelity: f64,
    /// Same overlap on interaction-picture amplitudes.
    pub interaction_fidelity: f64,
    pub width_violations: Vec<usize>,
    pub peak_violations: Vec<usize>,
    pub max_norm_drift: f64,
    pub integrator: IntegratorMeta,
}

impl ModelReport {
    pub fn build(traj: &TrajectoryRecord, prepared: &Prepared, basis: &GridBasis, ripple: f64) -> Result<Self> {
        let mut widths = Vec::with_capacity(traj.len());
        let mut peaks = Vec::with_capacity(traj.len());
        for state in &traj.states {
            let psi = basis.reconstruct(state)?;
            widths.push(diagnostics::dispersion(&psi)?);
            peaks.push(psi.peak_density());
        }
        let last = traj.last();
        Ok(Self {
            model: traj.model,
            times: traj.times.clone(),
            width_violations: diagnostics::monotonicity_report(&widths, ripple),
            peak_violations: diagnostics::growth_violations(&peaks, ripple),
            widths,
            peak_densities: peaks,
            norms: traj.states.iter().map(SpectralVector::norm_sqr).collect(),
            ground_populations: traj.states.iter().map(SpectralVector::ground_population).collect(),
            excited_populations: traj.states.iter().map(SpectralVector::excited_population).collect(),
            final_fidelity: diagnostics::fidelity_at(last, &prepared.coefficients, &prepared.spec)?,
            interaction_fidelity: diagnostics::fidelity(last, &prepared.coefficients)?,
            max_norm_drift: traj.max_norm_drift(),
            integrator: traj.meta,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyAccounting {
    /// `Σ_k B_k² T`, the measure used to fix `T`.
    pub slope_energy: f64,
    /// `Σ_k ∫ V_k² dt = 4 Σ_k B_k² T`.
    pub envelope_energy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairDeviation {
    pub first: ModelTag,
    pub second: ModelTag,
    /// Over the validity window.
    pub max_deviation: f64,
    pub time_of_max: f64,
    /// Over the whole horizon.
    pub max_deviation_full: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub levels: usize,
    pub horizon: f64,
    pub truncated_norm: f64,
    pub truncation_residual: f64,
    pub schedule: Vec<ControlEntry>,
    pub boundary_residuals: Vec<ModeResidual>,
    pub energy: EnergyAccounting,
    pub validity_window: ValidityWindow,
    pub adiabaticity: AdiabaticityReport,
    pub models: Vec<ModelReport>,
    pub deviations: Vec<PairDeviation>,
}

impl ScenarioReport {
    pub fn model(&self, tag: ModelTag) -> Option<&ModelReport> {
        self.models.iter().find(|m| m.model == tag)
    }
}

pub fn build_report(
    cfg: &ScenarioConfig,
    prepared: &Prepared,
    trajectories: &[TrajectoryRecord],
) -> Result<ScenarioReport> {
    let basis = GridBasis::new(&prepared.spec, cfg.grid)?;
    let models = trajectories
        .iter()
        .map(|t| ModelReport::build(t, prepared, &basis, DEFAULT_RIPPLE))
        .collect::<Result<Vec<_>>>()?;
    let validity = prepared.validity_window()?;
    let whole = diagnostics::TimeWindow {
        start: 0.0,
        end: f64::INFINITY,
    };
    let mut deviations = Vec::new();
    for (i, a) in trajectories.iter().enumerate() {
        for b in &trajectories[i + 1..] {
            let inside = diagnostics::compare_models(a, b, validity.window)?;
            let all = diagnostics::compare_models(a, b, whole)?;
            deviations.push(PairDeviation {
                first: a.model,
                second: b.model,
                max_deviation: inside.max_deviation,
                time_of_max: inside.time_of_max,
                max_deviation_full: all.max_deviation,
            });
        }
    }
    let schedule = &prepared.schedule;
    Ok(ScenarioReport {
        scenario: cfg.name.clone(),
        levels: prepared.spec.levels,
        horizon: schedule.horizon(),
        truncated_norm: prepared.truncated_norm(),
        truncation_residual: (1.0 - prepared.coefficients.norm_sqr()).max(0.0),
        schedule: schedule.entries().to_vec(),
        boundary_residuals: control::check_boundary_condition(schedule, &prepared.coefficients, &prepared.couplings)?,
        energy: EnergyAccounting {
            slope_energy: schedule.total_energy(),
            envelope_energy: schedule.envelope_energy(),
        },
        validity_window: validity,
        adiabaticity: control::adiabaticity_check(schedule, cfg.samples),
        models,
        deviations,
    })
}

#[derive(Serialize)]
struct Summary<'a> {
    config: BTreeMap<String, String>,
    report: &'a ScenarioReport,
}

/// Runs the scenario and writes `summary.json`, `<model>_timeseries.csv`,
/// `<model>_density.txt` and `<model>_density.png` into the output directory.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    let prepared = Prepared::new(cfg)?;
    let trajectories = prepared.propagate_all(&cfg.models, cfg.samples, cfg.tol)?;
    let report = build_report(cfg, &prepared, &trajectories)?;

    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (traj, model) in trajectories.iter().zip(&report.models) {
        write_timeseries_csv(model, &dir.join(format!("{}_timeseries.csv", traj.model)))?;
        emit_density_map(
            traj,
            &prepared.spec,
            cfg.grid,
            &dir.join(format!("{}_density", traj.model)),
        )?;
    }
    write_summary(cfg, &report, &dir.join("summary.json"))?;
    Ok(report)
}

pub fn write_summary(cfg: &ScenarioConfig, report: &ScenarioReport, path: &Path) -> Result<()> {
    let summary = Summary {
        config: cfg.to_map(),
        report,
    };
    let mut text = serde_json::to_string_pretty(&summary)
        .map_err(|e| Error::InvalidInput(format!("cannot serialise summary: {e}")))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Rebuilds the config recorded in a `summary.json`.
pub fn config_from_summary(path: &Path) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::config("summary", format!("invalid JSON: {e}")))?;
    let config = value
        .get("config")
        .and_then(|c| c.as_object())
        .ok_or_else(|| Error::config("config", "summary has no config block"))?;
    let mut map = BTreeMap::new();
    for (k, v) in config {
        let v = v
            .as_str()
            .ok_or_else(|| Error::config(k.as_str(), "expected a string value"))?;
        map.insert(k.clone(), v.to_string());
    }
    ScenarioConfig::from_map(&map)
}
