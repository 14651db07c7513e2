//! Closed-form optimal control synthesis and the quantities derived from it.
//!
//! Under the reduced, adiabatic model each excited level `k` is driven by its
//! own resonant carrier `ω_1k` with a constant envelope `V_k = 2 B_k`, where
//! `B_k = ħ π a_k^T / (2 d_k1 T)`. The envelope is switched on at `t = 0` and
//! off at `t = T`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::SpectralVector;
use crate::welltrap::{CouplingMatrix, Profile, WellSpec};

/// Reduced Planck constant, J·s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Target amplitudes at or below this magnitude are not driven.
pub const TARGET_ZERO_TOL: f64 = 1e-14;
/// Largest target amplitude tolerated on a mode with zero ground coupling.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Below this rotation angle `sin(R)/R` is taken from its Taylor series.
pub const SINC_SERIES_BELOW: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ControlEntry {
    /// Excited level `k` addressed by this carrier.
    pub mode: usize,
    /// `B_k`; the integrated envelope is `θ_k(t) = B_k t`.
    pub slope: f64,
    /// `ω_1k`.
    pub carrier: f64,
    /// `d_k1`.
    pub coupling: f64,
}

impl ControlEntry {
    /// `V_k = 2 B_k`.
    pub fn amplitude(&self) -> f64 {
        2.0 * self.slope
    }
}

#[derive(Debug, Clone)]
pub struct ControlSchedule {
    horizon: f64,
    entries: Vec<ControlEntry>,
    profile: Profile,
    spec: WellSpec,
}

impl ControlSchedule {
    /// Builds a schedule from explicit slopes, e.g. for randomised checks.
    pub fn from_slopes(couplings: &CouplingMatrix, horizon: f64, slopes: &[(usize, f64)]) -> Result<Self> {
        check_horizon(horizon)?;
        let spec = *couplings.spec();
        let mut entries = Vec::with_capacity(slopes.len());
        for &(mode, slope) in slopes {
            if mode < 2 || mode > spec.levels {
                return Err(Error::InvalidMode(mode));
            }
            if !slope.is_finite() {
                return Err(Error::InvalidInput(format!("slope for mode {mode} is not finite")));
            }
            if couplings.is_zero(mode, 1) {
                return Err(Error::InvalidMode(mode));
            }
            entries.push(ControlEntry {
                mode,
                slope,
                carrier: spec.transition_frequency(mode)?,
                coupling: couplings.ground(mode),
            });
        }
        entries.sort_by_key(|e| e.mode);
        if entries.windows(2).any(|w| w[0].mode == w[1].mode) {
            return Err(Error::InvalidInput("duplicate mode in schedule".into()));
        }
        Ok(Self {
            horizon,
            entries,
            profile: couplings.profile().clone(),
            spec,
        })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn entries(&self) -> &[ControlEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn spec(&self) -> &WellSpec {
        &self.spec
    }

    pub fn slope(&self, mode: usize) -> f64 {
        self.entries.iter().find(|e| e.mode == mode).map_or(0.0, |e| e.slope)
    }

    /// `V_k(t)`: constant on `[0, T]`, zero outside.
    pub fn envelope(&self, mode: usize, t: f64) -> f64 {
        if (0.0..=self.horizon).contains(&t) {
            2.0 * self.slope(mode)
        } else {
            0.0
        }
    }

    /// `θ_k(t) = B_k t`, frozen outside `[0, T]`.
    pub fn theta(&self, mode: usize, t: f64) -> f64 {
        self.slope(mode) * t.clamp(0.0, self.horizon)
    }

    /// `R(t) = (Σ θ_k² d_k1²)^{1/2}`.
    pub fn rotation_angle(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.horizon);
        self.entries
            .iter()
            .map(|e| (e.slope * e.coupling * t).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Same schedule with every slope multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for e in &mut out.entries {
            e.slope *= factor;
        }
        out
    }

    /// Same slopes over a different horizon.
    pub fn with_horizon(&self, horizon: f64) -> Result<Self> {
        check_horizon(horizon)?;
        let mut out = self.clone();
        out.horizon = horizon;
        Ok(out)
    }

    /// `U_c(x, t) = U_in(x) Σ_k V_k cos(ω_1k t)`; zero outside `[0, T]`.
    pub fn field_value(&self, x: f64, t: f64) -> f64 {
        self.profile.eval(x) * self.carrier_sum(t)
    }

    /// `Σ_k V_k cos(ω_1k t)` on `[0, T]`.
    pub fn carrier_sum(&self, t: f64) -> f64 {
        if !(0.0..=self.horizon).contains(&t) {
            return 0.0;
        }
        self.entries.iter().map(|e| e.amplitude() * (e.carrier * t).cos()).sum()
    }

    /// `Σ_k B_k² T`, the energy measure used to fix the horizon.
    pub fn total_energy(&self) -> f64 {
        self.entries.iter().map(|e| e.slope * e.slope).sum::<f64>() * self.horizon
    }

    /// `Σ_k ∫ V_k² dt = 4 Σ_k B_k² T`.
    pub fn envelope_energy(&self) -> f64 {
        4.0 * self.total_energy()
    }
}

fn check_horizon(horizon: f64) -> Result<()> {
    if horizon.is_finite() && horizon > 0.0 {
        Ok(())
    } else {
        Err(Error::NonpositiveHorizon(horizon))
    }
}

/// `(k, ħ π a_k^T / (2 d_k1))` for every drivable mode; `B_k` is this over `T`.
fn drive_weights(target: &SpectralVector, couplings: &CouplingMatrix) -> Result<Vec<(usize, f64)>> {
    if target.levels() != couplings.levels() {
        return Err(Error::DimensionMismatch {
            left: target.levels(),
            right: couplings.levels(),
        });
    }
    let hbar = couplings.spec().hbar;
    let mut out = Vec::new();
    for k in 2..=target.levels() {
        let a = target.get(k);
        if a.im.abs() > TARGET_ZERO_TOL {
            return Err(Error::InvalidInput(format!(
                "target amplitude for level {k} must be real, got {a}"
            )));
        }
        let a = a.re;
        if couplings.is_zero(k, 1) {
            if a.abs() >= SYMMETRY_TOL {
                return Err(Error::SymmetryViolation { mode: k, amplitude: a });
            }
            continue;
        }
        if a.abs() > TARGET_ZERO_TOL {
            out.push((k, hbar * PI * a / (2.0 * couplings.ground(k))));
        }
    }
    Ok(out)
}

/// Optimal constant-envelope schedule reaching `target` at `horizon`.
pub fn synthesize(target: &SpectralVector, couplings: &CouplingMatrix, horizon: f64) -> Result<ControlSchedule> {
    check_horizon(horizon)?;
    let slopes: Vec<(usize, f64)> = drive_weights(target, couplings)?
        .into_iter()
        .map(|(k, w)| (k, w / horizon))
        .collect();
    ControlSchedule::from_slopes(couplings, horizon, &slopes)
}

/// Horizon at which the synthesised schedule has `Σ B_k² T = e_tot`.
///
/// `B_k ∝ 1/T`, so `T = Σ_k (ħ π a_k^T / (2 d_k1))² / e_tot`.
pub fn duration_from_energy(target: &SpectralVector, couplings: &CouplingMatrix, e_tot: f64) -> Result<f64> {
    if !(e_tot.is_finite() && e_tot > 0.0) {
        return Err(Error::ZeroEnergy(e_tot));
    }
    let weights = drive_weights(target, couplings)?;
    if weights.is_empty() {
        return Err(Error::EmptyTarget);
    }
    Ok(weights.iter().map(|(_, w)| w * w).sum::<f64>() / e_tot)
}

/// `sin(R/ħ)/R`, with the series branch near `R = 0`.
pub fn sin_over(r: f64, hbar: f64) -> f64 {
    let phi = r / hbar;
    if phi.abs() < SINC_SERIES_BELOW {
        (1.0 - phi * phi / 6.0) / hbar
    } else {
        phi.sin() / r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeResidual {
    pub mode: usize,
    pub residual: f64,
}

/// Per-mode `|d_j1 B_j T sin(R(T)/ħ)/R(T) − a_j^T|` for each scheduled mode.
pub fn check_boundary_condition(
    schedule: &ControlSchedule,
    target: &SpectralVector,
    couplings: &CouplingMatrix,
) -> Result<Vec<ModeResidual>> {
    if target.levels() != couplings.levels() {
        return Err(Error::DimensionMismatch {
            left: target.levels(),
            right: couplings.levels(),
        });
    }
    let t = schedule.horizon();
    let r = schedule.rotation_angle(t);
    let s = sin_over(r, couplings.spec().hbar);
    schedule
        .entries()
        .iter()
        .map(|e| {
            if e.mode > target.levels() {
                return Err(Error::InvalidMode(e.mode));
            }
            let reached = couplings.ground(e.mode) * e.slope * t * s;
            Ok(ModeResidual {
                mode: e.mode,
                residual: (reached - target.get(e.mode).re).abs(),
            })
        })
        .collect()
}

/// `Σ_j |a_j(T) − a_j^T|² + λ Σ_k V_k² T`.
pub fn cost_functional(
    final_state: &SpectralVector,
    target: &SpectralVector,
    schedule: &ControlSchedule,
    penalty: f64,
) -> Result<f64> {
    final_state.check_same_levels(target)?;
    let mismatch: f64 = final_state
        .amplitudes
        .iter()
        .zip(&target.amplitudes)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum();
    Ok(mismatch + penalty * schedule.envelope_energy())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdiabaticityReport {
    /// Largest `|dV_k/dt|` seen by finite differences strictly inside `(0, T)`.
    pub max_envelope_rate: f64,
    pub envelope_criterion_satisfied: bool,
    /// Constant envelopes satisfy the criterion identically.
    pub satisfied_by_construction: bool,
    /// `max_k |V_k d_k1| / (ħ · smallest gap between distinct carriers)`.
    pub rwa_ratio: f64,
    pub weak_coupling: bool,
}

pub const WEAK_COUPLING_RATIO: f64 = 0.1;

/// With a single carrier the gap is taken to the zero frequency, i.e. `ω_1k`.
pub fn adiabaticity_check(schedule: &ControlSchedule, samples: usize) -> AdiabaticityReport {
    let t = schedule.horizon();
    let samples = samples.max(3);
    let dt = t / samples as f64;
    let mut max_rate: f64 = 0.0;
    for e in schedule.entries() {
        for i in 1..samples - 1 {
            let ti = i as f64 * dt;
            let rate = (schedule.envelope(e.mode, ti + dt) - schedule.envelope(e.mode, ti)) / dt;
            max_rate = max_rate.max(rate.abs());
        }
    }
    let drive = schedule
        .entries()
        .iter()
        .map(|e| (e.amplitude() * e.coupling).abs())
        .fold(0.0, f64::max);
    let mut carriers: Vec<f64> = schedule.entries().iter().map(|e| e.carrier).collect();
    carriers.sort_by(f64::total_cmp);
    let gap = if carriers.len() >= 2 {
        carriers.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    } else {
        carriers.first().copied().unwrap_or(f64::INFINITY)
    };
    let rwa_ratio = drive / (schedule.spec().hbar * gap);
    let satisfied_by_construction = max_rate == 0.0;
    AdiabaticityReport {
        max_envelope_rate: max_rate,
        envelope_criterion_satisfied: satisfied_by_construction,
        satisfied_by_construction,
        rwa_ratio,
        weak_coupling: rwa_ratio < WEAK_COUPLING_RATIO,
    }
}

/// SI duration `T = π ħ |a_k^T| / (q E |d_k1|)` with the mode-`k` envelope
/// saturating the force amplitude `q E`.
///
/// `couplings` may be in any length unit; they are rescaled to `length_m`.
pub fn estimate_si_duration(
    field_amplitude: f64,
    charge: f64,
    length_m: f64,
    target: &SpectralVector,
    couplings: &CouplingMatrix,
    mode: usize,
) -> Result<f64> {
    for (name, v) in [("field", field_amplitude), ("charge", charge), ("length", length_m)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
        }
    }
    if mode < 2 || mode > couplings.levels() || mode > target.levels() {
        return Err(Error::InvalidMode(mode));
    }
    let a = target.get(mode).norm();
    if couplings.is_zero(mode, 1) || a <= TARGET_ZERO_TOL {
        return Err(Error::InvalidMode(mode));
    }
    let d_si = couplings.ground(mode).abs() * length_m / couplings.spec().length;
    Ok(PI * HBAR_SI * a / (charge * field_amplitude * d_si))
}
