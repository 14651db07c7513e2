//! Propagation of the spectral amplitudes under four models of decreasing
//! fidelity, plus reconstruction of the position-space wavefunction.
//!
//! All propagated amplitudes live in the interaction picture: the free phases
//! `e^{-iE_j t/ħ}` are factored out and only reinstated by
//! [`reconstruct_wavefunction`].

mod closed;
mod full;
pub mod ode;
mod wavefunction;

pub use closed::{
    analytic_amplitudes, magnus_first_order, propagate_analytic, propagate_reduced, propagate_rwa, reduced_generator,
    rwa_generator,
};
pub use full::{propagate_full, FullModel};
pub(crate) use wavefunction::trapezoid as wavefunction_trapezoid;
pub use wavefunction::{reconstruct_wavefunction, GridBasis, GridWavefunction, MIN_GRID};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::{ModelTag, SpectralVector};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct IntegratorMeta {
    pub steps: usize,
    pub rejected_steps: usize,
    pub evaluations: usize,
    /// `None` for the matrix-exponential models.
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub model: ModelTag,
    pub times: Vec<f64>,
    pub states: Vec<SpectralVector>,
    pub meta: IntegratorMeta,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &SpectralVector {
        self.states.last().expect("trajectory is never empty")
    }

    /// Largest `|Σ|a_j|² − 1|` over the samples.
    pub fn max_norm_drift(&self) -> f64 {
        self.states
            .iter()
            .map(|s| (s.norm_sqr() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }
}

/// `samples` uniformly spaced times from 0 to `horizon` inclusive.
pub fn sample_times(horizon: f64, samples: usize) -> Result<Vec<f64>> {
    if samples < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 samples, got {samples}")));
    }
    let last = (samples - 1) as f64;
    let mut times: Vec<f64> = (0..samples).map(|i| horizon * i as f64 / last).collect();
    times[samples - 1] = horizon;
    Ok(times)
}

pub(crate) fn check_initial(psi0: &SpectralVector, levels: usize) -> Result<()> {
    if psi0.levels() != levels {
        return Err(Error::DimensionMismatch {
            left: psi0.levels(),
            right: levels,
        });
    }
    let norm = psi0.norm_sqr();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "initial state must be normalised, norm² = {norm}"
        )));
    }
    Ok(())
}

/// Accepted integrator tolerances for the full model.
pub fn full_tolerance_range() -> std::ops::RangeInclusive<f64> {
    full::MIN_TOL..=full::MAX_TOL
}
