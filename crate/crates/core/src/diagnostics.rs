//! Observables and cross-checks on trajectories: width, fidelity,
//! model deviation, monotonicity and the validity window.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::{GridWavefunction, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::state::SpectralVector;
use crate::welltrap::WellSpec;

/// Allowed deviation of the grid norm from 1 in [`dispersion`].
pub const NORM_TOL: f64 = 1e-6;
/// Default relative ripple tolerated between consecutive samples.
pub const DEFAULT_RIPPLE: f64 = 0.02;

/// `σ = (⟨x²⟩ − ⟨x⟩²)^{1/2}` by the trapezoidal rule on the grid.
pub fn dispersion(psi: &GridWavefunction) -> Result<f64> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::Normalization(norm));
    }
    Ok(moments(psi).2)
}

/// `(⟨x⟩, ⟨x²⟩, σ)` normalised by the grid norm.
pub fn moments(psi: &GridWavefunction) -> (f64, f64, f64) {
    let density = psi.density();
    let h = psi.spacing();
    let norm = crate::dynamics::wavefunction_trapezoid(&density, h);
    let first: Vec<f64> = density.iter().zip(&psi.positions).map(|(d, x)| d * x).collect();
    let second: Vec<f64> = first.iter().zip(&psi.positions).map(|(d, x)| d * x).collect();
    let mean = crate::dynamics::wavefunction_trapezoid(&first, h) / norm;
    let sq = crate::dynamics::wavefunction_trapezoid(&second, h) / norm;
    (mean, sq, (sq - mean * mean).max(0.0).sqrt())
}

/// `|Σ_j a_j* b_j|²` on the stored amplitudes.
pub fn fidelity(a: &SpectralVector, b: &SpectralVector) -> Result<f64> {
    a.check_same_levels(b)?;
    let overlap: Complex64 = a.amplitudes.iter().zip(&b.amplitudes).map(|(x, y)| x.conj() * y).sum();
    Ok(overlap.norm_sqr())
}

/// Fidelity after restoring each vector's free phases at its own time stamp,
/// i.e. the overlap of the two position-space wavefunctions.
pub fn fidelity_at(a: &SpectralVector, b: &SpectralVector, spec: &WellSpec) -> Result<f64> {
    a.check_same_levels(b)?;
    let overlap: Complex64 = a
        .with_phases(spec)
        .iter()
        .zip(b.with_phases(spec))
        .map(|(x, y)| x.conj() * y)
        .sum();
    Ok(overlap.norm_sqr())
}

/// Half-open time interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeWindow {
    pub start: f64,
    pub end: f64,
}

impl TimeWindow {
    pub fn contains(&self, t: f64) -> bool {
        t >= self.start && t < self.end
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidityWindow {
    pub window: TimeWindow,
    /// The formula gave a non-positive end; the window is empty.
    pub degenerate: bool,
}

/// `[0, T − 2T√(σ/L)/π)`, over which ground-state dominance holds.
pub fn validity_window(sigma: f64, length: f64, horizon: f64) -> Result<ValidityWindow> {
    if !(sigma > 0.0 && length > 0.0 && horizon > 0.0) {
        return Err(Error::InvalidInput(format!(
            "validity window needs positive sigma, L and T (got {sigma}, {length}, {horizon})"
        )));
    }
    let end = horizon * (1.0 - 2.0 * (sigma / length).sqrt() / PI);
    Ok(ValidityWindow {
        window: TimeWindow {
            start: 0.0,
            end: end.max(0.0),
        },
        degenerate: end <= 0.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationReport {
    /// Largest `|a_j^{(1)}(t) − a_j^{(2)}(t)|` over levels and in-window samples.
    pub max_deviation: f64,
    pub time_of_max: f64,
    /// `(t, max_j |Δa_j(t)|)` for each in-window sample.
    pub per_time: Vec<(f64, f64)>,
}

pub fn compare_models(a: &TrajectoryRecord, b: &TrajectoryRecord, window: TimeWindow) -> Result<DeviationReport> {
    if a.len() != b.len() {
        return Err(Error::Sampling(format!("{} vs {} samples", a.len(), b.len())));
    }
    let mut per_time = Vec::new();
    let (mut max_deviation, mut time_of_max) = (0.0, 0.0);
    for ((ta, sa), (tb, sb)) in a.times.iter().zip(&a.states).zip(b.times.iter().zip(&b.states)) {
        if (ta - tb).abs() > 1e-12 * ta.abs().max(tb.abs()).max(1.0) {
            return Err(Error::Sampling(format!("sample times differ: {ta} vs {tb}")));
        }
        sa.check_same_levels(sb)?;
        if !window.contains(*ta) {
            continue;
        }
        let dev = sa
            .amplitudes
            .iter()
            .zip(&sb.amplitudes)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        if dev > max_deviation {
            max_deviation = dev;
            time_of_max = *ta;
        }
        per_time.push((*ta, dev));
    }
    Ok(DeviationReport {
        max_deviation,
        time_of_max,
        per_time,
    })
}

/// Indices `i` where `series[i+1] > series[i] (1 + ripple)`: places where a
/// width that should shrink grows by more than the ripple band.
pub fn monotonicity_report(series: &[f64], ripple: f64) -> Vec<usize> {
    series
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] > w[0] * (1.0 + ripple))
        .map(|(i, _)| i)
        .collect()
}

/// Indices `i` where `series[i+1] < series[i] (1 − ripple)`, for quantities
/// that should grow (e.g. the peak density).
pub fn growth_violations(series: &[f64], ripple: f64) -> Vec<usize> {
    series
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] < w[0] * (1.0 - ripple))
        .map(|(i, _)| i)
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn power_law_exponent(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidInput(
            "power-law fit needs at least two matching points".into(),
        ));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(cov / var)
}
