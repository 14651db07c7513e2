//! Carrier-resolved basis equations
//! `iħ ȧ_j = f(t) Σ_k e^{i(E_j − E_k)t/ħ} d_kj a_k`, `f(t) = Σ_p V_p cos(ω_1p t)`.

use num_complex::Complex64;

use super::ode::{self, StepControl};
use super::{check_initial, sample_times, IntegratorMeta, TrajectoryRecord};
use crate::control::ControlSchedule;
use crate::error::{Error, Result};
use crate::state::{ModelTag, SpectralVector};
use crate::welltrap::CouplingMatrix;

pub const MIN_TOL: f64 = 1e-12;
pub const MAX_TOL: f64 = 1e-4;
const MAX_STEPS: usize = 200_000_000;

/// Right-hand side of the full model, precomputed for repeated evaluation.
#[derive(Debug, Clone)]
pub struct FullModel {
    levels: usize,
    // row-major d_kj
    couplings: Vec<f64>,
    // (V_p, p) per carrier
    carriers: Vec<(f64, usize)>,
    ground_energy: f64,
    hbar: f64,
    horizon: f64,
    max_step: f64,
}

impl FullModel {
    pub fn new(schedule: &ControlSchedule, couplings: &CouplingMatrix) -> Result<Self> {
        let spec = couplings.spec();
        let n = spec.levels;
        if schedule.spec().levels != n {
            return Err(Error::DimensionMismatch {
                left: schedule.spec().levels,
                right: n,
            });
        }
        let mut flat = Vec::with_capacity(n * n);
        for k in 1..=n {
            for j in 1..=n {
                flat.push(couplings.get(k, j));
            }
        }
        let carriers: Vec<(f64, usize)> = schedule.entries().iter().map(|e| (e.amplitude(), e.mode)).collect();
        let max_carrier = schedule.entries().iter().map(|e| e.carrier).fold(0.0, f64::max);
        let max_spacing = spec.transition_frequency(n)?;
        Ok(Self {
            levels: n,
            couplings: flat,
            carriers,
            ground_energy: spec.ground_energy(),
            hbar: spec.hbar,
            horizon: schedule.horizon(),
            max_step: 1.0 / (20.0 * (max_carrier + max_spacing)),
        })
    }

    /// Step cap `1/(20 ω_max)`.
    pub fn max_step(&self) -> f64 {
        self.max_step
    }

    pub fn rhs(&self, t: f64, a: &[Complex64], da: &mut [Complex64], phases: &mut [Complex64]) {
        let n = self.levels;
        // phases[k] = e^{-iE_{k+1} t/ħ} = z^{(k+1)²} with z = e^{-iE_1 t/ħ}
        let z = Complex64::from_polar(1.0, -self.ground_energy * t / self.hbar);
        let z2 = z * z;
        let mut step = z;
        phases[0] = z;
        for k in 1..n {
            step *= z2;
            phases[k] = phases[k - 1] * step;
        }
        let field = if (0.0..=self.horizon).contains(&t) {
            let conj1 = phases[0].conj();
            self.carriers
                .iter()
                .map(|&(v, p)| v * (phases[p - 1] * conj1).re)
                .sum::<f64>()
        } else {
            0.0
        };
        if field == 0.0 {
            da.iter_mut().for_each(|d| *d = Complex64::default());
            return;
        }
        for j in 0..n {
            let row = &self.couplings[j * n..(j + 1) * n];
            let mut acc = Complex64::default();
            for k in 0..n {
                acc += phases[k] * a[k] * row[k];
            }
            // −(i/ħ) f(t) e^{+iE_j t/ħ} Σ_k ...
            let v = phases[j].conj() * acc * (field / self.hbar);
            da[j] = Complex64::new(v.im, -v.re);
        }
    }

    /// State at each of `stops`, starting from `psi` at `t0`.
    pub fn evolve(
        &self,
        psi: &[Complex64],
        t0: f64,
        stops: &[f64],
        tol: f64,
    ) -> Result<(Vec<Vec<Complex64>>, IntegratorMeta)> {
        if !(MIN_TOL..=MAX_TOL).contains(&tol) {
            return Err(Error::InvalidInput(format!(
                "tolerance must lie in [{MIN_TOL:e}, {MAX_TOL:e}], got {tol:e}"
            )));
        }
        let mut phases = vec![Complex64::default(); self.levels];
        let ctl = StepControl {
            tol,
            max_step: self.max_step,
            max_steps: MAX_STEPS,
        };
        let (states, stats) = ode::integrate(|t, a, da| self.rhs(t, a, da, &mut phases), t0, psi, stops, ctl)?;
        Ok((
            states,
            IntegratorMeta {
                steps: stats.accepted,
                rejected_steps: stats.rejected,
                evaluations: stats.evaluations,
                tolerance: Some(tol),
            },
        ))
    }
}

/// Adaptive Dormand–Prince integration of the full model over `[0, T]`.
/// The norm is not renormalised, so its drift measures integration error.
pub fn propagate_full(
    schedule: &ControlSchedule,
    couplings: &CouplingMatrix,
    psi0: &SpectralVector,
    tol: f64,
    samples: usize,
) -> Result<TrajectoryRecord> {
    check_initial(psi0, couplings.levels())?;
    let model = FullModel::new(schedule, couplings)?;
    let times = sample_times(schedule.horizon(), samples)?;
    let (states, meta) = model.evolve(&psi0.amplitudes, 0.0, &times[1..], tol)?;
    let mut out = Vec::with_capacity(times.len());
    out.push(SpectralVector::new(psi0.amplitudes.clone(), 0.0, ModelTag::Full));
    out.extend(
        states
            .into_iter()
            .zip(&times[1..])
            .map(|(a, &t)| SpectralVector::new(a, t, ModelTag::Full)),
    );
    Ok(TrajectoryRecord {
        model: ModelTag::Full,
        times,
        states: out,
        meta,
    })
}
