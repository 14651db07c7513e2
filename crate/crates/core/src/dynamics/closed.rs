//! Models with a time-independent generator: RWA, reduced (arrowhead),
//! the closed-form amplitudes and the first Magnus term.
//!
//! With constant envelopes the interaction-picture equations read
//! `iħ ȧ = G a` with `G` real symmetric, so `a(t) = exp(−iGt/ħ) a(0)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::{check_initial, sample_times, IntegratorMeta, TrajectoryRecord};
use crate::control::{sin_over, ControlSchedule};
use crate::error::{Error, Result};
use crate::state::{ModelTag, SpectralVector};
use crate::welltrap::{CouplingMatrix, ResonanceTable};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `G_jk = ½ Σ_p V_p d_kj` over resonant `(p, k, j)`, i.e. `B_p d_kj`.
pub fn rwa_generator(
    schedule: &ControlSchedule,
    couplings: &CouplingMatrix,
    table: &ResonanceTable,
) -> Result<DMatrix<f64>> {
    let n = couplings.levels();
    if table.levels() != n {
        return Err(Error::DimensionMismatch {
            left: table.levels(),
            right: n,
        });
    }
    let mut g = DMatrix::zeros(n, n);
    for e in schedule.entries() {
        for &(k, j) in table.pairs(e.mode) {
            g[(j - 1, k - 1)] += e.slope * couplings.get(k, j);
        }
    }
    Ok(g)
}

/// Ground-to-excited couplings only: `G_1k = G_k1 = B_k d_k1`.
pub fn reduced_generator(schedule: &ControlSchedule, couplings: &CouplingMatrix) -> DMatrix<f64> {
    let n = couplings.levels();
    let mut g = DMatrix::zeros(n, n);
    for e in schedule.entries() {
        let v = e.slope * couplings.ground(e.mode);
        g[(0, e.mode - 1)] = v;
        g[(e.mode - 1, 0)] = v;
    }
    g
}

fn to_complex(a: &SpectralVector) -> DVector<Complex64> {
    DVector::from_column_slice(&a.amplitudes)
}

fn check_schedule(schedule: &ControlSchedule, couplings: &CouplingMatrix) -> Result<()> {
    if schedule.spec().levels != couplings.levels() {
        return Err(Error::DimensionMismatch {
            left: schedule.spec().levels,
            right: couplings.levels(),
        });
    }
    Ok(())
}

fn record(
    model: ModelTag,
    psi0: &SpectralVector,
    times: Vec<f64>,
    mut eval: impl FnMut(f64) -> Vec<Complex64>,
) -> TrajectoryRecord {
    let states = times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let amps = if i == 0 { psi0.amplitudes.clone() } else { eval(t) };
            SpectralVector::new(amps, t, model)
        })
        .collect();
    TrajectoryRecord {
        model,
        times,
        states,
        meta: IntegratorMeta::default(),
    }
}

/// Resonant-only dynamics, every resonance in `table` included.
/// Propagated by eigendecomposition of the constant generator.
pub fn propagate_rwa(
    schedule: &ControlSchedule,
    couplings: &CouplingMatrix,
    table: &ResonanceTable,
    psi0: &SpectralVector,
    samples: usize,
) -> Result<TrajectoryRecord> {
    check_schedule(schedule, couplings)?;
    check_initial(psi0, couplings.levels())?;
    let g = rwa_generator(schedule, couplings, table)?;
    let hbar = couplings.spec().hbar;
    let horizon = schedule.horizon();
    let times = sample_times(horizon, samples)?;
    let a0 = to_complex(psi0);
    let prop = SymmetricPropagator::new(&g);
    Ok(record(ModelTag::Rwa, psi0, times, |t| {
        prop.apply(&a0, t.min(horizon) / hbar)
    }))
}

/// `exp(−iGτ)` for real symmetric `G`, diagonalized one connected block at a
/// time. nalgebra's QR iteration can return NaN on large, sparse, reducible
/// matrices; blocks that still fail fall back to the Padé exponential.
struct SymmetricPropagator {
    blocks: Vec<Block>,
}

enum Block {
    Single {
        index: usize,
        value: f64,
    },
    Eigen {
        indices: Vec<usize>,
        values: DVector<f64>,
        vectors: DMatrix<f64>,
    },
    Dense {
        indices: Vec<usize>,
        matrix: DMatrix<f64>,
    },
}

impl SymmetricPropagator {
    fn new(g: &DMatrix<f64>) -> Self {
        let blocks = connected_blocks(g)
            .into_iter()
            .map(|indices| {
                if indices.len() == 1 {
                    let index = indices[0];
                    return Block::Single {
                        index,
                        value: g[(index, index)],
                    };
                }
                let m = indices.len();
                let sub = DMatrix::from_fn(m, m, |a, b| g[(indices[a], indices[b])]);
                let eig = SymmetricEigen::new(sub.clone());
                if eig
                    .eigenvalues
                    .iter()
                    .chain(eig.eigenvectors.iter())
                    .all(|v| v.is_finite())
                {
                    Block::Eigen {
                        indices,
                        values: eig.eigenvalues,
                        vectors: eig.eigenvectors,
                    }
                } else {
                    Block::Dense { indices, matrix: sub }
                }
            })
            .collect();
        Self { blocks }
    }

    fn apply(&self, a: &DVector<Complex64>, tau: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); a.len()];
        for block in &self.blocks {
            match block {
                Block::Single { index, value } => {
                    out[*index] = a[*index] * Complex64::from_polar(1.0, -value * tau);
                }
                Block::Eigen {
                    indices,
                    values,
                    vectors,
                } => {
                    let sub = DVector::from_iterator(indices.len(), indices.iter().map(|&i| a[i]));
                    let vecs = vectors.map(|v| Complex64::new(v, 0.0));
                    let mut proj = vecs.transpose() * sub;
                    for (c, l) in proj.iter_mut().zip(values.iter()) {
                        *c *= Complex64::from_polar(1.0, -l * tau);
                    }
                    for (&i, v) in indices.iter().zip((vecs * proj).iter()) {
                        out[i] = *v;
                    }
                }
                Block::Dense { indices, matrix } => {
                    let sub = DVector::from_iterator(indices.len(), indices.iter().map(|&i| a[i]));
                    let u = matrix.map(|v| Complex64::new(0.0, -v * tau)).exp();
                    for (&i, v) in indices.iter().zip((u * sub).iter()) {
                        out[i] = *v;
                    }
                }
            }
        }
        out
    }
}

/// Index sets of the connected components of the sparsity graph of `g`.
fn connected_blocks(g: &DMatrix<f64>) -> Vec<Vec<usize>> {
    let n = g.nrows();
    let mut seen = vec![false; n];
    let mut blocks = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut block = Vec::new();
        while let Some(i) = stack.pop() {
            block.push(i);
            for j in 0..n {
                if !seen[j] && (g[(i, j)] != 0.0 || g[(j, i)] != 0.0) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        block.sort_unstable();
        blocks.push(block);
    }
    blocks
}

/// Ground-state-dominant (arrowhead) dynamics from an arbitrary initial state.
///
/// With `c_k = B_k d_k1` and `Ω = |c|/ħ` the generator only rotates the
/// plane spanned by `e_1` and `ĉ = c/|c|`; the orthogonal complement is frozen.
pub fn propagate_reduced(
    schedule: &ControlSchedule,
    couplings: &CouplingMatrix,
    psi0: &SpectralVector,
    samples: usize,
) -> Result<TrajectoryRecord> {
    check_schedule(schedule, couplings)?;
    let n = couplings.levels();
    check_initial(psi0, n)?;
    let mut c = vec![0.0; n];
    for e in schedule.entries() {
        c[e.mode - 1] = e.slope * couplings.ground(e.mode);
    }
    let c_norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
    let hbar = couplings.spec().hbar;
    let horizon = schedule.horizon();
    let a0 = &psi0.amplitudes;
    let unit: Vec<f64> = if c_norm > 0.0 {
        c.iter().map(|v| v / c_norm).collect()
    } else {
        vec![0.0; n]
    };
    let alpha = a0[0];
    let beta: Complex64 = unit.iter().zip(a0).skip(1).map(|(u, a)| a * u).sum();
    let times = sample_times(horizon, samples)?;
    Ok(record(ModelTag::Reduced, psi0, times, |t| {
        let phase = c_norm * t.min(horizon) / hbar;
        let (sin, cos) = phase.sin_cos();
        let mut out = a0.clone();
        out[0] = alpha * cos - I * beta * sin;
        let along = beta * cos - I * alpha * sin;
        for k in 1..n {
            out[k] = a0[k] - beta * unit[k] + along * unit[k];
        }
        out
    }))
}

/// Closed-form amplitudes from the ground state:
/// `a_1 = cos(R/ħ)`, `a_k = −i d_k1 θ_k sin(R/ħ)/R`.
///
/// The factor `−i` follows from `iħȧ_k = B_k d_k1 a_1`; it is common to all
/// excited levels.
pub fn analytic_amplitudes(schedule: &ControlSchedule, couplings: &CouplingMatrix, t: f64) -> SpectralVector {
    let n = couplings.levels();
    let tau = t.clamp(0.0, schedule.horizon());
    let hbar = couplings.spec().hbar;
    let r = schedule
        .entries()
        .iter()
        .map(|e| (schedule.theta(e.mode, tau) * couplings.ground(e.mode)).powi(2))
        .sum::<f64>()
        .sqrt();
    let ratio = sin_over(r, hbar);
    let mut a = vec![Complex64::default(); n];
    a[0] = Complex64::new((r / hbar).cos(), 0.0);
    for e in schedule.entries() {
        a[e.mode - 1] = -I * (couplings.ground(e.mode) * schedule.theta(e.mode, tau) * ratio);
    }
    SpectralVector::new(a, t, ModelTag::Analytic)
}

pub fn propagate_analytic(
    schedule: &ControlSchedule,
    couplings: &CouplingMatrix,
    samples: usize,
) -> Result<TrajectoryRecord> {
    check_schedule(schedule, couplings)?;
    let psi0 = SpectralVector::ground(couplings.levels());
    let times = sample_times(schedule.horizon(), samples)?;
    Ok(record(ModelTag::Analytic, &psi0, times, |t| {
        analytic_amplitudes(schedule, couplings, t).amplitudes
    }))
}

/// `exp(∫₀ᵗ Z ds)` applied to the ground state, where `Z = −(i/ħ) G_reduced`.
/// Higher Magnus terms vanish because `Z` is constant.
pub fn magnus_first_order(schedule: &ControlSchedule, couplings: &CouplingMatrix, t: f64) -> SpectralVector {
    let tau = t.clamp(0.0, schedule.horizon());
    let hbar = couplings.spec().hbar;
    let omega = reduced_generator(schedule, couplings).map(|g| Complex64::new(0.0, -g * tau / hbar));
    let u = omega.exp();
    SpectralVector::new(u.column(0).iter().copied().collect(), t, ModelTag::Magnus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::ControlSchedule;
    use crate::welltrap::WellSpec;
    use std::f64::consts::PI;

    fn single_mode(slope: f64, horizon: f64) -> (ControlSchedule, CouplingMatrix) {
        let spec = WellSpec::internal(4).unwrap();
        let d = CouplingMatrix::linear(&spec);
        (ControlSchedule::from_slopes(&d, horizon, &[(2, slope)]).unwrap(), d)
    }

    #[test]
    fn empty_schedule_is_identity() {
        let spec = WellSpec::internal(5).unwrap();
        let d = CouplingMatrix::linear(&spec);
        let s = ControlSchedule::from_slopes(&d, 3.0, &[]).unwrap();
        let table = ResonanceTable::build(&spec);
        let psi0 = SpectralVector::ground(5);
        for rec in [
            propagate_rwa(&s, &d, &table, &psi0, 5).unwrap(),
            propagate_reduced(&s, &d, &psi0, 5).unwrap(),
        ] {
            for st in &rec.states {
                assert!((st.get(1) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
            }
        }
        let m = magnus_first_order(&s, &d, 2.0);
        assert!((m.get(1).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_mode_rotation_phases() {
        let d21 = -16.0 / (9.0 * PI * PI);
        // θ d/ħ = π/2 at t = T
        let slope = PI / (2.0 * d21);
        let (s, d) = single_mode(slope, 1.0);
        let a = analytic_amplitudes(&s, &d, 1.0);
        assert!(a.get(1).norm() < 1e-15);
        assert!((a.get(2).norm() - 1.0).abs() < 1e-15);
        let m = magnus_first_order(&s, &d, 1.0);
        assert!(m.get(1).norm() < 1e-12);
        assert!((m.get(2) - a.get(2)).norm() < 1e-12);
        // 2×2 exponential: a_2 = −i sin(B d t/ħ)
        let rec = propagate_reduced(&s, &d, &SpectralVector::ground(4), 3).unwrap();
        let mid = &rec.states[1];
        let phase = slope * d21 * 0.5;
        assert!((mid.get(1) - Complex64::new(phase.cos(), 0.0)).norm() < 1e-14);
        assert!((mid.get(2) - Complex64::new(0.0, -phase.sin())).norm() < 1e-14);
    }

    #[test]
    fn analytic_starts_in_ground_state() {
        let (s, d) = single_mode(0.7, 2.0);
        let a = analytic_amplitudes(&s, &d, 0.0);
        assert_eq!(a.get(1), Complex64::new(1.0, 0.0));
        assert!(a.amplitudes[1..].iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn reduced_handles_general_initial_state() {
        let spec = WellSpec::internal(6).unwrap();
        let d = CouplingMatrix::linear(&spec);
        let s = ControlSchedule::from_slopes(&d, 2.0, &[(2, 3.0), (4, -40.0), (6, 100.0)]).unwrap();
        let mut amps = vec![
            Complex64::new(0.3, 0.1),
            Complex64::new(0.2, -0.4),
            Complex64::new(0.0, 0.5),
        ];
        amps.extend([
            Complex64::new(0.1, 0.1),
            Complex64::new(-0.3, 0.0),
            Complex64::new(0.2, 0.2),
        ]);
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let psi0 = SpectralVector::new(amps.iter().map(|a| a / norm).collect(), 0.0, ModelTag::Initial);
        let rec = propagate_reduced(&s, &d, &psi0, 4).unwrap();
        let g = reduced_generator(&s, &d).map(|v| Complex64::new(0.0, -v));
        for st in &rec.states {
            let u = (&g * Complex64::new(st.time, 0.0)).exp();
            let expected = u * DVector::from_column_slice(&psi0.amplitudes);
            for (x, y) in st.amplitudes.iter().zip(expected.iter()) {
                assert!((x - y).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn amplitudes_freeze_after_horizon() {
        let (s, d) = single_mode(0.7, 2.0);
        let a = analytic_amplitudes(&s, &d, 2.0);
        let b = analytic_amplitudes(&s, &d, 5.0);
        assert_eq!(a.amplitudes, b.amplitudes);
    }

    #[test]
    fn block_propagator_matches_dense_exponential() {
        // two decoupled blocks {0, 2, 3} and {1, 4}, plus an isolated diagonal entry
        let mut g = DMatrix::zeros(6, 6);
        for &(i, j, v) in &[(0, 2, 0.7), (2, 3, -0.4), (0, 3, 0.1), (1, 4, 1.3)] {
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
        g[(5, 5)] = 0.25;
        g[(2, 2)] = -0.3;
        let prop = SymmetricPropagator::new(&g);
        assert_eq!(prop.blocks.len(), 3);
        let a = DVector::from_fn(6, |i, _| Complex64::new(1.0 + i as f64, 0.5 - i as f64));
        let tau = 2.7;
        let dense = g.map(|v| Complex64::new(0.0, -v * tau)).exp() * &a;
        let got = prop.apply(&a, tau);
        for i in 0..6 {
            assert!((got[i] - dense[i]).norm() < 1e-12);
        }
    }
}
