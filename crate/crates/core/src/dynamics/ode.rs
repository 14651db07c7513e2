//! Dormand–Prince 5(4) integrator for complex-valued systems.
//!
//! Steps are clipped so that every requested output time is hit exactly;
//! no interpolation is involved.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    /// Per-component local error bound, relative with an absolute floor of the same size.
    pub tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `y' = f(t, y)` from `t0` through each time in `stops` (all on
/// the same side of `t0`, ordered away from it) and returns the state at each.
pub fn integrate<F>(
    mut f: F,
    t0: f64,
    y0: &[Complex64],
    stops: &[f64],
    ctl: StepControl,
) -> Result<(Vec<Vec<Complex64>>, StepStats)>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let n = y0.len();
    let mut stats = StepStats::default();
    let mut out = Vec::with_capacity(stops.len());
    let Some(&last) = stops.last() else {
        return Ok((out, stats));
    };
    let dir = if last >= t0 { 1.0 } else { -1.0 };

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<Complex64>> = vec![vec![Complex64::default(); n]; 7];
    let mut stage = vec![Complex64::default(); n];
    let mut y_new = vec![Complex64::default(); n];
    f(t, &y, &mut k[0]);
    stats.evaluations += 1;
    let mut h = ctl.max_step.min(1e-3 * (last - t0).abs().max(1e-12));

    for &stop in stops {
        if (stop - t) * dir < 0.0 {
            return Err(Error::InvalidInput(
                "output times must move away from t0 monotonically".into(),
            ));
        }
        while (stop - t) * dir > 0.0 {
            if stats.accepted + stats.rejected >= ctl.max_steps {
                return Err(Error::IntegrationFailure {
                    time: t,
                    reason: format!("exceeded {} steps", ctl.max_steps),
                });
            }
            let remaining = (stop - t).abs();
            let mut step = h.min(ctl.max_step);
            let hits_stop = step >= remaining;
            if hits_stop {
                step = remaining;
            }
            if step <= 1e-14 * t.abs().max(1.0) && !hits_stop {
                return Err(Error::IntegrationFailure {
                    time: t,
                    reason: format!("step size underflow (h = {step:e})"),
                });
            }
            let hs = dir * step;

            for s in 1..7 {
                for i in 0..n {
                    let mut acc = y[i];
                    for (r, a) in A[s].iter().enumerate().take(s) {
                        if *a != 0.0 {
                            acc += k[r][i] * (hs * a);
                        }
                    }
                    stage[i] = acc;
                }
                f(t + C[s] * hs, &stage, &mut k[s]);
                stats.evaluations += 1;
            }
            // stage 6 is the fifth-order solution (FSAL)
            y_new.copy_from_slice(&stage);

            let mut err: f64 = 0.0;
            for i in 0..n {
                let mut e = Complex64::default();
                for (s, w) in E.iter().enumerate() {
                    if *w != 0.0 {
                        e += k[s][i] * w;
                    }
                }
                let scale = ctl.tol * (1.0 + y[i].norm().max(y_new[i].norm()));
                err = err.max((e * hs).norm() / scale);
            }

            if err <= 1.0 {
                stats.accepted += 1;
                t = if hits_stop { stop } else { t + hs };
                std::mem::swap(&mut y, &mut y_new);
                k.swap(0, 6);
                let grow = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                // a step shortened to land on a stop says nothing about the next one
                if !hits_stop || grow < 1.0 {
                    h = step * grow;
                }
            } else {
                stats.rejected += 1;
                h = step * (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            }
        }
        out.push(y.clone());
    }
    Ok((out, stats))
}
