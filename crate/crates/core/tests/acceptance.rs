//! Acceptance criteria A1–A8. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wellsqueeze::control::{self, ELEMENTARY_CHARGE};
use wellsqueeze::diagnostics::{self, DEFAULT_RIPPLE};
use wellsqueeze::dynamics;
use wellsqueeze::runner::{Prepared, ScenarioConfig};
use wellsqueeze::targetgen::{self, TargetSpec};
use wellsqueeze::welltrap::{coupling_element_general, coupling_element_linear};
use wellsqueeze::{synthesize, ControlSchedule, CouplingMatrix, ModelTag, Profile, SpectralVector, WellSpec};

/// Truncated excited-state norm of the N = 30, σ = L/50 centred target,
/// frozen from an independent first run.
const FIG1_TRUNCATED_NORM: f64 = 0.845_976_645_610_840_4;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn check(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("A1 width history of the N=30 packet under RWA", a1_width_history),
        (
            "A2 terminal amplitudes of the closed-form solution",
            a2_terminal_amplitudes,
        ),
        ("A3 RWA vs reduced agreement at sigma = L/100", a3_rwa_vs_reduced),
        ("A4 SI duration estimate", a4_si_duration),
        ("A5 closed form vs quadrature cross-checks", a5_cross_checks),
        ("A6 full vs RWA at reduced scale", a6_full_vs_rwa),
        ("A7 propagator identities", a7_propagator_identities),
        ("A8 kinetic energy power law", a8_kinetic_scaling),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        println!(
            "{verdict} {name} [{:.2}s]: {}",
            start.elapsed().as_secs_f64(),
            outcome.detail
        );
        failed += usize::from(!outcome.pass);
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn widths_and_peaks(prepared: &Prepared, traj: &wellsqueeze::TrajectoryRecord, grid: usize) -> (Vec<f64>, Vec<f64>) {
    let mut widths = Vec::new();
    let mut peaks = Vec::new();
    for state in &traj.states {
        let psi = dynamics::reconstruct_wavefunction(state, &prepared.spec, grid).unwrap();
        widths.push(diagnostics::dispersion(&psi).unwrap());
        peaks.push(psi.peak_density());
    }
    (widths, peaks)
}

fn a1_width_history() -> Outcome {
    let cfg = ScenarioConfig::builtin("fig1").unwrap();
    let prepared = Prepared::new(&cfg).unwrap();
    let traj = prepared.propagate(ModelTag::Rwa, 200, cfg.tol).unwrap();
    let (widths, peaks) = widths_and_peaks(&prepared, &traj, cfg.grid);
    let width_violations = diagnostics::monotonicity_report(&widths, DEFAULT_RIPPLE).len();
    let peak_violations = diagnostics::growth_violations(&peaks, DEFAULT_RIPPLE).len();
    let w0 = widths[0];
    let wt = widths[widths.len() - 1];
    let ok_initial = (w0 - 0.18068).abs() <= 1e-4;
    let ok_final = wt <= 0.05;
    check(
        width_violations == 0 && peak_violations == 0 && ok_initial && ok_final,
        format!(
            "samples {}, width violations {width_violations}, peak violations {peak_violations}, \
             sigma(0) = {w0:.6} (want 0.18068 +- 1e-4), sigma(T) = {wt:.6} (want <= 0.05)",
            widths.len()
        ),
    )
}

fn a2_terminal_amplitudes() -> Outcome {
    let cfg = ScenarioConfig::builtin("fig1").unwrap();
    let prepared = Prepared::new(&cfg).unwrap();
    let target = &prepared.coefficients;
    let s = (2..=target.levels())
        .map(|j| target.get(j).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let horizon = prepared.schedule.horizon();
    let a = dynamics::analytic_amplitudes(&prepared.schedule, &prepared.couplings, horizon);
    let factor = (PI * s / 2.0).sin() / s;
    // the excited amplitudes carry a factor −i, so compare i·a_j(T)
    let i = Complex64::new(0.0, 1.0);
    let fig1_err = (2..=target.levels())
        .map(|j| (i * a.get(j) - target.get(j) * factor).norm())
        .fold(0.0, f64::max);

    // unit-norm excited targets are reached exactly
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut unit_err: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.random_range(4..=16);
        let spec = WellSpec::internal(n).unwrap();
        let d = CouplingMatrix::linear(&spec);
        let mut v = vec![0.0; n];
        for k in (2..=n).step_by(2) {
            v[k - 1] = rng.random_range(-1.0..1.0);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        let t = SpectralVector::from_real(&v, 0.0, ModelTag::Target);
        let horizon = rng.random_range(0.5..50.0);
        let sched = synthesize(&t, &d, horizon).unwrap();
        let a = dynamics::analytic_amplitudes(&sched, &d, horizon);
        unit_err = unit_err.max(a.get(1).norm());
        for j in 2..=n {
            unit_err = unit_err.max((i * a.get(j) - t.get(j)).norm());
        }
    }
    check(
        fig1_err <= 1e-12 && unit_err <= 1e-12,
        format!(
            "s = {s:.16}, max |i a_j(T) - a_j^T sin(pi s/2)/s| = {fig1_err:.2e}, \
             unit-norm targets {unit_err:.2e} (want <= 1e-12)"
        ),
    )
}

fn a3_rwa_vs_reduced() -> Outcome {
    let cfg = ScenarioConfig::builtin("smallsigma").unwrap();
    let prepared = Prepared::new(&cfg).unwrap();
    let trajs = prepared
        .propagate_all(&[ModelTag::Rwa, ModelTag::Reduced], cfg.samples, cfg.tol)
        .unwrap();
    let window = prepared.validity_window().unwrap();
    let report = diagnostics::compare_models(&trajs[0], &trajs[1], window.window).unwrap();
    check(
        report.max_deviation < 0.01,
        format!(
            "N = {} from C = 1e-3, window [0, {:.4}], max deviation {:.4e} at t = {:.4} (want < 0.01)",
            prepared.spec.levels, window.window.end, report.max_deviation, report.time_of_max
        ),
    )
}

fn a4_si_duration() -> Outcome {
    let spec = WellSpec::internal(30).unwrap();
    let target = TargetSpec::centered(0.02, &spec).unwrap();
    let coeffs = targetgen::target_coefficients(&target, &spec).unwrap();
    let d = CouplingMatrix::linear(&spec);
    let t = control::estimate_si_duration(8.0e-2, ELEMENTARY_CHARGE, 1e-6, &coeffs, &d, 30).unwrap();
    let ratio = t / 3e-4;
    check(
        (0.5..=2.0).contains(&ratio),
        format!(
            "a_30^T = {:.6}, T = {t:.4e} s, ratio to 3e-4 s = {ratio:.3} (want within factor 2)",
            coeffs.get(30).re
        ),
    )
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

fn a5_cross_checks() -> Outcome {
    let spec = WellSpec::internal(30).unwrap();
    let psi = |j: usize, x: f64| 2f64.sqrt() * (j as f64 * PI * x).sin();

    let mut coupling_rel: f64 = 0.0;
    let mut simpson_rel: f64 = 0.0;
    let mut odd_max: f64 = 0.0;
    for j in 2..=30 {
        let closed = coupling_element_linear(&spec, j, 1).unwrap();
        let quad = coupling_element_general(&spec, j, 1, &Profile::Linear).unwrap();
        if j % 2 == 0 {
            coupling_rel = coupling_rel.max(((quad - closed) / closed).abs());
            let oracle = simpson(|x| psi(j, x) * x * psi(1, x), 0.0, 1.0, 20_000);
            simpson_rel = simpson_rel.max(((oracle - closed) / closed).abs());
        } else {
            odd_max = odd_max.max(quad.abs());
        }
    }

    let target = TargetSpec::centered(0.02, &spec).unwrap();
    let coeffs = targetgen::target_coefficients(&target, &spec).unwrap();
    // √2 sin(kx) against B(x−x0)e^{−(x−x0)²/σ²} over the whole line; the erf
    // boundary terms are below double precision at σ = L/50
    let (sigma, x0) = (0.02_f64, 0.5_f64);
    let b = (sigma.powi(3) * (PI / 32.0).sqrt()).powf(-0.5);
    let mut coeff_rel: f64 = 0.0;
    for j in (2..=30).step_by(2) {
        let k = j as f64 * PI;
        let erf_form =
            2f64.sqrt() * b * (k * x0).cos() * PI.sqrt() * sigma.powi(3) * k / 2.0 * (-(k * sigma / 2.0).powi(2)).exp();
        coeff_rel = coeff_rel.max(((coeffs.get(j).re - erf_form) / erf_form).abs());
    }
    let s = coeffs.excited_population().sqrt();
    let s_err = (s - FIG1_TRUNCATED_NORM).abs();
    check(
        coupling_rel < 1e-6 && simpson_rel < 1e-6 && odd_max < 1e-10 && coeff_rel < 1e-6 && s_err < 1e-12,
        format!(
            "d_j1 quadrature rel {coupling_rel:.1e}, Simpson oracle rel {simpson_rel:.1e}, odd j max {odd_max:.1e}, \
             coefficients rel {coeff_rel:.1e}, s = {s:.16} (frozen {FIG1_TRUNCATED_NORM}, diff {s_err:.1e})"
        ),
    )
}

fn a6_full_vs_rwa() -> Outcome {
    let cfg = ScenarioConfig::builtin("reduced-scale").unwrap();
    let prepared = Prepared::new(&cfg).unwrap();
    let expected_horizon = 500.0 * 2.0 * PI / prepared.spec.transition_frequency(2).unwrap();
    let trajs = prepared
        .propagate_all(&[ModelTag::Full, ModelTag::Rwa], cfg.samples, cfg.tol)
        .unwrap();
    let window = prepared.validity_window().unwrap();
    let report = diagnostics::compare_models(&trajs[0], &trajs[1], window.window).unwrap();
    let drift = trajs[0].max_norm_drift();
    let horizon_ok = (prepared.schedule.horizon() - expected_horizon).abs() < 1e-9;
    check(
        report.max_deviation < 0.05 && drift < 1e-9 && horizon_ok,
        format!(
            "N = 10, T = {:.6}, max deviation {:.4e} (want < 0.05), norm drift {drift:.2e} (want < 1e-9), {} steps",
            prepared.schedule.horizon(),
            report.max_deviation,
            trajs[0].meta.steps
        ),
    )
}

fn random_schedule(rng: &mut ChaCha8Rng) -> (ControlSchedule, CouplingMatrix) {
    let n = rng.random_range(3..=14);
    let spec = WellSpec::internal(n).unwrap();
    let d = CouplingMatrix::linear(&spec);
    let horizon = rng.random_range(0.1..100.0);
    let mut slopes = Vec::new();
    for k in (2..=n).step_by(2) {
        if rng.random_bool(0.7) {
            slopes.push((k, rng.random_range(-2.0..2.0)));
        }
    }
    (ControlSchedule::from_slopes(&d, horizon, &slopes).unwrap(), d)
}

fn a7_propagator_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut pair_err: f64 = 0.0;
    for _ in 0..100 {
        let (sched, d) = random_schedule(&mut rng);
        let reduced = dynamics::propagate_reduced(&sched, &d, &SpectralVector::ground(d.levels()), 11).unwrap();
        for state in &reduced.states {
            let analytic = dynamics::analytic_amplitudes(&sched, &d, state.time);
            let magnus = dynamics::magnus_first_order(&sched, &d, state.time);
            for j in 1..=d.levels() {
                pair_err = pair_err
                    .max((state.get(j) - analytic.get(j)).norm())
                    .max((state.get(j) - magnus.get(j)).norm())
                    .max((analytic.get(j) - magnus.get(j)).norm());
            }
        }
    }

    let schedules: Vec<_> = (0..100).map(|_| random_schedule(&mut rng)).collect();
    let mut norm_err: f64 = 0.0;
    for i in 0..1000 {
        let (sched, d) = &schedules[i % schedules.len()];
        let t = rng.random_range(0.0..sched.horizon());
        norm_err = norm_err.max((dynamics::analytic_amplitudes(sched, d, t).norm_sqr() - 1.0).abs());
    }

    let mut roundtrip: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(4..=20);
        let spec = WellSpec::internal(n).unwrap();
        let d = CouplingMatrix::linear(&spec);
        let mut v = vec![0.0; n];
        for k in (2..=n).step_by(2) {
            v[k - 1] = rng.random_range(-1.0..1.0);
        }
        let target = SpectralVector::from_real(&v, 0.0, ModelTag::Target);
        let horizon = rng.random_range(0.01..1e4);
        let energy = synthesize(&target, &d, horizon).unwrap().total_energy();
        let back = control::duration_from_energy(&target, &d, energy).unwrap();
        roundtrip = roundtrip.max(((back - horizon) / horizon).abs());
    }
    check(
        pair_err <= 1e-10 && norm_err <= 1e-12 && roundtrip <= 1e-12,
        format!(
            "reduced/analytic/Magnus max diff {pair_err:.1e} (want <= 1e-10), norm identity {norm_err:.1e} \
             (want <= 1e-12), energy/duration round trip {roundtrip:.1e} (want <= 1e-12)"
        ),
    )
}

fn a8_kinetic_scaling() -> Outcome {
    let spec = WellSpec::internal(2).unwrap();
    let sigmas = [0.1, 0.05, 0.025];
    let energies: Vec<f64> = sigmas
        .iter()
        .map(|&s| targetgen::kinetic_energy(&TargetSpec::centered(s, &spec).unwrap(), &spec).unwrap())
        .collect();
    let exponent = diagnostics::power_law_exponent(&sigmas, &energies).unwrap();
    check(
        (exponent + 2.0).abs() <= 0.05,
        format!("fitted exponent {exponent:.6} over sigma = L/10, L/20, L/40 (want -2 +- 0.05)"),
    )
}
