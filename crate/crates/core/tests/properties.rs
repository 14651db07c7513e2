use num_complex::Complex64;
use proptest::prelude::*;

use wellsqueeze::control;
use wellsqueeze::diagnostics;
use wellsqueeze::dynamics::{self, FullModel};
use wellsqueeze::targetgen::{self, TargetSpec};
use wellsqueeze::welltrap::{coupling_element_general, coupling_element_linear};
use wellsqueeze::{synthesize, ControlSchedule, CouplingMatrix, ModelTag, Profile, SpectralVector, WellSpec};

fn even_target(values: &[f64]) -> SpectralVector {
    // values land on modes 2, 4, 6, ...
    let n = 2 * values.len();
    let mut v = vec![0.0; n];
    for (i, &x) in values.iter().enumerate() {
        v[2 * i + 1] = x;
    }
    SpectralVector::from_real(&v, 0.0, ModelTag::Target)
}

fn nonzero() -> impl Strategy<Value = f64> {
    prop_oneof![-1.0..-0.01, 0.01..1.0f64]
}

fn complex_vec(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n)
        .prop_map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
}

fn normalized(v: Vec<Complex64>) -> Vec<Complex64> {
    let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt().max(1e-3);
    v.into_iter().map(|c| c / n).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coupling_matrix_is_symmetric(n in 2usize..12, beta in 0.3..8.0f64) {
        let spec = WellSpec::internal(n).unwrap();
        for profile in [Profile::Linear, Profile::Sinusoidal { beta }] {
            let d = CouplingMatrix::build(&spec, profile).unwrap();
            for k in 1..=n {
                for j in 1..=n {
                    prop_assert!((d.get(k, j) - d.get(j, k)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn linear_parity_rule(k in 1usize..40, j in 1usize..40, length in 0.1..10.0f64) {
        prop_assume!(k != j && (k + j) % 2 == 0);
        let spec = WellSpec::new(length, 1.0, 1.0, 40).unwrap();
        prop_assert_eq!(coupling_element_linear(&spec, k, j).unwrap(), 0.0);
        let quad = coupling_element_general(&spec, k, j, &Profile::Linear).unwrap();
        prop_assert!(quad.abs() < 1e-12 * length);
    }

    #[test]
    fn small_wavenumber_matches_linear(k in 1usize..=30, j in 1usize..=30) {
        prop_assume!(k != j && (k + j) % 2 == 1);
        let spec = WellSpec::internal(30).unwrap();
        let closed = coupling_element_linear(&spec, k, j).unwrap();
        let sin = coupling_element_general(&spec, k, j, &Profile::Sinusoidal { beta: 1e-4 }).unwrap();
        prop_assert!(((sin - closed) / closed).abs() < 1e-6);
    }

    #[test]
    fn slope_scales_inversely_with_horizon(
        values in prop::collection::vec(nonzero(), 1..8),
        horizon in 0.1..100.0f64,
        c in 0.1..10.0f64,
    ) {
        let target = even_target(&values);
        let d = CouplingMatrix::linear(&WellSpec::internal(target.levels()).unwrap());
        let a = synthesize(&target, &d, horizon).unwrap();
        let b = synthesize(&target, &d, c * horizon).unwrap();
        for (ea, eb) in a.entries().iter().zip(b.entries()) {
            prop_assert_eq!(ea.mode, eb.mode);
            prop_assert!((eb.slope - ea.slope / c).abs() <= 1e-14 * ea.slope.abs());
        }
    }

    #[test]
    fn flipping_one_coefficient_flips_one_slope(
        values in prop::collection::vec(nonzero(), 1..8),
        pick in 0usize..8,
        horizon in 0.1..100.0f64,
    ) {
        let pick = pick % values.len();
        let d = CouplingMatrix::linear(&WellSpec::internal(2 * values.len()).unwrap());
        let a = synthesize(&even_target(&values), &d, horizon).unwrap();
        let mut flipped = values.clone();
        flipped[pick] = -flipped[pick];
        let b = synthesize(&even_target(&flipped), &d, horizon).unwrap();
        for (ea, eb) in a.entries().iter().zip(b.entries()) {
            if ea.mode == 2 * pick + 2 {
                prop_assert_eq!(eb.slope, -ea.slope);
            } else {
                prop_assert_eq!(eb.slope, ea.slope);
            }
        }
    }

    #[test]
    fn energy_and_duration_are_inverse(values in prop::collection::vec(nonzero(), 1..10), horizon in 1e-3..1e5f64) {
        let target = even_target(&values);
        let d = CouplingMatrix::linear(&WellSpec::internal(target.levels()).unwrap());
        let s = synthesize(&target, &d, horizon).unwrap();
        prop_assert!((s.envelope_energy() - 4.0 * s.total_energy()).abs() <= 1e-12 * s.envelope_energy());
        let back = control::duration_from_energy(&target, &d, s.total_energy()).unwrap();
        prop_assert!(((back - horizon) / horizon).abs() < 1e-12);
    }

    #[test]
    fn closed_form_norm_identity(values in prop::collection::vec(nonzero(), 1..10), horizon in 0.1..100.0f64, frac in 0.0..1.5f64) {
        let target = even_target(&values);
        let d = CouplingMatrix::linear(&WellSpec::internal(target.levels()).unwrap());
        let s = synthesize(&target, &d, horizon).unwrap();
        let a = dynamics::analytic_amplitudes(&s, &d, frac * horizon);
        prop_assert!((a.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fidelity_is_symmetric_and_phase_blind(a in complex_vec(6), b in complex_vec(6), phase in 0.0..6.3f64, t in 0.0..3.0f64) {
        let spec = WellSpec::internal(6).unwrap();
        let va = SpectralVector::new(normalized(a), t, ModelTag::Rwa);
        let vb = SpectralVector::new(normalized(b), t, ModelTag::Rwa);
        prop_assert_eq!(diagnostics::fidelity(&va, &vb).unwrap(), diagnostics::fidelity(&vb, &va).unwrap());
        prop_assert_eq!(diagnostics::fidelity_at(&va, &vb, &spec).unwrap(), diagnostics::fidelity_at(&vb, &va, &spec).unwrap());
        let g = Complex64::from_polar(1.0, phase);
        let rotated = SpectralVector::new(va.amplitudes.iter().map(|c| c * g).collect(), t, ModelTag::Rwa);
        prop_assert!((diagnostics::fidelity(&rotated, &vb).unwrap() - diagnostics::fidelity(&va, &vb).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn dispersion_ignores_global_phase(a in complex_vec(8), phase in 0.0..6.3f64, t in 0.0..1.0f64) {
        let spec = WellSpec::internal(8).unwrap();
        let v = SpectralVector::new(normalized(a), t, ModelTag::Rwa);
        let g = Complex64::from_polar(1.0, phase);
        let w = SpectralVector::new(v.amplitudes.iter().map(|c| c * g).collect(), t, ModelTag::Rwa);
        let basis = dynamics::GridBasis::new(&spec, 512).unwrap();
        let (pa, pb) = (basis.reconstruct(&v).unwrap(), basis.reconstruct(&w).unwrap());
        let (_, _, sa) = diagnostics::moments(&pa);
        let (_, _, sb) = diagnostics::moments(&pb);
        prop_assert!((sa - sb).abs() < 1e-13);
    }

    #[test]
    fn truncation_residual_is_non_increasing(sigma in 0.02..0.2f64, x0 in 0.3..0.7f64) {
        let target = TargetSpec::new(sigma, x0, 1.0).unwrap();
        let mut last = f64::INFINITY;
        for n in 1..40 {
            let r = targetgen::truncation_residual(&target, n).unwrap();
            prop_assert!(r <= last + 1e-15);
            last = r;
        }
    }
}

fn small_schedule() -> (ControlSchedule, CouplingMatrix) {
    let spec = WellSpec::internal(6).unwrap();
    let d = CouplingMatrix::linear(&spec);
    (
        ControlSchedule::from_slopes(&d, 4.0, &[(2, 0.3), (4, -0.2), (6, 0.15)]).unwrap(),
        d,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn full_model_is_linear(a in complex_vec(6), b in complex_vec(6), alpha in -2.0..2.0f64, beta in -2.0..2.0f64) {
        let (sched, d) = small_schedule();
        let model = FullModel::new(&sched, &d).unwrap();
        let tol = 1e-11;
        let stops = [1.3];
        let (ra, _) = model.evolve(&a, 0.0, &stops, tol).unwrap();
        let (rb, _) = model.evolve(&b, 0.0, &stops, tol).unwrap();
        let mix: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * alpha + y * beta).collect();
        let (rm, _) = model.evolve(&mix, 0.0, &stops, tol).unwrap();
        for i in 0..6 {
            let expect = ra[0][i] * alpha + rb[0][i] * beta;
            prop_assert!((rm[0][i] - expect).norm() < 1e-8);
        }
    }
}

#[test]
fn full_model_runs_backwards() {
    let (sched, d) = small_schedule();
    let model = FullModel::new(&sched, &d).unwrap();
    let tol = 1e-10;
    let psi0 = SpectralVector::ground(6).amplitudes;
    let t_end = sched.horizon() / 10.0;
    let (fwd, _) = model.evolve(&psi0, 0.0, &[t_end], tol).unwrap();
    let (back, _) = model.evolve(&fwd[0], t_end, &[0.0], tol).unwrap();
    let err = back[0]
        .iter()
        .zip(&psi0)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    assert!(err < 10.0 * tol, "round trip error {err:e}");
}

#[test]
fn closed_form_propagators_preserve_norm() {
    let (sched, d) = small_schedule();
    let table = wellsqueeze::ResonanceTable::build(d.spec());
    let psi0 = SpectralVector::ground(6);
    for traj in [
        dynamics::propagate_rwa(&sched, &d, &table, &psi0, 50).unwrap(),
        dynamics::propagate_reduced(&sched, &d, &psi0, 50).unwrap(),
        dynamics::propagate_analytic(&sched, &d, 50).unwrap(),
    ] {
        assert!(traj.max_norm_drift() < 1e-12, "{:?}", traj.model);
    }
}
