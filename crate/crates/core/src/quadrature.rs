//! Composite Gauss–Legendre quadrature with panel doubling.

use std::sync::OnceLock;

use crate::error::{Error, Result};

const ORDER: usize = 20;
const START_PANELS: usize = 16;
const MAX_PANELS: usize = 1 << 16;

/// Relative convergence target between successive panel doublings.
pub const REL_TOL: f64 = 1e-10;
/// Absolute floor, scaled by the integral of |f|, for integrals that cancel to ~0.
const ABS_FLOOR: f64 = 1e-14;

/// Nodes and weights of the Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(order, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(order, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(ORDER))
}

/// Fixed composite rule: returns (∫f, ∫|f|).
fn composite<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> Result<(f64, f64)> {
    let (nodes, weights) = rule();
    let h = (b - a) / panels as f64;
    let (mut sum, mut abs_sum) = (0.0, 0.0);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (x, w) in nodes.iter().zip(weights) {
            let v = f(mid + 0.5 * h * x);
            if !v.is_finite() {
                return Err(Error::Evaluation(format!(
                    "integrand is not finite at x = {}",
                    mid + 0.5 * h * x
                )));
            }
            sum += w * v;
            abs_sum += w * v.abs();
        }
    }
    Ok((0.5 * h * sum, 0.5 * h * abs_sum))
}

/// Integrates `f` over [a, b], doubling the panel count until two successive
/// doublings change the result by less than `REL_TOL` relative.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    let mut panels = START_PANELS;
    let (mut prev, _) = composite(&f, a, b, panels)?;
    let mut agreed = 0;
    while panels < MAX_PANELS {
        panels *= 2;
        let (cur, abs) = composite(&f, a, b, panels)?;
        let tol = (REL_TOL * cur.abs()).max(ABS_FLOOR * abs);
        if (cur - prev).abs() <= tol {
            agreed += 1;
            if agreed == 2 {
                return Ok(cur);
            }
        } else {
            agreed = 0;
        }
        prev = cur;
    }
    Err(Error::Quadrature(format!(
        "no convergence on [{a}, {b}] after {MAX_PANELS} panels"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_nodes_are_symmetric() {
        let (x, w) = gauss_legendre(ORDER);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        for i in 0..ORDER {
            assert!((x[i] + x[ORDER - 1 - i]).abs() < 1e-15);
        }
    }

    #[test]
    fn rule_is_exact_for_high_degree_polynomials() {
        let (x, w) = gauss_legendre(ORDER);
        // degree 38 is within the 2n-1 exactness bound
        let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(38)).sum();
        assert!((q - 2.0 / 39.0).abs() < 1e-14);
    }

    #[test]
    fn integrates_oscillatory_and_cancelling_integrands() {
        let v = integrate(|x: f64| (40.0 * x).sin(), 0.0, 1.0).unwrap();
        assert!((v - (1.0 - 40f64.cos()) / 40.0).abs() < 1e-13);
        let z = integrate(|x: f64| (2.0 * std::f64::consts::PI * x).sin(), 0.0, 1.0).unwrap();
        assert!(z.abs() < 1e-14);
    }

    #[test]
    fn rejects_non_finite_integrand() {
        assert!(matches!(
            integrate(|x: f64| if x > 0.5 { f64::NAN } else { x }, 0.0, 1.0),
            Err(Error::Evaluation(_))
        ));
    }
}
