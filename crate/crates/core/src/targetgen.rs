//! Antisymmetric Gaussian-derivative target packet and its eigenbasis coefficients.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature;
use crate::state::{ModelTag, SpectralVector};
use crate::welltrap::{eigenfunction_unchecked, WellSpec};

/// Default bound on the target weight left outside the first N levels.
pub const DEFAULT_C_CONST: f64 = 1e-3;
/// Hard cap for [`choose_truncation`].
pub const MAX_LEVELS: usize = 512;

/// `Ψ_T(x) = B (x − x0) exp(−(x − x0)²/σ²)`, normalised on `[0, L]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetSpec {
    sigma: f64,
    x0: f64,
    length: f64,
    norm_const: f64,
}

impl TargetSpec {
    pub fn new(sigma: f64, x0: f64, length: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidTarget(format!(
                "well length must be positive, got {length}"
            )));
        }
        if !(sigma.is_finite() && sigma > 0.0 && sigma < length) {
            return Err(Error::InvalidTarget(format!("sigma must lie in (0, L), got {sigma}")));
        }
        if !(x0 > 0.0 && x0 < length) {
            return Err(Error::InvalidTarget(format!("x0 must lie in (0, L), got {x0}")));
        }
        let raw = quadrature::integrate(|x| shape(x, x0, sigma).powi(2), 0.0, length)?;
        Ok(Self {
            sigma,
            x0,
            length,
            norm_const: raw.sqrt().recip(),
        })
    }

    /// Target centred in the well with `σ = ratio · L`.
    pub fn centered(sigma_ratio: f64, spec: &WellSpec) -> Result<Self> {
        Self::new(sigma_ratio * spec.length, 0.5 * spec.length, spec.length)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// The normalisation constant `B` on `[0, L]`.
    pub fn norm_const(&self) -> f64 {
        self.norm_const
    }

    /// `B` for the packet extended over the whole real line: `(σ³ √(π/32))^{-1/2}`.
    pub fn norm_const_unbounded(&self) -> f64 {
        (self.sigma.powi(3) * (PI / 32.0).sqrt()).sqrt().recip()
    }

    /// False when the packet's ±5σ support crosses a wall.
    pub fn fits_in_well(&self) -> bool {
        self.x0 - 5.0 * self.sigma > 0.0 && self.x0 + 5.0 * self.sigma < self.length
    }

    pub fn value(&self, x: f64) -> f64 {
        if !(0.0..=self.length).contains(&x) {
            return 0.0;
        }
        self.norm_const * shape(x, self.x0, self.sigma)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let u = x - self.x0;
        let s2 = self.sigma * self.sigma;
        self.norm_const * (-u * u / s2).exp() * (1.0 - 2.0 * u * u / s2)
    }

    /// Dispersion of `|Ψ_T|²` on the unbounded line: `σ √3 / 2`.
    pub fn unbounded_dispersion(&self) -> f64 {
        self.sigma * 3f64.sqrt() / 2.0
    }

    /// Large-well approximation of `a_j^T` from the Gaussian–sine integral
    /// `∫u e^{−u²/σ²} sin(ku) du = (√π σ³ k / 2) e^{−k²σ²/4}`.
    pub fn coefficient_closed_form(&self, j: usize) -> f64 {
        let k = j as f64 * PI / self.length;
        (2.0 / self.length).sqrt()
            * self.norm_const_unbounded()
            * (k * self.x0).cos()
            * (PI.sqrt() * self.sigma.powi(3) / 2.0)
            * k
            * (-(k * self.sigma / 2.0).powi(2)).exp()
    }

    /// `a_j^T = ∫₀ᴸ ψ_j Ψ_T dx`.
    pub fn coefficient(&self, j: usize) -> Result<f64> {
        if j < 1 {
            return Err(Error::InvalidLevel(j));
        }
        let l = self.length;
        quadrature::integrate(|x| eigenfunction_unchecked(l, j, x) * self.value(x), 0.0, l)
    }
}

fn shape(x: f64, x0: f64, sigma: f64) -> f64 {
    let u = x - x0;
    u * (-(u * u) / (sigma * sigma)).exp()
}

pub fn target_wavefunction(target: &TargetSpec, x: f64) -> f64 {
    target.value(x)
}

/// Coefficients `a_1^T..a_N^T`, all real.
pub fn target_coefficients(target: &TargetSpec, spec: &WellSpec) -> Result<SpectralVector> {
    check_length(target, spec)?;
    let values = (1..=spec.levels)
        .map(|j| target.coefficient(j))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralVector::from_real(&values, 0.0, ModelTag::Target))
}

fn check_length(target: &TargetSpec, spec: &WellSpec) -> Result<()> {
    if (target.length - spec.length).abs() > 1e-12 * spec.length {
        return Err(Error::InvalidTarget(format!(
            "target built for L = {} but the well has L = {}",
            target.length, spec.length
        )));
    }
    Ok(())
}

/// `Σ_{j>N} |a_j^T|²`, evaluated as `1 − Σ_{j≤N} |a_j^T|²` since the target is
/// normalised on the well and the eigenbasis is complete there.
pub fn truncation_residual(target: &TargetSpec, levels: usize) -> Result<f64> {
    let mut kept = 0.0;
    for j in 1..=levels {
        kept += target.coefficient(j)?.powi(2);
    }
    Ok((1.0 - kept).max(0.0))
}

/// Smallest `N ≥ 2` with `Σ_{j>N} |a_j^T|² < c_const`.
pub fn choose_truncation(target: &TargetSpec, c_const: f64) -> Result<usize> {
    if !(c_const > 0.0 && c_const <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "truncation constant must lie in (0, 1], got {c_const}"
        )));
    }
    let mut kept = 0.0;
    let mut residual = 1.0;
    for n in 1..=MAX_LEVELS {
        kept += target.coefficient(n)?.powi(2);
        residual = (1.0 - kept).max(0.0);
        if n >= 2 && residual < c_const {
            return Ok(n);
        }
    }
    Err(Error::TruncationFailure {
        residual,
        cap: MAX_LEVELS,
    })
}

/// `⟨Ψ_T| p²/2m |Ψ_T⟩ = (ħ²/2m) ∫ |Ψ_T'|² dx`.
pub fn kinetic_energy(target: &TargetSpec, spec: &WellSpec) -> Result<f64> {
    check_length(target, spec)?;
    let integral = quadrature::integrate(|x| target.derivative(x).powi(2), 0.0, spec.length)?;
    Ok(spec.hbar * spec.hbar / (2.0 * spec.mass) * integral)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> (TargetSpec, WellSpec) {
        let spec = WellSpec::internal(30).unwrap();
        (TargetSpec::centered(0.02, &spec).unwrap(), spec)
    }

    #[test]
    fn rejects_bad_targets() {
        assert!(matches!(TargetSpec::new(0.0, 0.5, 1.0), Err(Error::InvalidTarget(_))));
        assert!(matches!(TargetSpec::new(-0.1, 0.5, 1.0), Err(Error::InvalidTarget(_))));
        assert!(TargetSpec::new(0.1, 1.2, 1.0).is_err());
        assert!(!TargetSpec::new(0.2, 0.5, 1.0).unwrap().fits_in_well());
        assert!(TargetSpec::new(0.02, 0.5, 1.0).unwrap().fits_in_well());
    }

    #[test]
    fn node_antisymmetry_and_norm() {
        let (t, _) = fig1();
        assert_eq!(target_wavefunction(&t, 0.5), 0.0);
        for d in [1e-3, 0.01, 0.03] {
            assert!((t.value(0.5 + d) + t.value(0.5 - d)).abs() < 1e-12);
        }
        let norm = quadrature::integrate(|x| t.value(x).powi(2), 0.0, 1.0).unwrap();
        assert!((norm - 1.0).abs() < 1e-10);
        let rel = (t.norm_const() - t.norm_const_unbounded()) / t.norm_const();
        assert!(rel.abs() < 1e-10, "{rel}");
    }

    #[test]
    fn odd_coefficients_vanish_for_centered_target() {
        let (t, spec) = fig1();
        let a = target_coefficients(&t, &spec).unwrap();
        for j in (1..=30).step_by(2) {
            assert!(a.get(j).norm() < 1e-10, "j={j}");
            assert_eq!(a.get(j).im, 0.0);
        }
    }

    #[test]
    fn even_coefficients_match_closed_form() {
        let (t, spec) = fig1();
        let a = target_coefficients(&t, &spec).unwrap();
        for j in (2..=30).step_by(2) {
            let c = t.coefficient_closed_form(j);
            assert!(((a.get(j).re - c) / c).abs() < 1e-6, "j={j}");
        }
    }

    #[test]
    fn truncation_edge_cases() {
        let (t, _) = fig1();
        assert_eq!(choose_truncation(&t, 1.0).unwrap(), 2);
        assert!(choose_truncation(&t, 0.0).is_err());
        let broad = TargetSpec::new(0.5, 0.5, 1.0).unwrap();
        assert!(choose_truncation(&broad, 0.1).unwrap() < 10);
        let r: Vec<f64> = (2..40).map(|n| truncation_residual(&t, n).unwrap()).collect();
        assert!(r.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn kinetic_energy_matches_unbounded_value() {
        // (ħ²/2m)∫Ψ'² = 3ħ²/(2mσ²) on the real line
        let spec = WellSpec::internal(4).unwrap();
        let t = TargetSpec::centered(0.05, &spec).unwrap();
        let e = kinetic_energy(&t, &spec).unwrap();
        assert!((e - 1.5 / 0.0025).abs() < 1e-8 * e);
    }
}
