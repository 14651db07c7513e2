//! Infinite-square-well eigenbasis, coupling elements and resonance structure.
//!
//! Levels are numbered from 1. Energies follow `E_j = j² π² ħ² / (2 m L²)`
//! and eigenfunctions `ψ_j(x) = √(2/L) sin(jπx/L)` on `[0, L]`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;

/// Couplings smaller than this (in units of L) are treated as selection-rule zeros.
pub const COUPLING_ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WellSpec {
    pub length: f64,
    pub mass: f64,
    pub hbar: f64,
    pub levels: usize,
}

impl WellSpec {
    pub fn new(length: f64, mass: f64, hbar: f64, levels: usize) -> Result<Self> {
        for (name, v) in [("length", length), ("mass", mass), ("hbar", hbar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidWell(format!("{name} must be positive, got {v}")));
            }
        }
        if levels < 2 {
            return Err(Error::InvalidWell(format!("at least 2 levels required, got {levels}")));
        }
        Ok(Self {
            length,
            mass,
            hbar,
            levels,
        })
    }

    /// Dimensionless units ħ = m = L = 1.
    pub fn internal(levels: usize) -> Result<Self> {
        Self::new(1.0, 1.0, 1.0, levels)
    }

    pub fn with_levels(&self, levels: usize) -> Result<Self> {
        Self::new(self.length, self.mass, self.hbar, levels)
    }

    /// `E_1 = π² ħ² / (2 m L²)`.
    pub fn ground_energy(&self) -> f64 {
        PI * PI * self.hbar * self.hbar / (2.0 * self.mass * self.length * self.length)
    }

    pub fn eigenenergy(&self, j: usize) -> Result<f64> {
        check_level(j)?;
        Ok((j * j) as f64 * self.ground_energy())
    }

    pub fn eigenfunction(&self, j: usize, x: f64) -> Result<f64> {
        check_level(j)?;
        Ok(eigenfunction_unchecked(self.length, j, x))
    }

    /// `ω_1j = (E_j − E_1)/ħ`.
    pub fn transition_frequency(&self, j: usize) -> Result<f64> {
        if j < 2 {
            return Err(Error::InvalidCarrier(j));
        }
        Ok((j * j - 1) as f64 * self.ground_energy() / self.hbar)
    }

    /// Time after which every `e^{-iE_j t/ħ}` returns to 1: `4 m L² / (π ħ)`.
    pub fn revival_period(&self) -> f64 {
        2.0 * PI * self.hbar / self.ground_energy()
    }

    /// Energies `E_1..E_N`.
    pub fn energies(&self) -> Vec<f64> {
        let e1 = self.ground_energy();
        (1..=self.levels).map(|j| (j * j) as f64 * e1).collect()
    }
}

fn check_level(j: usize) -> Result<()> {
    if j < 1 {
        Err(Error::InvalidLevel(j))
    } else {
        Ok(())
    }
}

pub(crate) fn eigenfunction_unchecked(length: f64, j: usize, x: f64) -> f64 {
    if !(0.0..=length).contains(&x) {
        return 0.0;
    }
    (2.0 / length).sqrt() * (j as f64 * PI * x / length).sin()
}

/// Spatial shape `U_in(x)` of the control potential.
#[derive(Clone)]
pub enum Profile {
    /// `U_in(x) = x`, the long-wavelength limit.
    Linear,
    /// `U_in(x) = sin(βx)/β`.
    Sinusoidal { beta: f64 },
    Custom {
        name: String,
        func: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl Profile {
    pub fn custom(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Profile::Custom {
            name: name.into(),
            func: Arc::new(f),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Profile::Linear => x,
            Profile::Sinusoidal { beta } => (beta * x).sin() / beta,
            Profile::Custom { func, .. } => func(x),
        }
    }

    /// Text form used in config files and summaries: `linear`, `sin:<beta>`.
    pub fn descriptor(&self) -> String {
        match self {
            Profile::Linear => "linear".into(),
            Profile::Sinusoidal { beta } => format!("sin:{beta:e}"),
            Profile::Custom { name, .. } => format!("custom:{name}"),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "linear" {
            return Ok(Profile::Linear);
        }
        if let Some(b) = s.strip_prefix("sin:") {
            let beta: f64 = b
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad wavenumber in profile `{s}`")))?;
            if !(beta.is_finite() && beta != 0.0) {
                return Err(Error::InvalidInput(format!(
                    "profile wavenumber must be nonzero, got {beta}"
                )));
            }
            return Ok(Profile::Sinusoidal { beta });
        }
        Err(Error::InvalidInput(format!(
            "unknown profile `{s}` (expected `linear` or `sin:<beta>`)"
        )))
    }
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

/// Closed-form `d_kj = ∫ψ_k x ψ_j dx` for the linear profile.
///
/// Off-diagonal elements vanish when `k + j` is even and equal
/// `−8 L k j / (π² (k² − j²)²)` otherwise; the diagonal is `L/2`.
pub fn coupling_element_linear(spec: &WellSpec, k: usize, j: usize) -> Result<f64> {
    check_level(k)?;
    check_level(j)?;
    Ok(linear_element(spec.length, k, j))
}

fn linear_element(length: f64, k: usize, j: usize) -> f64 {
    if k == j {
        return 0.5 * length;
    }
    if (k + j).is_multiple_of(2) {
        return 0.0;
    }
    let (kf, jf) = (k as f64, j as f64);
    let diff = kf * kf - jf * jf;
    -8.0 * length * kf * jf / (PI * PI * diff * diff)
}

/// `d_kj = ∫₀ᴸ ψ_k U_in ψ_j dx` by converged Gauss–Legendre quadrature.
pub fn coupling_element_general(spec: &WellSpec, k: usize, j: usize, profile: &Profile) -> Result<f64> {
    check_level(k)?;
    check_level(j)?;
    let l = spec.length;
    quadrature::integrate(
        |x| eigenfunction_unchecked(l, k, x) * profile.eval(x) * eigenfunction_unchecked(l, j, x),
        0.0,
        l,
    )
}

/// All `d_kj` for `k, j ≤ N`, stored 0-based.
#[derive(Debug, Clone)]
pub struct CouplingMatrix {
    spec: WellSpec,
    profile: Profile,
    elements: DMatrix<f64>,
}

impl CouplingMatrix {
    /// Uses the closed form for [`Profile::Linear`] and quadrature otherwise.
    pub fn build(spec: &WellSpec, profile: Profile) -> Result<Self> {
        let n = spec.levels;
        let mut elements = DMatrix::zeros(n, n);
        for k in 1..=n {
            for j in k..=n {
                let d = match profile {
                    Profile::Linear => linear_element(spec.length, k, j),
                    _ => coupling_element_general(spec, k, j, &profile)?,
                };
                elements[(k - 1, j - 1)] = d;
                elements[(j - 1, k - 1)] = d;
            }
        }
        Ok(Self {
            spec: *spec,
            profile,
            elements,
        })
    }

    pub fn linear(spec: &WellSpec) -> Self {
        Self::build(spec, Profile::Linear).expect("closed-form couplings cannot fail")
    }

    pub fn spec(&self) -> &WellSpec {
        &self.spec
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn levels(&self) -> usize {
        self.spec.levels
    }

    /// 1-based element access.
    pub fn get(&self, k: usize, j: usize) -> f64 {
        self.elements[(k - 1, j - 1)]
    }

    /// `d_k1`.
    pub fn ground(&self, k: usize) -> f64 {
        self.get(k, 1)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.elements
    }

    pub fn is_zero(&self, k: usize, j: usize) -> bool {
        self.get(k, j).abs() <= COUPLING_ZERO_TOL * self.spec.length
    }
}

/// For each carrier `p ∈ [2, N]`, the ordered pairs `(k, j)` with
/// `k² − j² = ±(p² − 1)`, i.e. `E_k − E_j = ±ħω_1p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResonanceTable {
    levels: usize,
    // index p - 2
    pairs: Vec<Vec<(usize, usize)>>,
}

impl ResonanceTable {
    /// Brute-force O(N³) integer scan.
    pub fn build(spec: &WellSpec) -> Self {
        let n = spec.levels;
        let mut pairs = vec![Vec::new(); n - 1];
        for (idx, list) in pairs.iter_mut().enumerate() {
            let p = (idx + 2) as i64;
            let gap = p * p - 1;
            for k in 1..=n as i64 {
                for j in 1..=n as i64 {
                    if (k * k - j * j).abs() == gap {
                        list.push((k as usize, j as usize));
                    }
                }
            }
        }
        Self { levels: n, pairs }
    }

    /// Same table from the factorisation `(k − j)(k + j) = p² − 1`.
    pub fn build_by_factoring(spec: &WellSpec) -> Self {
        let n = spec.levels;
        let mut pairs = vec![Vec::new(); n - 1];
        for (idx, list) in pairs.iter_mut().enumerate() {
            let p = idx + 2;
            let gap = p * p - 1;
            let mut found = Vec::new();
            let mut a = 1;
            while a * a < gap {
                if gap % a == 0 {
                    let b = gap / a;
                    // k - j = a, k + j = b need equal parity
                    if (a + b) % 2 == 0 {
                        let k = (a + b) / 2;
                        let j = (b - a) / 2;
                        if j >= 1 && k <= n {
                            found.push((k, j));
                            found.push((j, k));
                        }
                    }
                }
                a += 1;
            }
            found.sort_unstable();
            *list = found;
        }
        Self { levels: n, pairs }
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn pairs(&self, p: usize) -> &[(usize, usize)] {
        if p < 2 || p > self.levels {
            return &[];
        }
        &self.pairs[p - 2]
    }

    /// Iterates `(p, k, j)` over every resonant triple.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.pairs
            .iter()
            .enumerate()
            .flat_map(|(idx, list)| list.iter().map(move |&(k, j)| (idx + 2, k, j)))
    }

    /// Resonances between two excited levels (neither index is the ground state).
    pub fn accidental(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.iter().filter(|&(_, k, j)| k != 1 && j != 1)
    }
}
