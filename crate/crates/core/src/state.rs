use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::welltrap::WellSpec;

/// Which dynamical model (or construction) produced a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelTag {
    Full,
    Rwa,
    Reduced,
    Analytic,
    Magnus,
    Target,
    Initial,
}

impl ModelTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelTag::Full => "full",
            ModelTag::Rwa => "rwa",
            ModelTag::Reduced => "reduced",
            ModelTag::Analytic => "analytic",
            ModelTag::Magnus => "magnus",
            ModelTag::Target => "target",
            ModelTag::Initial => "initial",
        }
    }

    /// Parses one of the propagation models a scenario may request.
    pub fn parse_model(s: &str) -> Result<Self> {
        match s.trim() {
            "full" => Ok(ModelTag::Full),
            "rwa" => Ok(ModelTag::Rwa),
            "reduced" => Ok(ModelTag::Reduced),
            "analytic" => Ok(ModelTag::Analytic),
            other => Err(Error::InvalidInput(format!(
                "unknown model `{other}` (expected full, rwa, reduced or analytic)"
            ))),
        }
    }
}

impl std::fmt::Display for ModelTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Amplitudes `a_1..a_N` over the well eigenbasis at one instant.
///
/// Propagated states are interaction-picture amplitudes: the free phases
/// `e^{-iE_j t/ħ}` are not included. Target states hold position-space
/// projections.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralVector {
    pub amplitudes: Vec<Complex64>,
    pub time: f64,
    pub model: ModelTag,
}

impl SpectralVector {
    pub fn new(amplitudes: Vec<Complex64>, time: f64, model: ModelTag) -> Self {
        Self {
            amplitudes,
            time,
            model,
        }
    }

    pub fn from_real(values: &[f64], time: f64, model: ModelTag) -> Self {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect(), time, model)
    }

    /// `a_1 = 1`, everything else 0.
    pub fn ground(levels: usize) -> Self {
        let mut a = vec![Complex64::new(0.0, 0.0); levels];
        a[0] = Complex64::new(1.0, 0.0);
        Self::new(a, 0.0, ModelTag::Initial)
    }

    pub fn levels(&self) -> usize {
        self.amplitudes.len()
    }

    /// 1-based amplitude.
    pub fn get(&self, j: usize) -> Complex64 {
        self.amplitudes[j - 1]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn ground_population(&self) -> f64 {
        self.amplitudes[0].norm_sqr()
    }

    pub fn excited_population(&self) -> f64 {
        self.amplitudes[1..].iter().map(|a| a.norm_sqr()).sum()
    }

    /// Schrödinger-picture amplitudes `a_j e^{-iE_j t/ħ}`.
    pub fn with_phases(&self, spec: &WellSpec) -> Vec<Complex64> {
        let e1 = spec.ground_energy();
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let j = (i + 1) as f64;
                a * Complex64::from_polar(1.0, -j * j * e1 * self.time / spec.hbar)
            })
            .collect()
    }

    pub(crate) fn check_same_levels(&self, other: &SpectralVector) -> Result<()> {
        if self.levels() != other.levels() {
            return Err(Error::DimensionMismatch {
                left: self.levels(),
                right: other.levels(),
            });
        }
        Ok(())
    }
}
