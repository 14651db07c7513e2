use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::SpectralVector;
use crate::welltrap::{eigenfunction_unchecked, WellSpec};

pub const MIN_GRID: usize = 256;

/// `Ψ(x_i)` on a uniform grid over `[0, L]` including both walls.
#[derive(Debug, Clone)]
pub struct GridWavefunction {
    pub positions: Vec<f64>,
    pub values: Vec<Complex64>,
    pub time: f64,
}

impl GridWavefunction {
    pub fn spacing(&self) -> f64 {
        self.positions[1] - self.positions[0]
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn peak_density(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max)
    }

    /// Trapezoidal `∫|Ψ|² dx`.
    pub fn norm(&self) -> f64 {
        trapezoid(&self.density(), self.spacing())
    }
}

pub(crate) fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    h * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1]))
}

/// Eigenfunctions tabulated on a grid, for reconstructing many states.
#[derive(Debug, Clone)]
pub struct GridBasis {
    spec: WellSpec,
    positions: Vec<f64>,
    // table[j * m + i] = ψ_{j+1}(x_i)
    table: Vec<f64>,
}

impl GridBasis {
    pub fn new(spec: &WellSpec, points: usize) -> Result<Self> {
        if points < MIN_GRID {
            return Err(Error::InvalidInput(format!(
                "grid needs at least {MIN_GRID} points, got {points}"
            )));
        }
        let l = spec.length;
        let positions: Vec<f64> = (0..points).map(|i| l * i as f64 / (points - 1) as f64).collect();
        let mut table = Vec::with_capacity(points * spec.levels);
        for j in 1..=spec.levels {
            table.extend(positions.iter().map(|&x| eigenfunction_unchecked(l, j, x)));
        }
        Ok(Self {
            spec: *spec,
            positions,
            table,
        })
    }

    pub fn points(&self) -> usize {
        self.positions.len()
    }

    /// `Ψ(x) = Σ_j a_j e^{−iE_j t/ħ} ψ_j(x)`; walls are set to exactly zero.
    pub fn reconstruct(&self, a: &SpectralVector) -> Result<GridWavefunction> {
        if a.levels() != self.spec.levels {
            return Err(Error::DimensionMismatch {
                left: a.levels(),
                right: self.spec.levels,
            });
        }
        let m = self.points();
        let mut values = vec![Complex64::default(); m];
        for (j, c) in a.with_phases(&self.spec).into_iter().enumerate() {
            if c == Complex64::default() {
                continue;
            }
            let row = &self.table[j * m..(j + 1) * m];
            for (v, psi) in values.iter_mut().zip(row) {
                *v += c * psi;
            }
        }
        values[0] = Complex64::default();
        values[m - 1] = Complex64::default();
        Ok(GridWavefunction {
            positions: self.positions.clone(),
            values,
            time: a.time,
        })
    }
}

pub fn reconstruct_wavefunction(a: &SpectralVector, spec: &WellSpec, points: usize) -> Result<GridWavefunction> {
    GridBasis::new(spec, points)?.reconstruct(a)
}
