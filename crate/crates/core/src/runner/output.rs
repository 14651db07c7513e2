use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use image::{Rgb, RgbImage};

use super::ModelReport;
use crate::dynamics::{GridBasis, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::welltrap::WellSpec;

const IMAGE_MAX_COLUMNS: usize = 512;
const IMAGE_MIN_ROWS: usize = 256;

/// Time series with columns `t, norm, width, pop_ground, pop_excited, peak_density`.
pub fn write_timeseries_csv(report: &ModelReport, path: &Path) -> Result<()> {
    let mut out = String::from("t,norm,width,pop_ground,pop_excited,peak_density\n");
    for i in 0..report.times.len() {
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            report.times[i],
            report.norms[i],
            report.widths[i],
            report.ground_populations[i],
            report.excited_populations[i],
            report.peak_densities[i],
        );
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone)]
pub struct DensityMapFiles {
    pub matrix: PathBuf,
    pub image: PathBuf,
    /// `rows[s][i] = |Ψ(x_i, t_s)|²`.
    pub rows: Vec<Vec<f64>>,
}

/// Writes `<prefix>.txt`, one row of `|Ψ(x_i, t_s)|²` per sample after a
/// `# M=.. samples=.. L=.. T=..` header, and `<prefix>.png`, a heat map with
/// time running downwards and position across.
pub fn emit_density_map(
    traj: &TrajectoryRecord,
    spec: &WellSpec,
    points: usize,
    prefix: &Path,
) -> Result<DensityMapFiles> {
    if traj.is_empty() {
        return Err(Error::InvalidInput("trajectory has no samples".into()));
    }
    let basis = GridBasis::new(spec, points)?;
    let rows = traj
        .states
        .iter()
        .map(|s| basis.reconstruct(s).map(|psi| psi.density()))
        .collect::<Result<Vec<_>>>()?;

    let matrix = prefix.with_extension("txt");
    let mut text = format!(
        "# M={} samples={} L={:?} T={:?}\n",
        points,
        rows.len(),
        spec.length,
        traj.horizon()
    );
    for row in &rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        text.push_str(&line.join(" "));
        text.push('\n');
    }
    fs::write(&matrix, text).map_err(|e| Error::io(&matrix, e))?;

    let image = prefix.with_extension("png");
    render_heat_map(&rows, &image)?;
    Ok(DensityMapFiles { matrix, image, rows })
}

fn render_heat_map(rows: &[Vec<f64>], path: &Path) -> Result<()> {
    let points = rows[0].len();
    let width = points.min(IMAGE_MAX_COLUMNS);
    let repeat = IMAGE_MIN_ROWS.div_ceil(rows.len()).max(1);
    let height = rows.len() * repeat;
    let peak = rows.iter().flatten().copied().fold(0.0, f64::max);
    let scale = if peak > 0.0 { peak.recip() } else { 0.0 };
    let mut img = RgbImage::new(width as u32, height as u32);
    for (r, row) in rows.iter().enumerate() {
        for c in 0..width {
            // max over the grid points that fall in this column
            let lo = c * points / width;
            let hi = ((c + 1) * points / width).max(lo + 1);
            let v = row[lo..hi].iter().copied().fold(0.0, f64::max) * scale;
            let px = colormap(v);
            for k in 0..repeat {
                img.put_pixel(c as u32, (r * repeat + k) as u32, px);
            }
        }
    }
    img.save(path).map_err(|e| Error::Image {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

// black → purple → orange → pale yellow
fn colormap(v: f64) -> Rgb<u8> {
    const STOPS: [(f64, [f64; 3]); 4] = [
        (0.0, [0.0, 0.0, 4.0]),
        (0.35, [120.0, 28.0, 109.0]),
        (0.7, [237.0, 105.0, 37.0]),
        (1.0, [252.0, 255.0, 164.0]),
    ];
    let v = v.clamp(0.0, 1.0);
    let i = STOPS.windows(2).position(|w| v <= w[1].0).unwrap_or(STOPS.len() - 2);
    let (a, b) = (STOPS[i], STOPS[i + 1]);
    let f = (v - a.0) / (b.0 - a.0);
    let mix = |k: usize| (a.1[k] + f * (b.1[k] - a.1[k])).round() as u8;
    Rgb([mix(0), mix(1), mix(2)])
}
