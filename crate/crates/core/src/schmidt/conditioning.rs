//! From raw seed-sweep readings to a modulus amplitude matrix.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::decompose::{k_min, schmidt_decompose};
use super::record::MeasurementRecord;
use crate::error::{Error, Result};
use crate::spectral::{JointAmplitude, SpectralGrid};

/// Coverage below which a `K_min` estimate is reported with a warning.
pub const COVERAGE_THRESHOLD: f64 = 0.95;

/// Real, non-negative modulus amplitude `f = C·|φ|` in frequency order.
///
/// Index `(m, n)` runs over ascending frequency, i.e. descending wavelength,
/// so `values[(0, 0)]` sits at the long-wavelength corner of `grid`. `grid`
/// keeps the wavelength description of the same window.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeMatrix {
    pub values: DMatrix<f64>,
    pub grid: SpectralGrid,
}

impl AmplitudeMatrix {
    pub fn new(values: DMatrix<f64>, grid: SpectralGrid) -> Result<Self> {
        if values.shape() != grid.shape() {
            return Err(Error::Validation(format!(
                "amplitude is {}x{} but grid is {}x{}",
                values.nrows(),
                values.ncols(),
                grid.signal.count,
                grid.idler.count
            )));
        }
        if values.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidInput("amplitude entries must be finite and ≥ 0".into()));
        }
        if values.iter().all(|&v| v == 0.0) {
            return Err(Error::InvalidInput("amplitude matrix is identically zero".into()));
        }
        Ok(Self { values, grid })
    }

    /// `sqrt` of a wavelength-ordered intensity matrix, with both axes reversed.
    pub fn from_intensity(intensity: &DMatrix<f64>, grid: SpectralGrid) -> Result<Self> {
        let (m, n) = intensity.shape();
        let values = DMatrix::from_fn(m, n, |i, j| intensity[(m - 1 - i, n - 1 - j)].max(0.0).sqrt());
        Self::new(values, grid)
    }

    /// `|φ|` of a theoretical amplitude, in the same frequency order.
    pub fn from_joint_amplitude(amp: &JointAmplitude) -> Self {
        let (m, n) = amp.values.shape();
        let values = DMatrix::from_fn(m, n, |i, j| amp.values[(m - 1 - i, n - 1 - j)].norm());
        Self {
            values,
            grid: amp.grid,
        }
    }
}

/// `f_{m,n} = sqrt(R_{M−1−m, N−1−n} / T_{M−1−m})`.
///
/// The reversal maps ascending wavelength onto ascending frequency; negative
/// readings are clamped to zero first.
pub fn measurement_to_amplitude(rec: &MeasurementRecord) -> Result<AmplitudeMatrix> {
    let normalized = rec.normalized_intensity()?;
    AmplitudeMatrix::from_intensity(&normalized, rec.grid)
}

/// `R'_{m,n} = Σ_{k<b_x} Σ_{l<b_y} R_{k+b_x m, l+b_y n}`; partial trailing
/// bins are dropped.
pub fn bin_matrix(r: &DMatrix<f64>, bx: usize, by: usize) -> Result<DMatrix<f64>> {
    if bx == 0 || by == 0 {
        return Err(Error::InvalidInput(format!("bin sizes must be positive, got ({bx}, {by})")));
    }
    let (m, n) = r.shape();
    if bx > m || by > n {
        return Err(Error::InvalidInput(format!("bin ({bx}, {by}) exceeds matrix {m}x{n}")));
    }
    let (mo, no) = (m / bx, n / by);
    Ok(DMatrix::from_fn(mo, no, |i, j| {
        let mut s = 0.0;
        for k in 0..bx {
            for l in 0..by {
                s += r[(k + bx * i, l + by * j)];
            }
        }
        s
    }))
}

/// Remove all pixels within `frame_width_nm` of any edge.
pub fn crop_frame(r: &DMatrix<f64>, grid: &SpectralGrid, frame_width_nm: f64) -> Result<(DMatrix<f64>, SpectralGrid)> {
    if r.shape() != grid.shape() {
        return Err(Error::Validation("matrix and grid shapes differ".into()));
    }
    let (rows, cols) = grid.frame_ranges(frame_width_nm)?;
    let out = r.view((rows.start, cols.start), (rows.len(), cols.len())).into_owned();
    Ok((out, grid.sub_grid(rows, cols)))
}

/// Riemann sum `Σ JSD·Δω₁Δω₂` of a density sampled on `grid`.
pub fn total_intensity(jsd: &DMatrix<f64>, grid: &SpectralGrid) -> f64 {
    crate::spectral::jsa_sum(jsd) * grid.cell_weight()
}

/// Fraction of the recorded intensity that rises above the level found on
/// the outermost ring of pixels.
///
/// A window that contains the whole emission has an essentially dark border,
/// so this approaches one; pure background gives about zero.
pub fn measured_coverage(intensity: &DMatrix<f64>) -> Result<f64> {
    let (m, n) = intensity.shape();
    if m < 3 || n < 3 {
        return Err(Error::InvalidInput(format!("matrix {m}x{n} too small to estimate coverage")));
    }
    let clamp = |v: f64| v.max(0.0);
    let total: f64 = intensity.iter().map(|&v| clamp(v)).sum();
    if !(total > 0.0) {
        return Err(Error::Coverage("matrix carries no intensity".into()));
    }
    let mut ring = 0.0;
    let mut count = 0usize;
    for i in 0..m {
        for j in 0..n {
            if i == 0 || j == 0 || i == m - 1 || j == n - 1 {
                ring += clamp(intensity[(i, j)]);
                count += 1;
            }
        }
    }
    let floor = ring / count as f64;
    Ok((1.0 - floor * (m * n) as f64 / total).clamp(0.0, 1.0))
}

/// One conditioning step applied to the filter-normalized intensity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum PipelineStep {
    Crop { frame_nm: f64 },
    Bin { bx: usize, by: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub k_min: f64,
    /// Leading Schmidt coefficients of the modulus amplitude.
    pub coefficients: Vec<f64>,
    pub coverage: f64,
    pub coverage_ok: bool,
    pub grid: SpectralGrid,
    pub steps: Vec<PipelineStep>,
    pub warnings: Vec<String>,
}

/// Filter normalization, then each step in order, then `K_min`.
pub fn analyze_record(rec: &MeasurementRecord, steps: &[PipelineStep]) -> Result<AnalysisReport> {
    let mut warnings = Vec::new();
    if !rec.flagged.is_empty() {
        return Err(Error::Validation(format!(
            "seed steps {:?} have filter transmittance below the usable floor",
            rec.flagged
        )));
    }
    let mut intensity = rec.normalized_intensity()?;
    let mut grid = rec.grid;
    for step in steps {
        match *step {
            PipelineStep::Crop { frame_nm } => {
                let (r, g) = crop_frame(&intensity, &grid, frame_nm)?;
                intensity = r;
                grid = g;
            }
            PipelineStep::Bin { bx, by } => {
                intensity = bin_matrix(&intensity, bx, by)?;
                grid = grid.binned(bx, by);
            }
        }
    }
    let coverage = measured_coverage(&intensity)?;
    let coverage_ok = coverage >= COVERAGE_THRESHOLD;
    if !coverage_ok {
        warnings.push(format!(
            "coverage {coverage:.3} below {COVERAGE_THRESHOLD}: K_min is not a reliable bound"
        ));
    }
    let amp = AmplitudeMatrix::from_intensity(&intensity, grid)
        .map_err(|e| Error::Coverage(format!("no usable intensity after conditioning ({e})")))?;
    let k = k_min(&amp)?;
    let decomposition = schmidt_decompose(&amp.values)?;
    Ok(AnalysisReport {
        k_min: k,
        coefficients: decomposition.coefficients.into_iter().take(10).collect(),
        coverage,
        coverage_ok,
        grid,
        steps: steps.to_vec(),
        warnings,
    })
}
