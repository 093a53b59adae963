use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::SpectralGrid;
use super::source::{Polarization, SourceModel};
use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;

/// How the cavity and pump factors enter the amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseMode {
    /// Complex minimal-phase cavity amplitudes.
    FullPhase,
    /// Every factor replaced by its modulus.
    ModulusOnly,
}

/// Peak amplitude (relative to the largest possible value) below which the
/// window is considered to miss the emission entirely.
const EMISSION_FLOOR: f64 = 1e-6;

/// Normalized biphoton amplitude `φ(ω₁, ω₂)` sampled on a wavelength grid.
///
/// Row `m` follows the signal axis, column `n` the idler axis, both in
/// ascending wavelength. `Σ|φ|²·Δω₁Δω₂ = 1` over the grid after assembly.
#[derive(Debug, Clone, PartialEq)]
pub struct JointAmplitude {
    pub grid: SpectralGrid,
    pub values: DMatrix<Complex64>,
    pub weight: f64,
}

impl JointAmplitude {
    pub fn new(grid: SpectralGrid, values: DMatrix<Complex64>) -> Result<Self> {
        let (m, n) = grid.shape();
        if values.shape() != (m, n) {
            return Err(Error::Validation(format!(
                "amplitude is {}x{} but grid is {m}x{n}",
                values.nrows(),
                values.ncols()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Numerical("amplitude has non-finite entries".into()));
        }
        Ok(Self {
            weight: grid.cell_weight(),
            grid,
            values,
        })
    }

    /// Joint spectral density `|φ|²`.
    pub fn jsd(&self) -> DMatrix<f64> {
        self.values.map(|v| v.norm_sqr())
    }

    pub fn modulus(&self) -> DMatrix<f64> {
        self.values.map(|v| v.norm())
    }

    /// `Σ|φ|²·Δω₁Δω₂` in fixed row-major pairwise order.
    pub fn total_intensity(&self) -> f64 {
        sum_row_major(&self.jsd()) * self.weight
    }

    /// Rescale so the Riemann sum of `|φ|²` is one.
    pub fn normalize(&mut self) -> Result<()> {
        let total = self.total_intensity();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::ModelGridMismatch(format!(
                "cannot normalize an amplitude with total intensity {total}"
            )));
        }
        let scale = 1.0 / total.sqrt();
        self.values.iter_mut().for_each(|v| *v *= scale);
        Ok(())
    }

    /// Remove a frame of `width_nm` on every edge, without renormalizing.
    pub fn crop(&self, width_nm: f64) -> Result<Self> {
        let (rows, cols) = self.grid.frame_ranges(width_nm)?;
        let values = self
            .values
            .view((rows.start, cols.start), (rows.len(), cols.len()))
            .into_owned();
        Ok(Self {
            grid: self.grid.sub_grid(rows, cols),
            values,
            weight: self.weight,
        })
    }
}

/// Row-major pairwise sum of a real matrix.
pub fn sum_row_major(m: &DMatrix<f64>) -> f64 {
    let flat: Vec<f64> = m.transpose().as_slice().to_vec();
    pairwise_sum(&flat)
}

fn pixel(model: &SourceModel, w1: f64, w2: f64, mode: PhaseMode) -> Result<Complex64> {
    let ws = w1 + w2;
    let pump = model.pump_amplitude(ws)?;
    let pm = model.phase_matching(w1, w2)?;
    let cav = model.microcavity_amplitude(ws);
    let te = model.facet_amplitude(Polarization::Te, w1);
    let tm = model.facet_amplitude(Polarization::Tm, w2);
    Ok(match mode {
        PhaseMode::FullPhase => pump * pm * cav * te * tm,
        PhaseMode::ModulusOnly => {
            Complex64::new(pump.norm() * pm.norm() * cav.norm() * te.norm() * tm.norm(), 0.0)
        }
    })
}

/// Evaluate and normalize `α_p(ω₁+ω₂)·Φ(ω₁,ω₂)·t_M(ω₁+ω₂)·t_TE(ω₁)·t_TM(ω₂)`
/// on every grid pixel.
///
/// Pixels are independent, so rows are computed in parallel; the result does
/// not depend on the thread schedule.
pub fn assemble_jsa(model: &SourceModel, grid: &SpectralGrid, mode: PhaseMode) -> Result<JointAmplitude> {
    model.validate()?;
    grid.validate()?;
    let (m, n) = grid.shape();
    let rows: Vec<Vec<Complex64>> = (0..m)
        .into_par_iter()
        .map(|i| {
            let w1 = grid.signal_omega(i);
            (0..n)
                .map(|j| pixel(model, w1, grid.idler_omega(j), mode))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let values = DMatrix::from_fn(m, n, |i, j| rows[i][j]);

    // largest attainable modulus is Φ(0); every other factor peaks at one
    let ceiling = model.phase_matching_at(0.0)?.norm();
    let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if !(peak > EMISSION_FLOOR * ceiling) {
        return Err(Error::ModelGridMismatch(format!(
            "grid [{:.3}, {:.3}] x [{:.3}, {:.3}] nm misses the emission (peak amplitude {:.2e} of maximum)",
            grid.signal.start_nm,
            grid.signal.end_nm(),
            grid.idler.start_nm,
            grid.idler.end_nm(),
            peak / ceiling
        )));
    }
    let mut amp = JointAmplitude::new(*grid, values)?;
    amp.normalize()?;
    Ok(amp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Axis;

    fn small_grid() -> SpectralGrid {
        SpectralGrid::new(Axis::new(1511.4, 0.05, 29), Axis::new(1523.8, 0.05, 29))
    }

    #[test]
    fn normalized_after_assembly() {
        let amp = assemble_jsa(&SourceModel::default(), &small_grid(), PhaseMode::FullPhase).unwrap();
        assert!((amp.total_intensity() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn modulus_modes_agree() {
        let model = SourceModel::default();
        let full = assemble_jsa(&model, &small_grid(), PhaseMode::FullPhase).unwrap();
        let modulus = assemble_jsa(&model, &small_grid(), PhaseMode::ModulusOnly).unwrap();
        for (a, b) in full.values.iter().zip(modulus.values.iter()) {
            assert!((a.norm() - b.norm()).abs() < 1e-12 * b.norm().max(1e-300) + 1e-300);
            assert_eq!(b.im, 0.0);
        }
    }

    #[test]
    fn grid_far_from_emission_is_rejected() {
        let grid = SpectralGrid::new(Axis::new(1400.0, 0.05, 10), Axis::new(1400.0, 0.05, 10));
        let err = assemble_jsa(&SourceModel::default(), &grid, PhaseMode::FullPhase).unwrap_err();
        assert!(matches!(err, Error::ModelGridMismatch(_)), "{err}");
    }

    #[test]
    fn crop_keeps_weight_and_values() {
        let amp = assemble_jsa(&SourceModel::default(), &small_grid(), PhaseMode::FullPhase).unwrap();
        let c = amp.crop(0.1).unwrap();
        assert_eq!(c.values.shape(), (25, 25));
        assert_eq!(c.values[(0, 0)], amp.values[(2, 2)]);
        assert!(c.total_intensity() < 1.0);
    }
}
