use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::spectral::SpectralGrid;

/// Raw seed-sweep data: one analyzer spectrum per seed wavelength.
///
/// `intensity[(m, n)]` is the analyzer reading at idler sample `n` with the
/// seed at signal step `m`; `transmittance[m]` is the clean-up filter
/// transmission at that step and `reference_power[m]` the transmitted seed
/// power monitor.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub grid: SpectralGrid,
    pub intensity: DMatrix<f64>,
    pub transmittance: Vec<f64>,
    pub reference_power: Vec<f64>,
    /// Seed steps whose transmittance underflowed.
    pub flagged: Vec<usize>,
}

/// Transmittance below which a column is flagged as unusable.
pub const TRANSMITTANCE_FLOOR: f64 = 1e-6;

impl MeasurementRecord {
    pub fn new(
        grid: SpectralGrid,
        intensity: DMatrix<f64>,
        transmittance: Vec<f64>,
        reference_power: Vec<f64>,
    ) -> Result<Self> {
        let (m, n) = grid.shape();
        if intensity.shape() != (m, n) {
            return Err(Error::Validation(format!(
                "intensity matrix is {}x{} but grid is {m}x{n}",
                intensity.nrows(),
                intensity.ncols()
            )));
        }
        if transmittance.len() != m || reference_power.len() != m {
            return Err(Error::Validation(format!(
                "filter vectors have {} / {} entries, expected {m} (one per seed step)",
                transmittance.len(),
                reference_power.len()
            )));
        }
        if intensity.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("intensity matrix has non-finite entries".into()));
        }
        let flagged = transmittance
            .iter()
            .enumerate()
            .filter(|(_, &t)| !(t >= TRANSMITTANCE_FLOOR))
            .map(|(i, _)| i)
            .collect();
        Ok(Self {
            grid,
            intensity,
            transmittance,
            reference_power,
            flagged,
        })
    }

    /// `R_{m,n}/T_m` with negative readings clamped to zero.
    pub fn normalized_intensity(&self) -> Result<DMatrix<f64>> {
        for (m, &t) in self.transmittance.iter().enumerate() {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Division { column: m, value: t });
            }
        }
        Ok(DMatrix::from_fn(self.intensity.nrows(), self.intensity.ncols(), |m, n| {
            self.intensity[(m, n)].max(0.0) / self.transmittance[m]
        }))
    }

    /// Drop a frame of `width_nm` from every edge, keeping the filter
    /// vectors aligned with the remaining seed steps.
    pub fn crop(&self, width_nm: f64) -> Result<Self> {
        let (rows, cols) = self.grid.frame_ranges(width_nm)?;
        let intensity = self
            .intensity
            .view((rows.start, cols.start), (rows.len(), cols.len()))
            .into_owned();
        Self::new(
            self.grid.sub_grid(rows.clone(), cols),
            intensity,
            self.transmittance[rows.clone()].to_vec(),
            self.reference_power[rows].to_vec(),
        )
    }

    /// Same record with every reading multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            intensity: &self.intensity * factor,
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_underflowing_columns() {
        let grid = SpectralGrid::new(
            crate::spectral::Axis::new(1511.0, 0.1, 3),
            crate::spectral::Axis::new(1524.0, 0.1, 2),
        );
        let r = MeasurementRecord::new(grid, DMatrix::from_element(3, 2, 1.0), vec![1.0, 1e-9, 0.5], vec![1.0; 3])
            .unwrap();
        assert_eq!(r.flagged, vec![1]);
    }

    #[test]
    fn zero_transmittance_names_the_column() {
        let grid = SpectralGrid::new(
            crate::spectral::Axis::new(1511.0, 0.1, 3),
            crate::spectral::Axis::new(1524.0, 0.1, 2),
        );
        let r = MeasurementRecord::new(grid, DMatrix::from_element(3, 2, 1.0), vec![1.0, 0.3, 0.0], vec![1.0; 3])
            .unwrap();
        match r.normalized_intensity() {
            Err(Error::Division { column, .. }) => assert_eq!(column, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn shape_mismatch_is_validation_error() {
        let grid = SpectralGrid::dfg_window();
        let e = MeasurementRecord::new(grid, DMatrix::zeros(141, 501), vec![1.0; 140], vec![1.0; 141]);
        assert!(matches!(e, Err(Error::Validation(_))));
    }
}
