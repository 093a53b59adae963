use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units;

/// One wavelength axis: `start + i·pitch` for `i < count`, in nm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub start_nm: f64,
    pub pitch_nm: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(start_nm: f64, pitch_nm: f64, count: usize) -> Self {
        Self {
            start_nm,
            pitch_nm,
            count,
        }
    }

    /// Axis running from `start` to `end` inclusive with `count` samples.
    pub fn spanning(start_nm: f64, end_nm: f64, count: usize) -> Self {
        let pitch = (end_nm - start_nm) / (count.max(2) - 1) as f64;
        Self::new(start_nm, pitch, count)
    }

    pub fn wavelength(&self, i: usize) -> f64 {
        self.start_nm + i as f64 * self.pitch_nm
    }

    pub fn end_nm(&self) -> f64 {
        self.wavelength(self.count.saturating_sub(1))
    }

    pub fn span_nm(&self) -> f64 {
        self.end_nm() - self.start_nm
    }

    pub fn center_nm(&self) -> f64 {
        0.5 * (self.start_nm + self.end_nm())
    }

    pub fn wavelengths(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.wavelength(i)).collect()
    }

    fn validate(&self, name: &str) -> Result<()> {
        if !(self.start_nm.is_finite() && self.start_nm > 0.0) {
            return Err(Error::InvalidInput(format!("{name} start must be > 0, got {}", self.start_nm)));
        }
        if !(self.pitch_nm.is_finite() && self.pitch_nm > 0.0) {
            return Err(Error::InvalidInput(format!("{name} pitch must be > 0, got {}", self.pitch_nm)));
        }
        if self.count < 2 {
            return Err(Error::InvalidInput(format!("{name} needs at least 2 samples, got {}", self.count)));
        }
        Ok(())
    }
}

/// Rectangular wavelength grid: axis 1 is the signal (TE), axis 2 the idler
/// (TM), both ascending in wavelength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    pub signal: Axis,
    pub idler: Axis,
    /// When set, frequencies follow the affine map about each axis center;
    /// otherwise `ω = 2πc/λ` exactly.
    #[serde(default = "default_linearized")]
    pub linearized: bool,
}

fn default_linearized() -> bool {
    true
}

/// Largest span/center ratio accepted for a linearized axis.
const MAX_RELATIVE_SPAN: f64 = 0.01;

impl SpectralGrid {
    pub fn new(signal: Axis, idler: Axis) -> Self {
        Self {
            signal,
            idler,
            linearized: true,
        }
    }

    /// 141 × 501 window over [1511.4, 1512.8] × [1523.8, 1525.2] nm
    /// (10 pm × 2.8 pm pitch), the seed-sweep/OSA sampling of the DFG record.
    pub fn dfg_window() -> Self {
        Self::new(Axis::new(1511.4, 0.01, 141), Axis::new(1523.8, 0.0028, 501))
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.signal.count, self.idler.count)
    }

    pub fn validate(&self) -> Result<()> {
        self.signal.validate("signal axis")?;
        self.idler.validate("idler axis")?;
        if self.linearized {
            for (name, axis) in [("signal", &self.signal), ("idler", &self.idler)] {
                let rel = axis.span_nm() / axis.center_nm();
                if rel > MAX_RELATIVE_SPAN {
                    return Err(Error::InvalidInput(format!(
                        "{name} window spans {:.3}% of its center wavelength; too wide for the affine frequency map",
                        100.0 * rel
                    )));
                }
            }
        }
        Ok(())
    }

    fn omega(&self, axis: &Axis, i: usize) -> f64 {
        let lambda = axis.wavelength(i);
        if self.linearized {
            let center = axis.center_nm();
            units::omega_from_nm(center) - units::omega_step_from_nm(center, lambda - center)
        } else {
            units::omega_from_nm(lambda)
        }
    }

    pub fn signal_omega(&self, m: usize) -> f64 {
        self.omega(&self.signal, m)
    }

    pub fn idler_omega(&self, n: usize) -> f64 {
        self.omega(&self.idler, n)
    }

    /// Frequency step `Δω₁` of the signal axis (magnitude).
    pub fn signal_omega_step(&self) -> f64 {
        units::omega_step_from_nm(self.signal.center_nm(), self.signal.pitch_nm)
    }

    pub fn idler_omega_step(&self) -> f64 {
        units::omega_step_from_nm(self.idler.center_nm(), self.idler.pitch_nm)
    }

    /// Area element `Δω₁·Δω₂` of the Riemann sums.
    pub fn cell_weight(&self) -> f64 {
        self.signal_omega_step() * self.idler_omega_step()
    }

    /// Index ranges kept after removing a frame of `width_nm` on every edge.
    pub fn frame_ranges(&self, width_nm: f64) -> Result<(std::ops::Range<usize>, std::ops::Range<usize>)> {
        if !(width_nm >= 0.0 && width_nm.is_finite()) {
            return Err(Error::InvalidInput(format!("frame width must be ≥ 0, got {width_nm}")));
        }
        let keep = |axis: &Axis, name: &str| -> Result<std::ops::Range<usize>> {
            if width_nm + 1e-6 * axis.pitch_nm >= 0.5 * axis.span_nm() {
                return Err(Error::InvalidInput(format!(
                    "frame width {width_nm} nm is not less than half of the {name} span {} nm",
                    axis.span_nm()
                )));
            }
            // tolerance against pitch round-off in the wavelength arithmetic
            let eps = 1e-6 * axis.pitch_nm;
            let lo = axis.start_nm + width_nm - eps;
            let hi = axis.end_nm() - width_nm + eps;
            let first = (0..axis.count).find(|&i| axis.wavelength(i) >= lo).unwrap_or(axis.count);
            let last = (0..axis.count).rev().find(|&i| axis.wavelength(i) <= hi).unwrap_or(0);
            if first > last {
                return Err(Error::InvalidInput(format!("frame removes the whole {name} axis")));
            }
            Ok(first..last + 1)
        };
        Ok((keep(&self.signal, "signal")?, keep(&self.idler, "idler")?))
    }

    /// Sub-grid over the given index ranges.
    pub fn sub_grid(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        Self {
            signal: Axis::new(self.signal.wavelength(rows.start), self.signal.pitch_nm, rows.len()),
            idler: Axis::new(self.idler.wavelength(cols.start), self.idler.pitch_nm, cols.len()),
            linearized: self.linearized,
        }
    }

    /// Grid after `b_x × b_y` binning; each bin sits at the centroid of its
    /// source pixels.
    pub fn binned(&self, bx: usize, by: usize) -> Self {
        let bin = |axis: &Axis, b: usize| {
            Axis::new(
                axis.start_nm + 0.5 * (b as f64 - 1.0) * axis.pitch_nm,
                axis.pitch_nm * b as f64,
                axis.count / b,
            )
        };
        Self {
            signal: bin(&self.signal, bx),
            idler: bin(&self.idler, by),
            linearized: self.linearized,
        }
    }
}
