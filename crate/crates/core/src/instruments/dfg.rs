//! Seeded difference-frequency sweep.
//!
//! For every seed wavelength the stimulated idler spectrum is
//! `2·|B|²·|γ|²·|φ(ω₁,ω₂)|²·δω₁` (seed photon number times the spontaneous
//! pair density), attenuated by the clean-up filter, blurred by the analyzer
//! response and read out with additive detection noise.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::config::InstrumentConfig;
use crate::error::{Error, Result};
use crate::schmidt::MeasurementRecord;
use crate::spectral::{Axis, JointAmplitude, SpectralGrid};
use crate::units;

/// Seed-step axis covering the signal window of `grid`.
fn seed_axis(grid: &SpectralGrid, step_nm: f64) -> Result<Axis> {
    let steps = grid.signal.span_nm() / step_nm;
    let count = (steps + 1e-6).floor() as usize + 1;
    if count < 2 {
        return Err(Error::InvalidInput(format!(
            "seed step {step_nm} nm does not sweep the {} nm signal window",
            grid.signal.span_nm()
        )));
    }
    Ok(Axis::new(grid.signal.start_nm, step_nm, count))
}

/// Normalized Gaussian kernel on a grid of `pitch_nm`; `None` when the
/// resolution is far below the pitch.
fn analyzer_kernel(resolution_nm: f64, pitch_nm: f64) -> Option<Vec<f64>> {
    let sigma = resolution_nm / units::gaussian_fwhm_per_sigma() / pitch_nm;
    if sigma < 1e-3 {
        return None;
    }
    let half = (5.0 * sigma).ceil() as i64;
    let raw: Vec<f64> = (-half..=half)
        .map(|k| (-0.5 * (k as f64 / sigma).powi(2)).exp())
        .collect();
    let norm: f64 = raw.iter().sum();
    Some(raw.into_iter().map(|w| w / norm).collect())
}

/// `|φ|²` along the idler axis at a signal wavelength, linearly interpolated
/// between grid rows (exact on the rows themselves).
fn density_row(jsd: &DMatrix<f64>, signal: &Axis, lambda_nm: f64) -> Vec<f64> {
    let pos = (lambda_nm - signal.start_nm) / signal.pitch_nm;
    let last = signal.count - 1;
    if pos < -1e-9 || pos > last as f64 + 1e-9 {
        return vec![0.0; jsd.ncols()];
    }
    // snap onto a row when the seed step matches the grid pitch
    let nearest = pos.round();
    if (pos - nearest).abs() < 1e-9 {
        return jsd.row((nearest as usize).min(last)).iter().copied().collect();
    }
    let lo = pos.floor() as usize;
    let t = pos - lo as f64;
    (0..jsd.ncols())
        .map(|n| jsd[(lo, n)] + t * (jsd[(lo + 1, n)] - jsd[(lo, n)]))
        .collect()
}

/// Linear interpolation of samples on `axis` at `lambda_nm`, snapping onto
/// grid points; zero outside the axis.
fn resample(values: &[f64], axis: &Axis, lambda_nm: f64) -> f64 {
    let pos = (lambda_nm - axis.start_nm) / axis.pitch_nm;
    let last = axis.count - 1;
    if pos < -1e-9 || pos > last as f64 + 1e-9 {
        return 0.0;
    }
    let nearest = pos.round();
    if (pos - nearest).abs() < 1e-9 {
        return values[(nearest as usize).min(last)];
    }
    let lo = pos.floor() as usize;
    let t = pos - lo as f64;
    values[lo] + t * (values[lo + 1] - values[lo])
}

fn convolve(column: &[f64], kernel: &[f64]) -> Vec<f64> {
    let half = (kernel.len() / 2) as i64;
    let n = column.len() as i64;
    (0..n)
        .map(|j| {
            kernel
                .iter()
                .enumerate()
                .filter_map(|(k, w)| {
                    let src = j + k as i64 - half;
                    (0..n).contains(&src).then(|| w * column[src as usize])
                })
                .sum()
        })
        .collect()
}

/// Simulate a full seed sweep over the amplitude window.
///
/// Seed steps follow `dfg_seed_step_nm` from the lower signal edge; the
/// analyzer records `dfg_analyzer_points` samples spanning the idler window.
/// Noise is drawn from a per-step random stream keyed on `(rng_seed, step)`.
pub fn simulate_dfg(amp: &JointAmplitude, cfg: &InstrumentConfig) -> Result<MeasurementRecord> {
    cfg.validate()?;
    let seeds = seed_axis(&amp.grid, cfg.dfg_seed_step_nm)?;
    let analyzer = Axis::spanning(amp.grid.idler.start_nm, amp.grid.idler.end_nm(), cfg.dfg_analyzer_points);
    let grid = SpectralGrid {
        signal: seeds,
        idler: analyzer,
        linearized: amp.grid.linearized,
    };

    let jsd = amp.jsd();
    let analyzer_nm = analyzer.wavelengths();
    let seed_bandwidth = units::omega_step_from_nm(seeds.center_nm(), seeds.pitch_nm);
    let kernel = analyzer_kernel(cfg.dfg_analyzer_resolution_nm, amp.grid.idler.pitch_nm);
    let noise = (cfg.noise_floor > 0.0)
        .then(|| Normal::new(0.0, cfg.noise_floor))
        .transpose()
        .map_err(|e| Error::InvalidInput(format!("noise: {e}")))?;

    let mut intensity = DMatrix::zeros(seeds.count, analyzer.count);
    let mut transmittance = Vec::with_capacity(seeds.count);
    let mut reference = Vec::with_capacity(seeds.count);
    for m in 0..seeds.count {
        let lambda = seeds.wavelength(m);
        let t = cfg.filter_transmittance(lambda);
        transmittance.push(t);
        reference.push(cfg.seed_power * t);

        // |φ|² along the idler axis at this seed wavelength
        let column = density_row(&jsd, &amp.grid.signal, lambda);
        let stimulated: Vec<f64> = column
            .iter()
            .map(|&p| 2.0 * cfg.seed_power * t * cfg.pair_probability * p * seed_bandwidth)
            .collect();
        let blurred = match &kernel {
            Some(k) => convolve(&stimulated, k),
            None => stimulated,
        };

        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
        rng.set_stream(m as u64 + 1);
        for (n, &x) in analyzer_nm.iter().enumerate() {
            let clean = resample(&blurred, &amp.grid.idler, x);
            let reading = match &noise {
                Some(d) => clean + d.sample(&mut rng),
                None => clean,
            };
            intensity[(m, n)] = reading.max(0.0);
        }
    }
    MeasurementRecord::new(grid, intensity, transmittance, reference)
}
