//! Fiber-spectrometer coincidence histogram.
//!
//! Each photon's wavelength is mapped onto an arrival time through the
//! dispersion of the compensating fiber, smeared by the timing jitter, and
//! digitized by the time-to-digital converter.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal};

use super::config::InstrumentConfig;
use crate::error::{Error, Result};
use crate::spectral::{Axis, JointAmplitude, SpectralGrid};
use crate::units::gaussian_fwhm_per_sigma;

/// Spectral resolution `sqrt(τ_PP² + τ_APD² + τ_TDC²)/|D|` in nm.
pub fn spdc_resolution(cfg: &InstrumentConfig) -> f64 {
    let t = cfg.jitter_pulse_picker_ps.hypot(cfg.jitter_detector_ps).hypot(cfg.tdc_bin_ps);
    t / cfg.dispersion_ps_per_nm.abs()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceHistogram {
    pub grid: SpectralGrid,
    pub counts: DMatrix<u64>,
    pub pulses_simulated: u64,
    /// Pairs generated before detection losses.
    pub pairs_emitted: u64,
    /// Pairs with both photons detected.
    pub pairs_detected: u64,
    /// Detected pairs whose digitized arrival fell outside the histogram.
    pub out_of_window: u64,
}

impl CoincidenceHistogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn as_f64(&self) -> DMatrix<f64> {
        self.counts.map(|c| c as f64)
    }
}

/// Inverse-CDF sampler over the flattened (row-major) density.
struct PixelSampler {
    cdf: Vec<f64>,
    cols: usize,
}

impl PixelSampler {
    fn new(jsd: &DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = jsd.shape();
        let mut cdf = Vec::with_capacity(rows * cols);
        let mut acc = 0.0;
        for i in 0..rows {
            for j in 0..cols {
                acc += jsd[(i, j)];
                cdf.push(acc);
            }
        }
        if !(acc > 0.0) {
            return Err(Error::InvalidInput("joint spectral density is empty".into()));
        }
        cdf.iter_mut().for_each(|c| *c /= acc);
        Ok(Self { cdf, cols })
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> (usize, usize) {
        let u: f64 = rng.random();
        let k = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        (k / self.cols, k % self.cols)
    }
}

/// Histogram grid: `spdc_bins` bins of width `τ_TDC/|D|`, starting at the
/// amplitude window's lower edges.
fn histogram_grid(amp: &SpectralGrid, cfg: &InstrumentConfig) -> SpectralGrid {
    let pitch = cfg.spdc_pitch_nm();
    SpectralGrid {
        signal: Axis::new(amp.signal.start_nm + 0.5 * pitch, pitch, cfg.spdc_bins),
        idler: Axis::new(amp.idler.start_nm + 0.5 * pitch, pitch, cfg.spdc_bins),
        linearized: amp.linearized,
    }
}

/// Monte-Carlo coincidence acquisition over `pulses` pump pulses.
///
/// The number of emitted pairs is drawn as one binomial variate (equivalent
/// to a Bernoulli trial per pulse, at most one pair each). Every pair lands
/// on a pixel of the amplitude grid, is kept if both photons are detected,
/// and is then delayed, jittered and digitized. Deterministic in
/// `cfg.rng_seed`.
pub fn simulate_spdc(amp: &JointAmplitude, cfg: &InstrumentConfig, pulses: u64) -> Result<CoincidenceHistogram> {
    cfg.validate()?;
    if !(cfg.tdc_bin_ps > 0.0) {
        return Err(Error::InvalidInput("tdc_bin_ps must be > 0 to digitize arrival times".into()));
    }
    let coverage = amp.total_intensity();
    if coverage < crate::schmidt::COVERAGE_THRESHOLD {
        return Err(Error::Coverage(format!(
            "amplitude carries {coverage:.3} of its normalization on this grid"
        )));
    }
    let grid = histogram_grid(&amp.grid, cfg);
    let bins = cfg.spdc_bins;
    let mut counts = DMatrix::<u64>::zeros(bins, bins);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);

    let emitted = if pulses == 0 || cfg.pair_probability == 0.0 {
        0
    } else {
        Binomial::new(pulses, cfg.pair_probability)
            .map_err(|e| Error::InvalidInput(format!("pair statistics: {e}")))?
            .sample(&mut rng)
    };

    let sampler = PixelSampler::new(&amp.jsd())?;
    let dispersion = cfg.dispersion_ps_per_nm.abs();
    let sigma = cfg.timing_jitter_fwhm_ps() / gaussian_fwhm_per_sigma();
    let jitter = Normal::new(0.0, sigma).map_err(|e| Error::InvalidInput(format!("jitter: {e}")))?;
    let digitize = |offset_nm: f64, noise_ps: f64| -> Option<usize> {
        let t = offset_nm * dispersion + noise_ps;
        let b = (t / cfg.tdc_bin_ps).floor();
        (b >= 0.0 && b < bins as f64).then_some(b as usize)
    };

    let mut detected = 0u64;
    let mut outside = 0u64;
    for _ in 0..emitted {
        let s_ok = rng.random::<f64>() < cfg.detection_efficiency_signal;
        let i_ok = rng.random::<f64>() < cfg.detection_efficiency_idler;
        if !(s_ok && i_ok) {
            continue;
        }
        detected += 1;
        let (m, n) = sampler.sample(&mut rng);
        let js = jitter.sample(&mut rng);
        let ji = jitter.sample(&mut rng);
        let ds = amp.grid.signal.wavelength(m) - amp.grid.signal.start_nm;
        let di = amp.grid.idler.wavelength(n) - amp.grid.idler.start_nm;
        match (digitize(ds, js), digitize(di, ji)) {
            (Some(a), Some(b)) => counts[(a, b)] += 1,
            _ => outside += 1,
        }
    }

    Ok(CoincidenceHistogram {
        grid,
        counts,
        pulses_simulated: pulses,
        pairs_emitted: emitted,
        pairs_detected: detected,
        out_of_window: outside,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{assemble_jsa, PhaseMode, SourceModel};

    fn amp() -> JointAmplitude {
        let grid = SpectralGrid::new(Axis::new(1511.4, 0.02, 71), Axis::new(1523.8, 0.02, 71));
        assemble_jsa(&SourceModel::default(), &grid, PhaseMode::FullPhase).unwrap()
    }

    #[test]
    fn resolution_formula() {
        let cfg = InstrumentConfig::default();
        assert!((spdc_resolution(&cfg) - 0.223_894_1).abs() < 1e-6);
        let zero = InstrumentConfig {
            jitter_pulse_picker_ps: 0.0,
            jitter_detector_ps: 0.0,
            tdc_bin_ps: 0.0,
            ..cfg
        };
        assert_eq!(spdc_resolution(&zero), 0.0);
    }

    #[test]
    fn no_pairs_without_pair_probability() {
        let cfg = InstrumentConfig {
            pair_probability: 0.0,
            ..Default::default()
        };
        let h = simulate_spdc(&amp(), &cfg, 1_000_000).unwrap();
        assert_eq!(h.total(), 0);
        let h = simulate_spdc(&amp(), &InstrumentConfig::default(), 0).unwrap();
        assert_eq!(h.total(), 0);
        assert_eq!(h.pulses_simulated, 0);
    }

    #[test]
    fn bookkeeping_is_consistent() {
        let cfg = InstrumentConfig {
            pair_probability: 0.01,
            ..Default::default()
        };
        let h = simulate_spdc(&amp(), &cfg, 2_000_000).unwrap();
        assert!(h.total() <= h.pulses_simulated);
        assert_eq!(h.total() + h.out_of_window, h.pairs_detected);
        assert!(h.pairs_detected <= h.pairs_emitted);
        let rows: u64 = h.counts.row_iter().map(|r| r.iter().sum::<u64>()).sum();
        let cols: u64 = h.counts.column_iter().map(|c| c.iter().sum::<u64>()).sum();
        assert_eq!(rows, h.total());
        assert_eq!(cols, h.total());
    }

    #[test]
    fn same_seed_same_histogram() {
        let cfg = InstrumentConfig {
            pair_probability: 0.01,
            ..Default::default()
        };
        let a = simulate_spdc(&amp(), &cfg, 500_000).unwrap();
        let b = simulate_spdc(&amp(), &cfg, 500_000).unwrap();
        assert_eq!(a, b);
        let c = simulate_spdc(&amp(), &InstrumentConfig { rng_seed: 7, ..cfg }, 500_000).unwrap();
        assert_ne!(a.counts, c.counts);
    }
}
