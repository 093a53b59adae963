//! Detection of the facet Fabry–Perot fringes in a 1-D spectral profile.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FringeAnalysis {
    /// Period with the strongest relative modulation in the scanned band, nm.
    pub dominant_period_nm: f64,
    /// Relative modulation amplitude at the dominant period.
    pub dominant_amplitude: f64,
    /// Relative modulation amplitude at the probe period.
    pub amplitude_at_probe: f64,
    /// Normalized autocorrelation of the residual at the lag closest to the probe period.
    pub autocorrelation_at_probe: f64,
    /// Samples used (those above the profile threshold).
    pub samples: usize,
}

/// Fraction of the profile maximum kept for the fit.
const PROFILE_THRESHOLD: f64 = 0.05;
const TREND_DEGREE: usize = 4;

/// Row and column of `m` through its maximum: the profile along the idler
/// axis (fixed signal index) and along the signal axis (fixed idler index).
pub fn peak_slices(m: &DMatrix<f64>) -> (Vec<f64>, Vec<f64>) {
    let (mut bi, mut bj, mut best) = (0, 0, f64::NEG_INFINITY);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if m[(i, j)] > best {
                best = m[(i, j)];
                bi = i;
                bj = j;
            }
        }
    }
    let along_idler = m.row(bi).iter().copied().collect();
    let along_signal = m.column(bj).iter().copied().collect();
    (along_signal, along_idler)
}

/// Divide out a smooth log-polynomial trend and look for periodic modulation.
///
/// Periods in `[period_min_nm, period_max_nm]` are scanned with a direct
/// Fourier sum over the residual; `probe_period_nm` (typically the facet
/// free spectral range) is reported separately.
pub fn fringe_analysis(
    profile: &[f64],
    pitch_nm: f64,
    probe_period_nm: f64,
    period_min_nm: f64,
    period_max_nm: f64,
) -> Result<FringeAnalysis> {
    let peak = profile.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(peak > 0.0) {
        return Err(Error::InvalidInput("profile has no positive samples".into()));
    }
    let argmax = profile.iter().position(|&v| v == peak).unwrap_or(0);
    let mut lo = argmax;
    while lo > 0 && profile[lo - 1] >= PROFILE_THRESHOLD * peak {
        lo -= 1;
    }
    let mut hi = argmax;
    while hi + 1 < profile.len() && profile[hi + 1] >= PROFILE_THRESHOLD * peak {
        hi += 1;
    }
    let n = hi - lo + 1;
    if n < TREND_DEGREE + 3 {
        return Err(Error::InvalidInput(format!("only {n} samples above threshold")));
    }
    let xs: Vec<f64> = (lo..=hi).map(|i| i as f64 * pitch_nm).collect();
    let x0 = xs[n / 2];
    let scale = (xs[n - 1] - xs[0]).max(f64::MIN_POSITIVE);
    let ys: Vec<f64> = profile[lo..=hi].iter().map(|&v| v.max(1e-12 * peak).ln()).collect();

    let design = DMatrix::from_fn(n, TREND_DEGREE + 1, |i, k| ((xs[i] - x0) / scale).powi(k as i32));
    let coeffs = design
        .clone()
        .svd(true, true)
        .solve(&DVector::from_vec(ys.clone()), 1e-12)
        .map_err(|e| Error::Numerical(format!("trend fit: {e}")))?;
    let trend = &design * coeffs;
    let residual: Vec<f64> = (0..n).map(|i| (ys[i] - trend[i]).exp() - 1.0).collect();

    let amplitude = |period: f64| -> f64 {
        let (mut c, mut s) = (0.0, 0.0);
        for (x, r) in xs.iter().zip(&residual) {
            let phase = 2.0 * std::f64::consts::PI * x / period;
            c += r * phase.cos();
            s += r * phase.sin();
        }
        2.0 * c.hypot(s) / n as f64
    };
    let steps = 400;
    let (mut best_p, mut best_a) = (period_min_nm, f64::NEG_INFINITY);
    for k in 0..=steps {
        let p = period_min_nm + (period_max_nm - period_min_nm) * k as f64 / steps as f64;
        let a = amplitude(p);
        if a > best_a {
            best_a = a;
            best_p = p;
        }
    }

    let lag = (probe_period_nm / pitch_nm).round().max(1.0) as usize;
    let var: f64 = residual.iter().map(|r| r * r).sum::<f64>() / n as f64;
    let autocorrelation = if lag < n && var > 0.0 {
        let cov: f64 = (0..n - lag).map(|i| residual[i] * residual[i + lag]).sum::<f64>() / (n - lag) as f64;
        cov / var
    } else {
        0.0
    };

    Ok(FringeAnalysis {
        dominant_period_nm: best_p,
        dominant_amplitude: best_a,
        amplitude_at_probe: amplitude(probe_period_nm),
        autocorrelation_at_probe: autocorrelation,
        samples: n,
    })
}
