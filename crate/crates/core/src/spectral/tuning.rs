//! Central signal/idler wavelengths as a function of pump incidence angle.

use serde::{Deserialize, Serialize};

use super::source::SourceModel;
use crate::error::{Error, Result};
use crate::units;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuningPoint {
    pub theta_rad: f64,
    pub signal_nm: f64,
    pub idler_nm: f64,
}

/// Telecom window searched for a root, nm.
const WINDOW_NM: (f64, f64) = (1200.0, 2000.0);

/// Solve `Δk(ω₁, ω₂, θ) = 0` together with `ω₁ + ω₂ = ω_p`.
///
/// Constant indices give the closed form
/// `ω₁ = ω_p·(sinθ + n_TM)/(n_TE + n_TM)`; dispersive indices are handled by
/// bisection on the residual.
pub fn tuning_curve(model: &SourceModel, theta: f64) -> Result<TuningPoint> {
    model.validate()?;
    if !(theta.is_finite() && theta.abs() < std::f64::consts::FRAC_PI_2) {
        return Err(Error::Domain(format!("angle {theta} outside (-π/2, π/2)")));
    }
    let wp = model.pump_omega();
    let w1 = if model.is_dispersive() {
        solve_dispersive(model, theta)?
    } else {
        wp * (theta.sin() + model.n_tm) / (model.n_te + model.n_tm)
    };
    let w2 = wp - w1;
    let point = TuningPoint {
        theta_rad: theta,
        signal_nm: units::nm_from_omega(w1),
        idler_nm: units::nm_from_omega(w2),
    };
    for lam in [point.signal_nm, point.idler_nm] {
        if !(WINDOW_NM.0..=WINDOW_NM.1).contains(&lam) {
            return Err(Error::OutOfRange(format!(
                "phase-matched wavelength {lam:.3} nm at θ = {theta} rad lies outside [{}, {}] nm",
                WINDOW_NM.0, WINDOW_NM.1
            )));
        }
    }
    Ok(point)
}

fn solve_dispersive(model: &SourceModel, theta: f64) -> Result<f64> {
    let wp = model.pump_omega();
    let residual = |w1: f64| model.delta_k(w1, wp - w1, theta);
    let target = 1e-6 * 2.0 * std::f64::consts::PI / model.length_m();
    // ω₁ bracket from the wavelength window, clipped so ω₂ stays in it as well
    let lo = units::omega_from_nm(WINDOW_NM.1).max(wp - units::omega_from_nm(WINDOW_NM.0));
    let hi = units::omega_from_nm(WINDOW_NM.0).min(wp - units::omega_from_nm(WINDOW_NM.1));
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (residual(a)?, residual(b)?);
    if fa.signum() == fb.signum() {
        return Err(Error::OutOfRange(format!(
            "no phase-matching root in the telecom window at θ = {theta} rad"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let fm = residual(mid)?;
        if fm.abs() < target || (b - a) <= 4.0 * f64::EPSILON * mid {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Err(Error::Numerical("tuning-curve bisection did not converge".into()))
}

/// Tuning curve sampled at `steps` evenly spaced angles (inclusive).
pub fn tuning_table(model: &SourceModel, theta_min: f64, theta_max: f64, steps: usize) -> Result<Vec<TuningPoint>> {
    if steps == 0 {
        return Err(Error::InvalidInput("steps must be positive".into()));
    }
    (0..steps)
        .map(|i| {
            let t = if steps == 1 {
                theta_min
            } else {
                theta_min + (theta_max - theta_min) * i as f64 / (steps - 1) as f64
            };
            tuning_curve(model, t)
        })
        .collect()
}
