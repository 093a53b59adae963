//! Physical constants and wavelength/frequency conversions.
//!
//! Wavelengths are carried in nanometres at API boundaries, angular
//! frequencies in rad/s, and lengths inside the physics in metres.

use std::f64::consts::PI;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub const NM: f64 = 1e-9;
pub const MM: f64 = 1e-3;

/// `ω = 2πc/λ` for a wavelength in nm.
pub fn omega_from_nm(lambda_nm: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / (lambda_nm * NM)
}

/// Inverse of [`omega_from_nm`].
pub fn nm_from_omega(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / omega / NM
}

/// Magnitude of `dω/dλ` at `lambda_nm`, for a wavelength step in nm.
///
/// `2πc·Δλ/λ²`; the affine map used for narrow spectral windows.
pub fn omega_step_from_nm(lambda_nm: f64, step_nm: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT * (step_nm * NM) / (lambda_nm * NM).powi(2)
}

pub fn deg_to_rad(deg: f64) -> f64 {
    deg.to_radians()
}

/// FWHM of a Gaussian with standard deviation 1: `sqrt(8 ln 2)`.
pub fn gaussian_fwhm_per_sigma() -> f64 {
    (8.0 * std::f64::consts::LN_2).sqrt()
}
