//! Individual factors of the joint spectral amplitude.

use num_complex::Complex64;

use super::source::{Polarization, SourceModel};
use crate::error::{Error, Result};
use crate::numeric::quadrature;
use crate::units::SPEED_OF_LIGHT;

/// Relative tolerance of the phase-matching quadrature.
pub const PHASE_MATCHING_TOL: f64 = 1e-10;
const MAX_INTERVALS: usize = 4096;

fn check_omega(name: &str, omega: f64) -> Result<()> {
    if !omega.is_finite() {
        return Err(Error::Domain(format!("{name} is not finite: {omega}")));
    }
    if omega <= 0.0 {
        return Err(Error::Domain(format!("{name} must be positive: {omega}")));
    }
    Ok(())
}

/// Coefficient `F = 4R/(1-R)` multiplying `sin²` in the facet response.
pub fn finesse_coefficient(reflectivity: f64) -> f64 {
    4.0 * reflectivity / (1.0 - reflectivity)
}

/// Mirror amplitude `r` such that `|(1-r)/(1-r·e^{iδ})|² = 1/(1+F·sin²(δ/2))`
/// with `F = 4R/(1-R)`.
///
/// The two-beam Airy form has coefficient `4r/(1-r)²`; solving
/// `r/(1-r)² = R/(1-R)` gives the root below in `[0, 1)`.
pub fn effective_mirror_amplitude(reflectivity: f64) -> f64 {
    if reflectivity == 0.0 {
        return 0.0;
    }
    let q = reflectivity / (1.0 - reflectivity);
    ((2.0 * q + 1.0) - (4.0 * q + 1.0).sqrt()) / (2.0 * q)
}

impl SourceModel {
    /// `sech((ω − 2πc/λ_p)/Δω)`.
    pub fn pump_amplitude(&self, omega: f64) -> Result<Complex64> {
        check_omega("pump frequency", omega)?;
        let x = (omega - self.pump_omega()) / self.pump_bandwidth_rad_per_s;
        Ok(Complex64::new(1.0 / x.cosh(), 0.0))
    }

    /// Phase mismatch `(1/c)((ω1+ω2)·sinθ − ω1·n_TE(ω1) + ω2·n_TM(ω2))`, in 1/m.
    pub fn delta_k(&self, omega1: f64, omega2: f64, theta: f64) -> Result<f64> {
        check_omega("signal frequency", omega1)?;
        check_omega("idler frequency", omega2)?;
        if !theta.is_finite() {
            return Err(Error::Domain(format!("angle is not finite: {theta}")));
        }
        let n1 = self.index_at(Polarization::Te, omega1);
        let n2 = self.index_at(Polarization::Tm, omega2);
        Ok(((omega1 + omega2) * theta.sin() - omega1 * n1 + omega2 * n2) / SPEED_OF_LIGHT)
    }

    /// `∫ exp(−z²/w_p²)·exp(iΔk z) dz` over the waveguide, in metres.
    pub fn phase_matching_at(&self, delta_k: f64) -> Result<Complex64> {
        if !delta_k.is_finite() {
            return Err(Error::Domain(format!("phase mismatch is not finite: {delta_k}")));
        }
        let half = 0.5 * self.length_m();
        let inv_w2 = 1.0 / self.waist_m().powi(2);
        let envelope = move |z: f64| (-z * z * inv_w2).exp();
        let re = quadrature::integrate(
            |z| envelope(z) * (delta_k * z).cos(),
            -half,
            half,
            PHASE_MATCHING_TOL,
            MAX_INTERVALS,
        )?;
        let im = quadrature::integrate(
            |z| envelope(z) * (delta_k * z).sin(),
            -half,
            half,
            PHASE_MATCHING_TOL,
            MAX_INTERVALS,
        )?;
        Ok(Complex64::new(re.value, im.value))
    }

    pub fn phase_matching(&self, omega1: f64, omega2: f64) -> Result<Complex64> {
        let dk = self.delta_k(omega1, omega2, self.incidence_angle_rad)?;
        self.phase_matching_at(dk)
    }

    /// Lorentzian intensity transmission of the pump microcavity.
    pub fn microcavity_transmission(&self, omega: f64) -> f64 {
        let x = (omega - self.microcavity_omega()) / self.microcavity_width_omega();
        1.0 / (1.0 + 4.0 * x * x)
    }

    /// `1/(1 − 2i(ω−ω_M)/Δω_M)`, whose squared modulus is the Lorentzian.
    pub fn microcavity_amplitude(&self, omega: f64) -> Complex64 {
        let x = (omega - self.microcavity_omega()) / self.microcavity_width_omega();
        Complex64::new(1.0, -2.0 * x).inv()
    }

    fn facet_phase(&self, pol: Polarization, omega: f64) -> f64 {
        self.length_m() * self.index(pol) * (omega - self.facet_peak_omega(pol)) / SPEED_OF_LIGHT
    }

    /// Airy response `1/(1 + F·sin²(L·n·(ω−ω_μ)/c))` of the facet cavity.
    pub fn facet_response(&self, pol: Polarization, omega: f64) -> f64 {
        let f = finesse_coefficient(self.reflectivity(pol));
        let s = self.facet_phase(pol, omega).sin();
        1.0 / (1.0 + f * s * s)
    }

    /// Minimal-phase complex amplitude with `|t|² = facet_response` and `t(ω_μ) = 1`.
    pub fn facet_amplitude(&self, pol: Polarization, omega: f64) -> Complex64 {
        let r = effective_mirror_amplitude(self.reflectivity(pol));
        let delta = 2.0 * self.facet_phase(pol, omega);
        let denom = Complex64::new(1.0, 0.0) - Complex64::from_polar(r, delta);
        Complex64::new(1.0 - r, 0.0) / denom
    }
}
