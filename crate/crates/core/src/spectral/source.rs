use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{self, MM};

/// Cross-polarized output modes of the type-II process: the signal is TE, the
/// idler TM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    Te,
    Tm,
}

/// Physical parameters of pump, waveguide and cavities.
///
/// Serialized as a flat key/value JSON object; every key carries its unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SourceModel {
    pub pump_center_wavelength_nm: f64,
    /// Scale `Δω` of the sech pump spectrum, rad/s.
    pub pump_bandwidth_rad_per_s: f64,
    pub waveguide_length_mm: f64,
    pub pump_waist_mm: f64,
    pub incidence_angle_rad: f64,
    pub n_te: f64,
    pub n_tm: f64,
    /// First-order index dispersion `dn/dω` about half the pump frequency, s/rad.
    #[serde(default)]
    pub dn_te_domega: f64,
    #[serde(default)]
    pub dn_tm_domega: f64,
    pub reflectivity_te: f64,
    pub reflectivity_tm: f64,
    pub microcavity_center_nm: f64,
    pub microcavity_fwhm_nm: f64,
    pub facet_peak_te_nm: f64,
    pub facet_peak_tm_nm: f64,
}

impl Default for SourceModel {
    fn default() -> Self {
        Self {
            pump_center_wavelength_nm: 759.1,
            pump_bandwidth_rad_per_s: 2.0 * PI * 84e9,
            waveguide_length_mm: 2.1,
            pump_waist_mm: 0.24,
            incidence_angle_rad: units::deg_to_rad(1.11),
            n_te: 3.099,
            n_tm: 3.086,
            dn_te_domega: 0.0,
            dn_tm_domega: 0.0,
            reflectivity_te: 0.267,
            reflectivity_tm: 0.247,
            microcavity_center_nm: 759.1,
            microcavity_fwhm_nm: 0.28,
            facet_peak_te_nm: 1511.99,
            facet_peak_tm_nm: 1524.53,
        }
    }
}

impl SourceModel {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("pump_center_wavelength_nm", self.pump_center_wavelength_nm),
            ("pump_bandwidth_rad_per_s", self.pump_bandwidth_rad_per_s),
            ("waveguide_length_mm", self.waveguide_length_mm),
            ("pump_waist_mm", self.pump_waist_mm),
            ("microcavity_center_nm", self.microcavity_center_nm),
            ("facet_peak_te_nm", self.facet_peak_te_nm),
            ("facet_peak_tm_nm", self.facet_peak_tm_nm),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        // an infinite width disables the microcavity
        if !(self.microcavity_fwhm_nm > 0.0) {
            return Err(Error::InvalidInput(format!(
                "microcavity_fwhm_nm must be > 0, got {}",
                self.microcavity_fwhm_nm
            )));
        }
        for (name, r) in [
            ("reflectivity_te", self.reflectivity_te),
            ("reflectivity_tm", self.reflectivity_tm),
        ] {
            if !(0.0..1.0).contains(&r) {
                return Err(Error::InvalidInput(format!("{name} must lie in [0, 1), got {r}")));
            }
        }
        if !(self.incidence_angle_rad.abs() < PI / 2.0) {
            return Err(Error::InvalidInput(format!(
                "incidence_angle_rad must satisfy |θ| < π/2, got {}",
                self.incidence_angle_rad
            )));
        }
        for (name, n) in [("n_te", self.n_te), ("n_tm", self.n_tm)] {
            if !(n.is_finite() && n > 1.0) {
                return Err(Error::InvalidInput(format!("{name} must be > 1, got {n}")));
            }
        }
        if !(self.dn_te_domega.is_finite() && self.dn_tm_domega.is_finite()) {
            return Err(Error::InvalidInput("index dispersion must be finite".into()));
        }
        Ok(())
    }

    pub fn length_m(&self) -> f64 {
        self.waveguide_length_mm * MM
    }

    pub fn waist_m(&self) -> f64 {
        self.pump_waist_mm * MM
    }

    pub fn pump_omega(&self) -> f64 {
        units::omega_from_nm(self.pump_center_wavelength_nm)
    }

    pub fn microcavity_omega(&self) -> f64 {
        units::omega_from_nm(self.microcavity_center_nm)
    }

    /// `Δω_M = 2πc·Δλ_M/λ_M²`.
    pub fn microcavity_width_omega(&self) -> f64 {
        units::omega_step_from_nm(self.microcavity_center_nm, self.microcavity_fwhm_nm)
    }

    pub fn facet_peak_omega(&self, pol: Polarization) -> f64 {
        match pol {
            Polarization::Te => units::omega_from_nm(self.facet_peak_te_nm),
            Polarization::Tm => units::omega_from_nm(self.facet_peak_tm_nm),
        }
    }

    pub fn reflectivity(&self, pol: Polarization) -> f64 {
        match pol {
            Polarization::Te => self.reflectivity_te,
            Polarization::Tm => self.reflectivity_tm,
        }
    }

    /// Effective index at the reference frequency (used for the facet cavity).
    pub fn index(&self, pol: Polarization) -> f64 {
        match pol {
            Polarization::Te => self.n_te,
            Polarization::Tm => self.n_tm,
        }
    }

    /// Effective index `n(ω)`, affine about half the pump frequency.
    pub fn index_at(&self, pol: Polarization, omega: f64) -> f64 {
        let reference = 0.5 * self.pump_omega();
        match pol {
            Polarization::Te => self.n_te + self.dn_te_domega * (omega - reference),
            Polarization::Tm => self.n_tm + self.dn_tm_domega * (omega - reference),
        }
    }

    pub fn is_dispersive(&self) -> bool {
        self.dn_te_domega != 0.0 || self.dn_tm_domega != 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        SourceModel::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_reflectivity_and_angle() {
        let mut m = SourceModel::default();
        m.reflectivity_tm = 1.0;
        assert!(m.validate().is_err());
        let mut m = SourceModel::default();
        m.incidence_angle_rad = PI / 2.0;
        assert!(m.validate().is_err());
        let mut m = SourceModel::default();
        m.n_te = 0.9;
        assert!(m.validate().is_err());
        let mut m = SourceModel::default();
        m.pump_waist_mm = -1.0;
        assert!(m.validate().is_err());
    }

    #[test]
    fn json_is_flat_and_roundtrips() {
        let m = SourceModel::default();
        let text = serde_json::to_string(&m).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(v.as_object().unwrap().values().all(|x| x.is_number()));
        let back: SourceModel = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }
}
