use serde::{Deserialize, Serialize};

use crate::error::{config, Result};
use crate::units;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Envelope {
    /// exp(-t^2/tau^2), tau measured at 1/e of the field.
    Gaussian,
    /// Constant amplitude; only for monochromatic checks on finite grids.
    Flat,
}

/// Classical drive F(t) = F0 env(t) sin(w0 t + cep). SI fields, atomic-unit accessors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaserPulse {
    pub wavelength_m: f64,
    pub peak_field_v_per_m: f64,
    /// Envelope parameter tau in optical periods.
    pub duration_periods: f64,
    pub cep_rad: f64,
    pub envelope: Envelope,
}

impl LaserPulse {
    pub fn new(wavelength_m: f64, peak_field_v_per_m: f64, duration_periods: f64) -> Result<Self> {
        let p = LaserPulse {
            wavelength_m,
            peak_field_v_per_m,
            duration_periods,
            cep_rad: 0.0,
            envelope: Envelope::Gaussian,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_envelope(mut self, envelope: Envelope) -> Self {
        self.envelope = envelope;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.wavelength_m > 0.0 && self.wavelength_m.is_finite()) {
            return Err(config("pulse wavelength must be positive"));
        }
        if !(self.peak_field_v_per_m >= 0.0 && self.peak_field_v_per_m.is_finite()) {
            return Err(config("pulse peak field must be non-negative"));
        }
        if !(self.duration_periods > 0.0 && self.duration_periods.is_finite()) {
            return Err(config("pulse duration must be positive"));
        }
        if !self.cep_rad.is_finite() {
            return Err(config("carrier-envelope offset must be finite"));
        }
        Ok(())
    }

    /// Carrier angular frequency (rad/s).
    pub fn omega0(&self) -> f64 {
        2.0 * std::f64::consts::PI * units::C / self.wavelength_m
    }

    /// Optical period (s).
    pub fn period(&self) -> f64 {
        self.wavelength_m / units::C
    }

    pub fn omega0_au(&self) -> f64 {
        units::omega_to_au(self.omega0())
    }

    pub fn period_au(&self) -> f64 {
        units::seconds_to_au(self.period())
    }

    pub fn field_au(&self) -> f64 {
        units::field_to_au(self.peak_field_v_per_m)
    }

    pub fn tau_au(&self) -> f64 {
        self.duration_periods * self.period_au()
    }

    /// Ponderomotive energy F0^2/(4 m w0^2) in atomic units for carrier mass `mass_au`.
    pub fn ponderomotive_au(&self, mass_au: f64) -> f64 {
        let f = self.field_au();
        let w = self.omega0_au();
        f * f / (4.0 * mass_au * w * w)
    }

    pub fn envelope_at(&self, t_au: f64) -> f64 {
        match self.envelope {
            Envelope::Gaussian => {
                let x = t_au / self.tau_au();
                (-x * x).exp()
            }
            Envelope::Flat => 1.0,
        }
    }

    pub fn field_at(&self, t_au: f64) -> f64 {
        self.field_au() * self.envelope_at(t_au) * (self.omega0_au() * t_au + self.cep_rad).sin()
    }

    /// Half-width (a.u.) at which the Gaussian envelope falls to `threshold`.
    pub fn support_half_width_au(&self, threshold: f64) -> f64 {
        self.tau_au() * (-threshold.ln()).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn period_of_mid_infrared_drive() {
        let p = LaserPulse::new(3.2e-6, 1.3e9, 6.0).unwrap();
        assert!((p.period() * 1e15 - 10.674).abs() < 1e-3);
        assert!((p.omega0() * p.period() - 2.0 * std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(LaserPulse::new(0.0, 1.0, 6.0).is_err());
        assert!(LaserPulse::new(1e-6, -1.0, 6.0).is_err());
        assert!(LaserPulse::new(1e-6, 1.0, 0.0).is_err());
    }

    #[test]
    fn support_threshold() {
        let p = LaserPulse::new(3.2e-6, 1.3e9, 6.0).unwrap();
        let t = p.support_half_width_au(1e-8);
        assert!((p.envelope_at(t) - 1e-8).abs() < 1e-20);
    }
}
