//! Reference spectrum setups for the solid and gas comparisons.

use serde::{Deserialize, Serialize};

use crate::emission::{spectral_coefficients, SpectralCoefficients, SpectralRequest};
use crate::error::Result;
use crate::macroscopic::{
    hhg_band_photons, theta_averaged_qshhg, BandPhotonReport, BsvBeam, PropagationGeometry, ThetaScan,
};
use crate::sfa::{GridSpec, LaserPulse, MediumKind, MediumModel, MomentumGrid, SfaGrids, SigmaMethod};
use crate::units;

/// Samples per optical period and momentum nodes used by the reference runs.
pub const REFERENCE_SAMPLES_PER_PERIOD: usize = 256;
pub const REFERENCE_PAR_SAMPLES: usize = 161;
pub const REFERENCE_PERP_SAMPLES: usize = 81;
/// Frequency samples per harmonic order in the spectral window.
pub const SAMPLES_PER_ORDER: usize = 48;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumScenario {
    pub medium: MediumModel,
    pub pulse: LaserPulse,
    pub grid: GridSpec,
    pub geometry: PropagationGeometry,
    pub bsv: BsvBeam,
    /// Bands 1..=max_order are reported.
    pub max_order: usize,
    pub theta_samples: usize,
}

fn reference_grid(pulse: &LaserPulse, medium: &MediumModel, max_order: usize) -> GridSpec {
    GridSpec {
        samples_per_period: REFERENCE_SAMPLES_PER_PERIOD,
        span_periods: None,
        max_harmonic: (max_order + 3) as f64,
        momentum: MomentumGrid::for_drive(pulse, medium, REFERENCE_PAR_SAMPLES, REFERENCE_PERP_SAMPLES),
        sigma: SigmaMethod::HighFrequency,
    }
}

/// Squeezed vacuum of the solid runs: r = 13.6, 1.6 um, 50 nm bandwidth, 100 um radius.
pub fn reference_bsv() -> BsvBeam {
    BsvBeam::from_squeezing(13.6, 1.6e-6, 50e-9, 100e-6).expect("static parameters")
}

impl SpectrumScenario {
    /// ZnO film driven at 3.2 um, 1.3 GV/m, 6-cycle Gaussian.
    pub fn zno() -> Self {
        let pulse = LaserPulse::new(3.2e-6, 1.3e9, 6.0).expect("static parameters");
        let medium = MediumModel::zno(4e28);
        SpectrumScenario {
            grid: reference_grid(&pulse, &medium, 20),
            medium,
            pulse,
            geometry: PropagationGeometry::zno(),
            bsv: reference_bsv(),
            max_order: 20,
            theta_samples: 16,
        }
    }

    /// Hydrogen jet at 800 nm, 1e14 W/cm^2; same squeezed-vacuum parameters as the solid.
    pub fn hydrogen() -> Self {
        let pulse = LaserPulse::new(800e-9, units::field_from_intensity(1e18), 6.0).expect("static parameters");
        let medium = MediumModel::hydrogen(1e24);
        SpectrumScenario {
            grid: reference_grid(&pulse, &medium, 30),
            medium,
            pulse,
            geometry: PropagationGeometry::hydrogen_gas(),
            bsv: reference_bsv(),
            max_order: 30,
            theta_samples: 16,
        }
    }

    pub fn orders(&self) -> Vec<usize> {
        (1..=self.max_order).collect()
    }

    pub fn request(&self) -> SpectralRequest {
        let n = SAMPLES_PER_ORDER * self.max_order + 1;
        SpectralRequest::harmonic_range(&self.pulse, 0.5, self.max_order as f64 + 0.5, n)
    }

    pub fn spectral(&self) -> Result<SpectralCoefficients> {
        let grids = SfaGrids::new(&self.pulse, &self.grid)?;
        spectral_coefficients(&self.medium, &self.pulse, &grids, &self.request())
    }

    /// Ionization potential or band gap in units of the photon energy.
    pub fn threshold_order(&self) -> f64 {
        let e = match self.medium.kind {
            MediumKind::Atom { binding_energy_j, .. } => binding_energy_j,
            MediumKind::Solid { gap_j, .. } => gap_j,
        };
        e / (units::HBAR * self.pulse.omega0())
    }

    /// Classical cutoff (threshold + 3.17 Up) in harmonic orders.
    pub fn cutoff_order(&self) -> f64 {
        let up = self.pulse.ponderomotive_au(self.medium.to_au().mass);
        self.threshold_order() + 3.17 * up / self.pulse.omega0_au()
    }

    /// Odd orders between threshold and cutoff.
    pub fn plateau_orders(&self) -> Vec<usize> {
        let (lo, hi) = (self.threshold_order(), self.cutoff_order());
        self.orders().into_iter().filter(|&n| n % 2 == 1 && n as f64 > lo && n as f64 <= hi).collect()
    }

    pub fn run(&self) -> Result<SpectrumRun> {
        let spectral = self.spectral()?;
        let orders = self.orders();
        let hhg = hhg_band_photons(&spectral, &self.geometry, &orders)?;
        let qshhg = theta_averaged_qshhg(&spectral, &self.bsv, &self.geometry, &orders, self.theta_samples)?;
        Ok(SpectrumRun { spectral, hhg, qshhg })
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumRun {
    pub spectral: SpectralCoefficients,
    pub hhg: BandPhotonReport,
    pub qshhg: ThetaScan<BandPhotonReport>,
}

impl SpectrumRun {
    /// Band photons averaged over the squeeze phase, indexed like `hhg.bands`.
    pub fn qshhg_mean(&self) -> Vec<f64> {
        let n = self.qshhg.values.len() as f64;
        let bands = self.hhg.bands.len();
        (0..bands).map(|i| self.qshhg.values.iter().map(|r| r.bands[i].n_photons).sum::<f64>() / n).collect()
    }

    /// max/min of one band's sideband photons across the phase scan.
    pub fn theta_modulation(&self, order: usize) -> Option<f64> {
        let i = self.hhg.bands.iter().position(|b| b.order == order)?;
        let v: Vec<f64> = self.qshhg.values.iter().map(|r| r.bands[i].n_photons).collect();
        let mx = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mn = v.iter().copied().fold(f64::INFINITY, f64::min);
        Some(mx / mn)
    }

    /// Sideband N against the geometric mean of its HHG neighbours N +- 1.
    pub fn sideband_ratio(&self, order: usize) -> Option<f64> {
        let q = self.qshhg_mean();
        let idx = |n: usize| self.hhg.bands.iter().position(|b| b.order == n);
        let (i, lo, hi) = (idx(order)?, idx(order.checked_sub(1)?)?, idx(order + 1)?);
        let h = (self.hhg.bands[lo].n_photons * self.hhg.bands[hi].n_photons).sqrt();
        Some(q[i] / h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_windows() {
        let z = SpectrumScenario::zno();
        assert!((z.threshold_order() - 8.78).abs() < 0.02, "{}", z.threshold_order());
        assert_eq!(z.plateau_orders(), vec![9, 11, 13, 15]);
        let h = SpectrumScenario::hydrogen();
        assert!(h.plateau_orders().first() == Some(&9));
        assert!(h.cutoff_order() > 20.0 && h.cutoff_order() < 22.0, "{}", h.cutoff_order());
    }
}
