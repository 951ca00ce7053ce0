//! Phase-matched photon numbers, the squeezed-vacuum beam and the susceptibility scaling law.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::emission::SpectralCoefficients;
use crate::error::{config, domain, Result};
use crate::units;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationGeometry {
    pub density_per_m3: f64,
    /// Harmonic beam radius w_k (1/e^2), one value for all orders.
    pub beam_radius_m: f64,
    /// Interaction length, assumed shorter than the coherence length.
    pub interaction_length_m: f64,
    pub convention_volume_m3: f64,
}

impl PropagationGeometry {
    pub fn new(density_per_m3: f64, beam_radius_m: f64, interaction_length_m: f64) -> Result<Self> {
        let g = PropagationGeometry { density_per_m3, beam_radius_m, interaction_length_m, convention_volume_m3: 1.0 };
        g.validate()?;
        Ok(g)
    }

    /// ZnO film: N0 = 4e28 m^-3, w = 40 um, l = 5 nm.
    pub fn zno() -> Self {
        PropagationGeometry { density_per_m3: 4e28, beam_radius_m: 40e-6, interaction_length_m: 5e-9, convention_volume_m3: 1.0 }
    }

    /// Gas nozzle: N0 = 1e24 m^-3, w = 100 um, l = 250 um.
    pub fn hydrogen_gas() -> Self {
        PropagationGeometry { density_per_m3: 1e24, beam_radius_m: 100e-6, interaction_length_m: 250e-6, convention_volume_m3: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        for (n, v) in [
            ("density", self.density_per_m3),
            ("beam radius", self.beam_radius_m),
            ("interaction length", self.interaction_length_m),
            ("convention volume", self.convention_volume_m3),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(config(format!("geometry {n} must be positive")));
            }
        }
        Ok(())
    }

    /// (N0 w l)^2 / (2c) in s/m^3.
    pub fn coherence_factor(&self) -> f64 {
        let x = self.density_per_m3 * self.beam_radius_m * self.interaction_length_m;
        x * x / (2.0 * units::C)
    }

    /// c_k^2 (s) for HHG.
    pub fn hhg_c2(&self) -> f64 {
        self.coherence_factor() * self.convention_volume_m3
    }

    /// c_q^2 (s) for sidebands.
    pub fn qshhg_c2(&self, bsv: &BsvBeam) -> f64 {
        let v = self.convention_volume_m3;
        self.coherence_factor() * v * v * bsv.mode_volume_density
    }
}

/// Bright squeezed vacuum perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BsvBeam {
    pub r: f64,
    pub theta: f64,
    pub wavelength_m: f64,
    pub bandwidth_m: f64,
    pub beam_radius_m: f64,
    /// (dq)^3/(2 pi)^3 = d_lambda / (w lambda)^2, m^-3.
    pub mode_volume_density: f64,
}

impl BsvBeam {
    /// Beam with a given squeeze amplitude instead of a pulse energy.
    pub fn from_squeezing(r: f64, wavelength_m: f64, bandwidth_m: f64, beam_radius_m: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(domain("squeeze amplitude must be non-negative"));
        }
        let mut b = bsv_parameters(0.0, wavelength_m, bandwidth_m, beam_radius_m)?;
        b.r = r;
        Ok(b)
    }

    pub fn omega(&self) -> f64 {
        2.0 * std::f64::consts::PI * units::C / self.wavelength_m
    }

    pub fn mean_photons(&self) -> f64 {
        self.r.sinh().powi(2)
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }
}

/// Squeezing from pulse energy: n_q = E / (hbar w_q), r = asinh(sqrt(n_q)).
pub fn bsv_parameters(energy_j: f64, wavelength_m: f64, bandwidth_m: f64, beam_radius_m: f64) -> Result<BsvBeam> {
    if !(energy_j >= 0.0 && energy_j.is_finite()) {
        return Err(domain("pulse energy must be non-negative"));
    }
    for (n, v) in [("wavelength", wavelength_m), ("bandwidth", bandwidth_m), ("beam radius", beam_radius_m)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(domain(format!("squeezed-vacuum {n} must be positive")));
        }
    }
    let omega = 2.0 * std::f64::consts::PI * units::C / wavelength_m;
    let nq = energy_j / (units::HBAR * omega);
    Ok(BsvBeam {
        r: nq.sqrt().asinh(),
        theta: 0.0,
        wavelength_m,
        bandwidth_m,
        beam_radius_m,
        mode_volume_density: bandwidth_m / (beam_radius_m * wavelength_m).powi(2),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandEntry {
    pub order: usize,
    /// rad/s, band edges included
    pub omega: Vec<f64>,
    /// photons per rad/s
    pub dn_domega: Vec<f64>,
    pub n_photons: f64,
    pub zeta: Option<C64>,
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandPhotonReport {
    pub bands: Vec<BandEntry>,
}

impl BandPhotonReport {
    pub fn photons(&self) -> Vec<f64> {
        self.bands.iter().map(|b| b.n_photons).collect()
    }

    pub fn band(&self, order: usize) -> Option<&BandEntry> {
        self.bands.iter().find(|b| b.order == order)
    }
}

/// Samples of a band [lo, hi] on the grid: interpolated edges plus interior nodes.
fn band_samples<T: Copy>(omega: &[f64], y: &[T], lo: f64, hi: f64, lerp: impl Fn(T, T, f64) -> T) -> Result<(Vec<f64>, Vec<T>)> {
    let n = omega.len();
    if n < 2 || lo < omega[0] || hi > omega[n - 1] {
        return Err(config(format!(
            "band [{lo:.4e}, {hi:.4e}] rad/s lies outside the frequency grid [{:.4e}, {:.4e}]",
            omega.first().copied().unwrap_or(f64::NAN),
            omega.last().copied().unwrap_or(f64::NAN)
        )));
    }
    let at = |w: f64| {
        let i = omega.partition_point(|x| *x <= w).clamp(1, n - 1);
        let t = (w - omega[i - 1]) / (omega[i] - omega[i - 1]);
        lerp(y[i - 1], y[i], t)
    };
    let mut ws = vec![lo];
    let mut ys = vec![at(lo)];
    for (w, v) in omega.iter().zip(y) {
        if *w > lo && *w < hi {
            ws.push(*w);
            ys.push(*v);
        }
    }
    ws.push(hi);
    ys.push(at(hi));
    Ok((ws, ys))
}

fn trapz(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(a, b)| 0.5 * (a[1] - a[0]) * (b[0] + b[1])).sum()
}

fn band_edges(order: usize, omega0: f64) -> (f64, f64) {
    ((order as f64 - 0.5) * omega0, (order as f64 + 0.5) * omega0)
}

/// dn/dw = c_k^2 |H~|^2 integrated over each band [(N-1/2) w0, (N+1/2) w0].
pub fn hhg_band_photons(spec: &SpectralCoefficients, geometry: &PropagationGeometry, orders: &[usize]) -> Result<BandPhotonReport> {
    geometry.validate()?;
    let c2 = geometry.coherence_factor() * spec.volume_m3;
    let dens: Vec<f64> = spec.h.iter().map(|h| c2 * h.norm_sqr()).collect();
    let bands = orders
        .iter()
        .map(|&order| {
            let (lo, hi) = band_edges(order, spec.omega0);
            let (w, d) = band_samples(&spec.omega, &dens, lo, hi, |a, b, t| a + t * (b - a))?;
            Ok(BandEntry { order, n_photons: trapz(&w, &d), omega: w, dn_domega: d, zeta: None, theta: None })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BandPhotonReport { bands })
}

/// zeta_k = F~ - G~ tanh(r) e^{i theta}.
pub fn zeta_spectrum(spec: &SpectralCoefficients, r: f64, theta: f64) -> Vec<C64> {
    let t = r.tanh() * C64::from_polar(1.0, theta);
    spec.f.iter().zip(&spec.g).map(|(f, g)| f - g * t).collect()
}

/// Sideband photons per band: <n>_N = cosh^2 r |zeta_N|^2, |zeta_N|^2 = c_q^2 int |zeta_k|^2 dw;
/// arg zeta_N from the band integral of zeta_k.
pub fn qshhg_band_photons(
    spec: &SpectralCoefficients,
    bsv: &BsvBeam,
    geometry: &PropagationGeometry,
    theta: f64,
    orders: &[usize],
) -> Result<BandPhotonReport> {
    geometry.validate()?;
    let c2 = geometry.coherence_factor() * spec.volume_m3 * spec.volume_m3 * bsv.mode_volume_density;
    let ch2 = bsv.r.cosh().powi(2);
    let zeta = zeta_spectrum(spec, bsv.r, theta);
    let zsq: Vec<f64> = zeta.iter().map(|z| c2 * z.norm_sqr()).collect();
    let bands = orders
        .iter()
        .map(|&order| {
            let (lo, hi) = band_edges(order, spec.omega0);
            let (w, z2) = band_samples(&spec.omega, &zsq, lo, hi, |a, b, t| a + t * (b - a))?;
            let (wc, zc) = band_samples(&spec.omega, &zeta, lo, hi, |a, b, t| a + (b - a) * t)?;
            let re: Vec<f64> = zc.iter().map(|z| z.re).collect();
            let im: Vec<f64> = zc.iter().map(|z| z.im).collect();
            let phase = C64::new(trapz(&wc, &re), trapz(&wc, &im)).arg();
            let zeta_abs2 = trapz(&w, &z2);
            let dn: Vec<f64> = z2.iter().map(|x| ch2 * x).collect();
            Ok(BandEntry {
                order,
                n_photons: trapz(&w, &dn),
                omega: w,
                dn_domega: dn,
                zeta: Some(C64::from_polar(zeta_abs2.sqrt(), phase)),
                theta: Some(theta),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BandPhotonReport { bands })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaScan<T> {
    pub thetas: Vec<f64>,
    pub values: Vec<T>,
}

impl ThetaScan<f64> {
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_over_min(&self) -> f64 {
        let mx = self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mn = self.values.iter().copied().fold(f64::INFINITY, f64::min);
        mx / mn
    }
}

/// Evaluate `f` on `samples` uniform angles in [0, 2 pi).
pub fn theta_scan<T, F>(f: F, samples: usize) -> Result<ThetaScan<T>>
where
    T: Send,
    F: Fn(f64) -> T + Sync,
{
    if samples < 2 {
        return Err(config("theta scan needs at least 2 samples"));
    }
    let thetas: Vec<f64> = (0..samples).map(|i| 2.0 * std::f64::consts::PI * i as f64 / samples as f64).collect();
    let values = thetas.par_iter().map(|t| f(*t)).collect();
    Ok(ThetaScan { thetas, values })
}

/// Per-band mean over the squeeze phase of sideband photon numbers.
pub fn theta_averaged_qshhg(
    spec: &SpectralCoefficients,
    bsv: &BsvBeam,
    geometry: &PropagationGeometry,
    orders: &[usize],
    samples: usize,
) -> Result<ThetaScan<BandPhotonReport>> {
    let scan = theta_scan(|t| qshhg_band_photons(spec, bsv, geometry, t, orders), samples)?;
    let values = scan.values.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(ThetaScan { thetas: scan.thetas, values })
}

/// R proportional to I0 / (8 w0^5 m*^2), in whatever consistent units are passed.
pub fn susceptibility_ratio_scaling(intensity: f64, omega0: f64, mass: f64) -> Result<f64> {
    if !(intensity > 0.0 && omega0 > 0.0 && mass > 0.0) {
        return Err(domain("scaling law needs positive intensity, frequency and mass"));
    }
    Ok(intensity / (8.0 * omega0.powi(5) * mass * mass))
}
