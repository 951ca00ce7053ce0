use serde::{Deserialize, Serialize};

use super::medium::MediumModel;
use super::pulse::{Envelope, LaserPulse};
use crate::error::{config, Result};

/// Envelope level that defines the pulse support.
pub const SUPPORT_THRESHOLD: f64 = 1e-8;

/// Uniform time grid in atomic units, t_n = t_start + n dt.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t_start: f64,
    dt: f64,
    len: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, dt: f64, len: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) || len < 2 || !t_start.is_finite() {
            return Err(config("time grid needs dt > 0 and at least two samples"));
        }
        Ok(TimeGrid { t_start, dt, len })
    }

    #[inline]
    pub fn t(&self, n: usize) -> f64 {
        self.t_start + n as f64 * self.dt
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t(self.len - 1)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Highest angular frequency representable on the grid (a.u.).
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI / self.dt
    }
}

/// Cylindrical momentum grid (a.u.). Nodes along p_par are uniform; transverse
/// nodes are uniform in u = p_perp^2, so that 2 pi p_perp dp_perp = pi du.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumGrid {
    pub par_max: f64,
    pub par_samples: usize,
    pub perp_max: f64,
    pub perp_samples: usize,
    /// Fraction of each axis rolled off with a raised cosine at the outer edge (0 = hard cutoff).
    pub taper: f64,
}

impl MomentumGrid {
    /// Ranges from the drive: p_par_max = 1.5 (max|A| + sqrt(2 m E_cut)), p_perp_max = 1.5 sqrt(2 m E_cut),
    /// with E_cut = 3.17 Up the classical return-energy cutoff.
    pub fn for_drive(pulse: &LaserPulse, medium: &MediumModel, par_samples: usize, perp_samples: usize) -> Self {
        let m = medium.to_au().mass;
        let a_max = pulse.field_au() / pulse.omega0_au();
        let e_cut = 3.17 * pulse.ponderomotive_au(m);
        let k = (2.0 * m * e_cut).sqrt();
        MomentumGrid {
            par_max: 1.5 * (a_max + k),
            par_samples,
            perp_max: 1.5 * k,
            perp_samples,
            taper: 0.0,
        }
    }

    pub fn with_taper(mut self, taper: f64) -> Self {
        self.taper = taper;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.par_samples < 2 || self.perp_samples < 2 {
            return Err(config("momentum grid needs at least 2 samples per axis"));
        }
        if !(self.par_max > 0.0 && self.perp_max > 0.0 && self.par_max.is_finite() && self.perp_max.is_finite()) {
            return Err(config("momentum grid extents must be positive"));
        }
        if !(0.0..1.0).contains(&self.taper) {
            return Err(config("momentum taper fraction must lie in [0, 1)"));
        }
        Ok(())
    }

    fn roll_off(&self, x: f64) -> f64 {
        let f = self.taper;
        if f <= 0.0 || x <= 1.0 - f {
            1.0
        } else {
            0.5 * (1.0 + (std::f64::consts::PI * (x - 1.0 + f) / f).cos())
        }
    }

    /// (p_par, weight) with trapezoid weights times the taper.
    pub fn par_nodes(&self) -> Vec<(f64, f64)> {
        let n = self.par_samples;
        let h = 2.0 * self.par_max / (n - 1) as f64;
        (0..n)
            .map(|i| {
                let p = -self.par_max + i as f64 * h;
                let end = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                (p, end * h * self.roll_off(p.abs() / self.par_max))
            })
            .collect()
    }

    /// (u = p_perp^2, weight) including the azimuthal factor.
    pub fn perp_nodes(&self) -> Vec<(f64, f64)> {
        let n = self.perp_samples;
        let umax = self.perp_max * self.perp_max;
        let h = umax / (n - 1) as f64;
        (0..n)
            .map(|j| {
                let u = j as f64 * h;
                let end = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
                (u, std::f64::consts::PI * end * h * self.roll_off(u / umax))
            })
            .collect()
    }

    pub fn doubled_par(&self) -> Self {
        MomentumGrid { par_samples: 2 * self.par_samples - 1, ..*self }
    }

    pub fn doubled_perp(&self) -> Self {
        MomentumGrid { perp_samples: 2 * self.perp_samples - 1, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaMethod {
    /// sigma = -v / w^2
    HighFrequency,
    /// Step-wise integration of the displacement integral (cost x number of frequencies).
    ExactRecursion,
}

/// The recollision filter on a grid of K samples per optical period.
/// exp(-xi) is 1 up to half a period, exp(-10 tau/T0) up to one period, 0 beyond.
/// Quadrature weights average the two sides at the jumps (T0/2 and T0) so the window
/// sum stays second-order accurate.
#[derive(Debug, Clone, PartialEq)]
pub struct RecollisionFilter {
    samples_per_period: usize,
    weights: Vec<f64>,
}

impl RecollisionFilter {
    pub fn new(samples_per_period: usize) -> Result<Self> {
        let k = samples_per_period;
        if k < 4 || k % 2 != 0 {
            return Err(config("samples per period must be even and at least 4"));
        }
        let a = (-10.0 / k as f64).exp();
        let weights = (0..=k)
            .map(|i| {
                if i == 0 {
                    0.5
                } else if 2 * i < k {
                    1.0
                } else if 2 * i == k {
                    0.5 * (1.0 + a.powi(i as i32))
                } else if i < k {
                    a.powi(i as i32)
                } else {
                    0.5 * a.powi(i as i32)
                }
            })
            .collect();
        Ok(RecollisionFilter { samples_per_period: k, weights })
    }

    pub fn samples_per_period(&self) -> usize {
        self.samples_per_period
    }

    /// exp(-xi(tau)) for lag tau in optical periods.
    pub fn profile(tau_periods: f64) -> f64 {
        if tau_periods <= 0.5 {
            1.0
        } else if tau_periods <= 1.0 {
            (-10.0 * tau_periods).exp()
        } else {
            0.0
        }
    }

    /// Quadrature weight of lag k (trapezoid end at k = 0, jump averages at K/2 and K, zero beyond).
    #[inline]
    pub fn weight(&self, k: usize) -> f64 {
        self.weights.get(k).copied().unwrap_or(0.0)
    }

    /// Per-sample decay exp(-10/K) of the second half-window.
    pub fn decay(&self) -> f64 {
        (-10.0 / self.samples_per_period as f64).exp()
    }
}

/// How to build the simulation grids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub samples_per_period: usize,
    /// Total span in optical periods; `None` spans the envelope support.
    pub span_periods: Option<f64>,
    /// Highest harmonic order the time step must resolve.
    pub max_harmonic: f64,
    pub momentum: MomentumGrid,
    pub sigma: SigmaMethod,
}

/// Immutable grids shared by all kernels.
#[derive(Debug, Clone, PartialEq)]
pub struct SfaGrids {
    time: TimeGrid,
    momentum: MomentumGrid,
    filter: RecollisionFilter,
    sigma: SigmaMethod,
    period_au: f64,
}

impl SfaGrids {
    pub fn new(pulse: &LaserPulse, spec: &GridSpec) -> Result<Self> {
        pulse.validate()?;
        spec.momentum.validate()?;
        let filter = RecollisionFilter::new(spec.samples_per_period)?;
        let k = spec.samples_per_period;
        let period = pulse.period_au();
        let dt = period / k as f64;
        // at least 4 samples per period of the highest harmonic
        if (k as f64) < 4.0 * spec.max_harmonic {
            return Err(config(format!(
                "{k} samples per period cannot resolve harmonic {} (need >= {})",
                spec.max_harmonic,
                (4.0 * spec.max_harmonic).ceil()
            )));
        }
        let half = match (spec.span_periods, pulse.envelope) {
            (Some(s), _) => 0.5 * s * period,
            (None, Envelope::Gaussian) => pulse.support_half_width_au(SUPPORT_THRESHOLD),
            (None, Envelope::Flat) => return Err(config("a flat envelope needs an explicit span")),
        };
        if !(half > 0.0) {
            return Err(config("time span must be positive"));
        }
        let n_half = (half / dt).ceil() as usize;
        let time = TimeGrid::new(-(n_half as f64) * dt, dt, 2 * n_half + 1)?;
        Ok(SfaGrids { time, momentum: spec.momentum, filter, sigma: spec.sigma, period_au: period })
    }

    /// Grids from explicit parts; the filter still spans exactly one period of `samples_per_period` steps.
    pub fn from_parts(time: TimeGrid, momentum: MomentumGrid, samples_per_period: usize, sigma: SigmaMethod) -> Result<Self> {
        momentum.validate()?;
        let filter = RecollisionFilter::new(samples_per_period)?;
        Ok(SfaGrids { period_au: time.dt() * samples_per_period as f64, time, momentum, filter, sigma })
    }

    pub fn time(&self) -> &TimeGrid {
        &self.time
    }

    pub fn momentum(&self) -> &MomentumGrid {
        &self.momentum
    }

    pub fn filter(&self) -> &RecollisionFilter {
        &self.filter
    }

    pub fn sigma(&self) -> SigmaMethod {
        self.sigma
    }

    pub fn period_au(&self) -> f64 {
        self.period_au
    }

    pub fn samples_per_period(&self) -> usize {
        self.filter.samples_per_period()
    }
}
