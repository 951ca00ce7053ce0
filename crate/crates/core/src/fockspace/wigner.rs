use std::f64::consts::{FRAC_2_PI, LN_10};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::coupling::SidebandCoupling;
use super::projection::photon_added_form;
use super::state::SingleModeState;
use crate::error::{config, Result};
use crate::special::ln_factorial;

/// Rectangular phase-space grid in (x, p) = (Re gamma, Im gamma); vacuum variance 1/4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub np: usize,
}

impl Default for WignerGrid {
    /// +-6 in both quadratures (12 vacuum widths), 241 points per axis.
    fn default() -> Self {
        WignerGrid { x_min: -6.0, x_max: 6.0, nx: 241, p_min: -6.0, p_max: 6.0, np: 241 }
    }
}

impl WignerGrid {
    pub fn new(x_min: f64, x_max: f64, nx: usize, p_min: f64, p_max: f64, np: usize) -> Result<Self> {
        let g = WignerGrid { x_min, x_max, nx, p_min, p_max, np };
        g.validate()?;
        Ok(g)
    }

    pub fn square(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n, -half_width, half_width, n)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |a: f64, b: f64, n: usize| a.is_finite() && b.is_finite() && b > a && n >= 2;
        if !ok(self.x_min, self.x_max, self.nx) || !ok(self.p_min, self.p_max, self.np) {
            return Err(config("Wigner grid needs finite ranges with max > min and >= 2 points per axis"));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }
    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.np - 1) as f64
    }
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }
    pub fn p(&self, j: usize) -> f64 {
        self.p_min + j as f64 * self.dp()
    }
}

/// W sampled on a grid, row-major with x fastest: `values[j * nx + i]` at (x_i, p_j).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WignerField {
    pub grid: WignerGrid,
    pub values: Vec<f64>,
    /// Trapezoid estimate of the phase-space integral.
    pub integral: f64,
    /// Set when the integral misses 1 by more than 1%.
    pub coarse: bool,
}

impl WignerField {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.grid.nx + i]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn from_values(grid: WignerGrid, values: Vec<f64>) -> Self {
        let (nx, np) = (grid.nx, grid.np);
        let w = |i: usize, n: usize| if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        let mut integral = 0.0;
        for j in 0..np {
            for i in 0..nx {
                integral += w(i, nx) * w(j, np) * values[j * nx + i];
            }
        }
        integral *= grid.dx() * grid.dp();
        WignerField { grid, values, integral, coarse: (integral - 1.0).abs() > 0.01 }
    }
}

const NEGLIGIBLE: f64 = 1e-30;

/// Precomputed c_k c*_{k+d} (-1)^k for every diagonal offset d that carries weight.
struct Diagonals {
    offsets: Vec<(usize, Vec<C64>)>,
}

impl Diagonals {
    fn new(c: &[C64]) -> Self {
        // amplitudes this far below the peak cannot move W at double precision
        let peak = c.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
        let c: Vec<C64> = c.iter().map(|z| if z.norm_sqr() > NEGLIGIBLE * peak { *z } else { C64::new(0.0, 0.0) }).collect();
        let k = c.iter().rposition(|z| z.norm_sqr() > 0.0).map_or(0, |i| i + 1);
        let mut offsets = Vec::new();
        for d in 0..k {
            let mut coef: Vec<C64> = (0..k - d)
                .map(|n| {
                    let s = if n % 2 == 0 { 1.0 } else { -1.0 };
                    c[n] * c[n + d].conj() * s
                })
                .collect();
            let len = coef.iter().rposition(|z| z.norm_sqr() > 0.0).map_or(0, |i| i + 1);
            if len > 0 {
                coef.truncate(len);
                offsets.push((d, coef));
            }
        }
        Diagonals { offsets }
    }

    /// W(gamma) = (2/pi) sum c*_n c_m (-1)^m <n|D(2 gamma)|m>
    fn eval(&self, gamma: C64) -> f64 {
        let beta = 2.0 * gamma;
        let x = beta.norm_sqr();
        let phi = beta.arg();
        let mut total = 0.0;
        for (d, coef) in &self.offsets {
            let s = laguerre_weighted_sum(*d, x, coef);
            total += if *d == 0 { s.re } else { 2.0 * (C64::from_polar(1.0, *d as f64 * phi) * s).re };
        }
        FRAC_2_PI * total
    }
}

/// sum_k coef_k f_k^(d)(x) with the normalized Laguerre functions
/// f_k^(d) = sqrt(k!/(k+d)!) x^(d/2) e^(-x/2) L_k^(d)(x), via their three-term recurrence.
fn laguerre_weighted_sum(d: usize, x: f64, coef: &[C64]) -> C64 {
    const RESCALE: f64 = 1e100;
    let df = d as f64;
    let ln_f0 = if x == 0.0 {
        if d == 0 {
            0.0
        } else {
            return C64::new(0.0, 0.0);
        }
    } else {
        0.5 * df * x.ln() - 0.5 * x - 0.5 * ln_factorial(d as u64)
    };
    let (mut g_prev, mut g, mut ln_s) = (0.0f64, 1.0f64, ln_f0);
    let mut scale = ln_s.exp();
    let mut acc = C64::new(0.0, 0.0);
    for (k, c) in coef.iter().enumerate() {
        if scale > 0.0 {
            acc += c * (g * scale);
        }
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + df - x) * g - (kf * (kf + df)).sqrt() * g_prev) / ((kf + 1.0) * (kf + 1.0 + df)).sqrt();
        g_prev = g;
        g = next;
        if g.abs() > RESCALE {
            g /= RESCALE;
            g_prev /= RESCALE;
            ln_s += 100.0 * LN_10;
            scale = ln_s.exp();
        }
    }
    acc
}

fn sample_grid(grid: &WignerGrid, f: impl Fn(C64) -> f64 + Sync) -> Vec<f64> {
    (0..grid.np)
        .into_par_iter()
        .map(|j| (0..grid.nx).map(|i| f(C64::new(grid.x(i), grid.p(j)))).collect::<Vec<f64>>())
        .collect::<Vec<_>>()
        .concat()
}

/// Wigner function of a Fock-basis state on a grid.
pub fn wigner(state: &SingleModeState, grid: &WignerGrid) -> Result<WignerField> {
    grid.validate()?;
    let diag = Diagonals::new(&state.amplitudes());
    Ok(WignerField::from_values(*grid, sample_grid(grid, |g| diag.eval(g))))
}

pub fn wigner_at(state: &SingleModeState, x: f64, p: f64) -> f64 {
    Diagonals::new(&state.amplitudes()).eval(C64::new(x, p))
}

/// Wigner function of the m-photon-added squeezed vacuum left by a sideband-mode
/// measurement, via its finite core and the squeezing map. Works at any r.
pub struct PhotonAddedWigner {
    diag: Diagonals,
    stretch: f64,
    half_angle: C64,
}

impl PhotonAddedWigner {
    pub fn new(c: &SidebandCoupling, m: u64) -> Self {
        let f = photon_added_form(c, m);
        // e^{r_e} = sqrt((1 + t)/(1 - t)) with 1 - t kept exact
        let d = c.one_minus_two_beta_n();
        PhotonAddedWigner { diag: Diagonals::new(&f.core), stretch: ((2.0 - d) / d).sqrt(), half_angle: C64::from_polar(1.0, 0.5 * f.angle) }
    }

    pub fn at(&self, x: f64, p: f64) -> f64 {
        let w = C64::new(x, p) * self.half_angle.conj();
        let inv = C64::new(w.re * self.stretch, w.im / self.stretch) * self.half_angle;
        self.diag.eval(inv)
    }

    pub fn field(&self, grid: &WignerGrid) -> Result<WignerField> {
        grid.validate()?;
        Ok(WignerField::from_values(*grid, sample_grid(grid, |g| self.at(g.re, g.im))))
    }

    /// Standard deviations of the vacuum core mapped to the (squeezed, stretched) axes.
    pub fn axis_widths(&self) -> (f64, f64) {
        (0.5 / self.stretch, 0.5 * self.stretch)
    }

    /// Grid spanning `widths` core widths (scaled by sqrt(2m+1)) along both squeezing axes.
    /// Axis-aligned only when the squeezing angle is 0 or pi; otherwise both axes get the wide extent.
    pub fn natural_grid(&self, m: u64, widths: f64, n: usize) -> Result<WignerGrid> {
        let (narrow, wide) = self.axis_widths();
        let s = widths * (2.0 * m as f64 + 1.0).sqrt();
        let aligned = self.half_angle.im.abs() < 1e-12 || self.half_angle.re.abs() < 1e-12;
        let (hx, hp) = if !aligned {
            (s * wide, s * wide)
        } else if self.half_angle.re.abs() >= self.half_angle.im.abs() {
            (s * narrow, s * wide)
        } else {
            (s * wide, s * narrow)
        };
        WignerGrid::new(-hx, hx, n, -hp, hp, n)
    }
}
