use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{config, Result};
use crate::fockspace::{project_on_q, wigner, Method, SidebandCoupling, WignerField, WignerGrid};

/// Which BSV photon numbers enter a resolution average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParityFilter {
    All,
    /// Only l' with the parity of l (a parity-resolving detector).
    EvenOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FringeAxis {
    X,
    P,
}

/// Window for the modulation metric: half widths along and across the fringe axis.
/// Defaults to 3 vacuum widths (sigma = 1/2) along the fringes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FringeWindow {
    pub along: f64,
    pub across: f64,
}

impl Default for FringeWindow {
    fn default() -> Self {
        FringeWindow { along: 1.5, across: 0.5 }
    }
}

/// Cat fringes oscillate along x when Re alpha_N >= 0, along p otherwise.
pub fn fringe_axis(c: &SidebandCoupling, l: u64) -> FringeAxis {
    if c.alpha_n(l).re >= 0.0 {
        FringeAxis::X
    } else {
        FringeAxis::P
    }
}

pub fn members(l: u64, delta_l: u64, parity: ParityFilter) -> Vec<u64> {
    match parity {
        ParityFilter::All => (l..=l + delta_l).collect(),
        ParityFilter::EvenOnly => (l..=l + delta_l).step_by(2).collect(),
    }
}

/// max - min of W inside the window.
pub fn modulation(field: &WignerField, axis: FringeAxis, window: &FringeWindow) -> Result<f64> {
    let g = &field.grid;
    let (wx, wp) = match axis {
        FringeAxis::X => (window.along, window.across),
        FringeAxis::P => (window.across, window.along),
    };
    let eps = 1e-12;
    if g.x_min > -wx + eps || g.x_max < wx - eps || g.p_min > -wp + eps || g.p_max < wp - eps {
        return Err(config("fringe window exceeds the Wigner grid"));
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for j in 0..g.np {
        if g.p(j).abs() > wp + eps {
            continue;
        }
        for i in 0..g.nx {
            if g.x(i).abs() > wx + eps {
                continue;
            }
            let v = field.at(i, j);
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    Ok(hi - lo)
}

fn member_fields(c: &SidebandCoupling, ls: &[u64], grid: &WignerGrid, method: Method) -> Result<Vec<WignerField>> {
    ls.par_iter().map(|&l| wigner(&project_on_q(c, l, method)?, grid)).collect()
}

fn average(fields: &[WignerField]) -> WignerField {
    let n = fields.len() as f64;
    let mut values = vec![0.0; fields[0].values.len()];
    for f in fields {
        for (v, w) in values.iter_mut().zip(&f.values) {
            *v += w;
        }
    }
    values.iter_mut().for_each(|v| *v /= n);
    WignerField::from_values(fields[0].grid, values)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AveragedWigner {
    pub field: WignerField,
    pub members: Vec<u64>,
    pub axis: FringeAxis,
    pub modulation: f64,
    /// modulation / modulation at delta_l = 0
    pub ratio: f64,
}

/// Equal-weight average of the Wigner functions of the BSV projections l..l+delta_l.
pub fn resolution_averaged_wigner(
    c: &SidebandCoupling,
    l: u64,
    delta_l: u64,
    parity: ParityFilter,
    grid: &WignerGrid,
    window: &FringeWindow,
    method: Method,
) -> Result<AveragedWigner> {
    let axis = fringe_axis(c, l);
    let ls = members(l, delta_l, parity);
    let fields = member_fields(c, &ls, grid, method)?;
    let m0 = modulation(&fields[0], axis, window)?;
    let field = average(&fields);
    let m = modulation(&field, axis, window)?;
    Ok(AveragedWigner { field, members: ls, axis, modulation: m, ratio: m / m0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModulationPoint {
    pub delta_l: u64,
    pub ratio: f64,
    pub parity: ParityFilter,
}

/// Grid covering exactly the fringe window, `along` x `across` points.
pub fn window_grid(axis: FringeAxis, window: &FringeWindow, along: usize, across: usize) -> Result<WignerGrid> {
    match axis {
        FringeAxis::X => WignerGrid::new(-window.along, window.along, along, -window.across, window.across, across),
        FringeAxis::P => WignerGrid::new(-window.across, window.across, across, -window.along, window.along, along),
    }
}

/// Modulation ratio versus delta_l, sampled on the window only; each member field is computed once.
pub fn modulation_curve(
    c: &SidebandCoupling,
    l: u64,
    delta_ls: &[u64],
    parity: ParityFilter,
    window: &FringeWindow,
    resolution: (usize, usize),
    method: Method,
) -> Result<Vec<ModulationPoint>> {
    let axis = fringe_axis(c, l);
    let grid = window_grid(axis, window, resolution.0, resolution.1)?;
    let max_dl = delta_ls.iter().copied().max().unwrap_or(0);
    let ls = members(l, max_dl, parity);
    let fields = member_fields(c, &ls, &grid, method)?;
    let m0 = modulation(&fields[0], axis, window)?;
    let mut sum = vec![0.0; fields[0].values.len()];
    let mut running = Vec::with_capacity(ls.len());
    for f in &fields {
        for (s, v) in sum.iter_mut().zip(&f.values) {
            *s += v;
        }
        running.push(sum.clone());
    }
    delta_ls
        .iter()
        .map(|&dl| {
            let count = ls.iter().take_while(|&&x| x <= l + dl).count();
            let vals: Vec<f64> = running[count - 1].iter().map(|v| v / count as f64).collect();
            let m = modulation(&WignerField::from_values(grid, vals), axis, window)?;
            Ok(ModulationPoint { delta_l: dl, ratio: m / m0, parity })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stand_in() -> SidebandCoupling {
        SidebandCoupling::from_zeta_abs2(6.7e-10, 13.6, 0.0).unwrap().rescaled_for_alpha(200, 6.7).unwrap()
    }

    #[test]
    fn zero_resolution_is_unity() {
        let c = stand_in();
        let g = WignerGrid::square(2.0, 41).unwrap();
        let a = resolution_averaged_wigner(&c, 200, 0, ParityFilter::All, &g, &FringeWindow::default(), Method::Analytic).unwrap();
        assert_eq!(a.ratio, 1.0);
        assert_eq!(a.axis, FringeAxis::X);
    }

    #[test]
    fn window_must_fit() {
        let c = stand_in();
        let g = WignerGrid::square(1.0, 21).unwrap();
        assert!(resolution_averaged_wigner(&c, 200, 0, ParityFilter::All, &g, &FringeWindow::default(), Method::Analytic).is_err());
    }

    #[test]
    fn adjacent_parities_cancel() {
        let c = stand_in();
        let pts = modulation_curve(&c, 200, &[0, 1], ParityFilter::All, &FringeWindow::default(), (121, 41), Method::Analytic).unwrap();
        assert!(pts[1].ratio < 0.1, "{}", pts[1].ratio);
    }

    #[test]
    fn members_respect_parity() {
        assert_eq!(members(4, 4, ParityFilter::EvenOnly), vec![4, 6, 8]);
        assert_eq!(members(4, 2, ParityFilter::All), vec![4, 5, 6]);
    }
}
