//! Photon statistics, closed-form projection statistics and Wigner fringe washout.

mod fringes;
mod stats;

pub use fringes::{
    fringe_axis, members, modulation, modulation_curve, resolution_averaged_wigner, window_grid, AveragedWigner,
    FringeAxis, FringeWindow, ModulationPoint, ParityFilter,
};
pub use stats::{
    photon_statistics, projn_quadratures, projn_quadratures_theta0, projn_statistics_analytic,
    projq_statistics_analytic, Provenance, StatisticsReport, G2,
};
