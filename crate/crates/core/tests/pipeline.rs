//! Cross-module checks: spectrum pipeline end to end and Fock-space consistency.

use qshhg::fockspace::{
    joint_probability, marginal_probability, project_on_n, project_on_q, wigner, Method, SidebandCoupling, WignerGrid,
};
use qshhg::macroscopic::{hhg_band_photons, qshhg_band_photons};
use qshhg::observables::{photon_statistics, projn_statistics_analytic, projq_statistics_analytic};
use qshhg::scenario::SpectrumScenario;
use qshhg::sfa::{GridSpec, LaserPulse, MomentumGrid, SfaGrids};

fn light(s: &SpectrumScenario) -> GridSpec {
    GridSpec { samples_per_period: 128, momentum: MomentumGrid::for_drive(&s.pulse, &s.medium, 41, 21), ..s.grid }
}

#[test]
fn symmetric_drive_favours_odd_harmonics() {
    let mut s = SpectrumScenario::zno();
    s.grid = light(&s);
    s.max_order = 12;
    s.grid.max_harmonic = 15.0;
    let spec = qshhg::emission::spectral_coefficients(&s.medium, &s.pulse, &SfaGrids::new(&s.pulse, &s.grid).unwrap(), &s.request())
        .unwrap();
    let h = hhg_band_photons(&spec, &s.geometry, &s.orders()).unwrap();
    // band edges at half orders pick up the wings of the neighbouring odd lines
    for n in [8usize, 10] {
        let even = h.band(n).unwrap().n_photons;
        let odd = h.band(n - 1).unwrap().n_photons.min(h.band(n + 1).unwrap().n_photons);
        assert!(even < 0.25 * odd, "band {n}: {even} vs neighbours {odd}");
    }
}

#[test]
fn zero_field_emits_nothing() {
    let mut s = SpectrumScenario::zno();
    s.pulse = LaserPulse::new(3.2e-6, 0.0, 6.0).unwrap();
    s.max_order = 6;
    s.grid = GridSpec { momentum: MomentumGrid::for_drive(&SpectrumScenario::zno().pulse, &s.medium, 21, 11), ..light(&s) };
    let spec = qshhg::emission::spectral_coefficients(&s.medium, &s.pulse, &SfaGrids::new(&s.pulse, &s.grid).unwrap(), &s.request())
        .unwrap();
    let h = hhg_band_photons(&spec, &s.geometry, &s.orders()).unwrap();
    let q = qshhg_band_photons(&spec, &s.bsv, &s.geometry, 0.0, &s.orders()).unwrap();
    assert!(h.photons().iter().chain(q.photons().iter()).all(|&n| n == 0.0));
}

#[test]
fn joint_rows_sum_to_exact_marginal() {
    let c = SidebandCoupling::from_zeta_abs2(2e-3, 1.5, 0.4).unwrap();
    for m in [0u64, 1, 4, 9] {
        let row: f64 = (m..m + 2000).map(|n| joint_probability(&c, m, n)).sum();
        let exact = marginal_probability(&c, m, Method::Exact, false).unwrap().probability;
        assert!((row - exact).abs() <= 1e-12 * exact.max(1e-300) + 1e-300, "m={m}: {row} vs {exact}");
    }
}

#[test]
fn projected_states_match_closed_forms() {
    let c = SidebandCoupling::from_zeta_abs2(5.4e-4, 4.0, 0.0).unwrap();
    // the closed forms are asymptotic; at <n> ~ 1e3 they sit within a few 1e-3
    for m in [0u64, 2, 7] {
        let num = photon_statistics(&project_on_n(&c, m, false).unwrap()).unwrap();
        let ana = projn_statistics_analytic(&c, m);
        let tol = 1e-2;
        assert!((num.var_x1 / ana.var_x1 - 1.0).abs() < tol, "m={m}: {num:?} {ana:?}");
        assert!((num.var_x2 / ana.var_x2 - 1.0).abs() < tol, "m={m}: {num:?} {ana:?}");
    }
    let big = SidebandCoupling::from_zeta_abs2(5.4e-4, 10.0, 0.0).unwrap();
    let l = 20_000;
    let num = photon_statistics(&project_on_q(&big, l, Method::Exact).unwrap()).unwrap();
    let ana = projq_statistics_analytic(&big, l);
    assert!((num.mean_n / ana.mean_n - 1.0).abs() < 0.02);
}

#[test]
fn cat_wigner_is_normalized_and_has_fringes() {
    let c = SidebandCoupling::from_zeta_abs2(1e-3, 13.6, 0.0).unwrap().rescaled_for_alpha(200, 3.0).unwrap();
    let field = wigner(&project_on_q(&c, 200, Method::Analytic).unwrap(), &WignerGrid::default()).unwrap();
    assert!(!field.coarse);
    assert!(field.min() < -0.1);
}
