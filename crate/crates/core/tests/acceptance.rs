//! Acceptance report: one PASS/FAIL line per criterion.
//!
//! Exits 0 so that a red criterion does not hide the rest of the report;
//! set QSHHG_ACCEPTANCE_STRICT=1 to turn any FAIL into a non-zero exit.
//! QSHHG_ALLOW_EXPENSIVE=1 adds the r = 10 exact marginal run; QSHHG_ACCEPTANCE_ONLY selects criteria.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use qshhg::emission::{spectral_coefficients, SpectralRequest};
use qshhg::fockspace::{
    joint_probability, marginal_distribution, marginal_probability, project_on_n, project_on_q, wigner, wigner_at, Method, PhotonAddedWigner,
    SidebandCoupling, SingleModeState, WignerGrid,
};
use qshhg::macroscopic::{bsv_parameters, hhg_band_photons, qshhg_band_photons, susceptibility_ratio_scaling, PropagationGeometry};
use qshhg::observables::{
    modulation_curve, photon_statistics, projn_statistics_analytic, projq_statistics_analytic, FringeWindow, ParityFilter, G2,
};
use qshhg::scenario::SpectrumScenario;
use qshhg::sfa::{GridSpec, MomentumGrid, SfaGrids};
use qshhg::units;

/// Working point: r = 13.6, theta = 0, |zeta_N|^2 = 6.7e-10.
fn working_point() -> SidebandCoupling {
    SidebandCoupling::from_zeta_abs2(6.7e-10, 13.6, 0.0).unwrap()
}

/// Desk-scale comparison point: |zeta_N|^2 = 5.4e-4, theta = 0.
fn desk(r: f64) -> SidebandCoupling {
    SidebandCoupling::from_zeta_abs2(5.4e-4, r, 0.0).unwrap()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Worst relative exact/analytic gap over entries with analytic P > 1e-12, the entry count,
/// and the analytic sum carried into the far tail.
fn marginal_check(c: &SidebandCoupling, allow: bool) -> qshhg::Result<(f64, usize, f64)> {
    let mut analytic = Vec::new();
    let mut m = 0u64;
    loop {
        let a = marginal_probability(c, m, Method::Analytic, false).unwrap().probability;
        analytic.push(a);
        if m > 10 && a < 1e-20 {
            break;
        }
        m += 1;
    }
    let exact = marginal_distribution(c, m, Method::Exact, allow)?;
    let mut worst = 0.0f64;
    let mut count = 0usize;
    for (a, e) in analytic.iter().zip(&exact) {
        if *a > 1e-12 {
            worst = worst.max(rel(*a, e.probability));
            count += 1;
        }
    }
    Ok((worst, count, analytic.iter().sum()))
}

fn criterion_1() -> Outcome {
    let c = desk(5.0);
    let (worst, count, sum) = marginal_check(&c, false).unwrap();
    let want_sum = 1.0 / (1.0 + 2.0 * c.zeta_abs2()).sqrt();
    let sum_err = (sum - want_sum).abs();
    let mut pass = worst <= 0.05 && sum_err <= 1e-6;
    let mut detail = format!(
        "r=5 |zeta|^2=5.4e-4: max |exact-analytic|/exact = {:.2}% over {count} entries with P>1e-12; |sum P - 1/sqrt(1+2|zeta|^2)| = {sum_err:.1e}",
        100.0 * worst
    );
    let r10 = desk(10.0);
    if std::env::var("QSHHG_ALLOW_EXPENSIVE").is_ok_and(|v| v == "1") {
        match marginal_check(&r10, true) {
            Ok((w, n, _)) => {
                pass &= w <= 0.05;
                detail += &format!("; r=10: {:.2}% over {n} entries", 100.0 * w);
            }
            Err(e) => {
                pass = false;
                detail += &format!("; r=10: {e}");
            }
        }
    } else {
        detail += &format!("; r=10 skipped (exact P(m+1)/P(m) -> {:.6})", r10.marginal_decay_ratio());
    }
    // the comparison figure's caption quotes zeta_N = 5.4e-4 itself
    for r in [5.0, 10.0] {
        let caption = SidebandCoupling::from_zeta_abs2(5.4e-4f64.powi(2), r, 0.0).unwrap();
        let (wc, nc, _) = marginal_check(&caption, true).unwrap();
        detail += &format!(" [note: |zeta|=5.4e-4, r={r}: {:.2}% over {nc} entries]", 100.0 * wc);
    }
    Outcome { pass, detail }
}

fn criterion_2() -> Outcome {
    let c = working_point();
    let mut bad = 0;
    let mut populated = 0;
    for m in 0..=200u64 {
        for n in 0..=200u64 {
            let p = joint_probability(&c, m, n);
            if n < m || (n - m) % 2 == 1 {
                bad += (p != 0.0) as usize;
            } else if p > 0.0 {
                populated += 1;
            }
        }
    }
    Outcome { pass: bad == 0 && populated > 0, detail: format!("{bad} non-zero forbidden entries in 201x201; {populated} allowed entries populated") }
}

fn criterion_3() -> Outcome {
    let c = desk(10.0);
    let mut ls: Vec<u64> = (0..=19).map(|k| 10f64.powf(k as f64 / 4.0).round() as u64).collect();
    ls.dedup();
    let mut worst_hi = 0.0f64;
    let mut worst_lo = 0.0f64;
    for &l0 in &ls {
        for l in [l0, l0 + 1] {
            let a = projq_statistics_analytic(&c, l);
            let n = photon_statistics(&project_on_q(&c, l, Method::Exact).unwrap()).unwrap();
            let mut e = rel(n.var_x1, a.var_x1).max(rel(n.var_x2, a.var_x2));
            if let (Some(ga), Some(gn)) = (a.g2.value(), n.g2.value()) {
                if ga > 0.0 {
                    e = e.max(rel(gn, ga));
                } else {
                    e = e.max((gn - ga).abs());
                }
            }
            if c.alpha_n(l).norm() >= 1.0 {
                worst_hi = worst_hi.max(e);
            } else {
                worst_lo = worst_lo.max(e);
            }
        }
    }
    let even0 = photon_statistics(&project_on_q(&c, 2, Method::Exact).unwrap()).unwrap();
    let odd0 = photon_statistics(&project_on_q(&c, 3, Method::Exact).unwrap()).unwrap();
    let big_l = (20.0 / c.alpha_n(2).norm() * 2.0) as u64;
    let big = photon_statistics(&project_on_q(&c, big_l, Method::Exact).unwrap()).unwrap();
    let lim = [
        rel(even0.var_x1, 0.25),
        rel(even0.var_x2, 0.25),
        rel(odd0.var_x1, 0.75),
        rel(odd0.var_x2, 0.75),
        rel(big.g2.value().unwrap(), 1.0),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Outcome {
        pass: worst_hi <= 0.05 && worst_lo <= 0.15 && lim <= 0.01,
        detail: format!(
            "max deviation {:.2}% (|alpha|>=1), {:.2}% (|alpha|<1) over {} l values; limits within {:.2}%",
            100.0 * worst_hi,
            100.0 * worst_lo,
            2 * ls.len(),
            100.0 * lim
        ),
    }
}

fn criterion_4() -> Outcome {
    let wp = working_point();
    let exact_values = projn_statistics_analytic(&wp, 0).g2 == G2::Value(3.0)
        && (projn_statistics_analytic(&wp, 1).g2.value().unwrap() - 5.0 / 3.0).abs() < 1e-15;
    let c = desk(5.0);
    let mut worst = 0.0f64;
    for m in [0u64, 1, 2, 3, 5, 10, 20] {
        let s = photon_statistics(&project_on_n(&c, m, false).unwrap()).unwrap();
        worst = worst.max(rel(s.g2.value().unwrap(), 1.0 + 2.0 / (2.0 * m as f64 + 1.0)));
    }
    let prod = projn_statistics_analytic(&wp, 0).uncertainty_product();
    let prod_err = rel(prod, 1.0 / 16.0);
    let perp = wp.with_theta(FRAC_PI_2);
    let no_squeeze = (0..=100u64).all(|m| {
        let s = projn_statistics_analytic(&perp, m);
        s.var_x1 >= 0.25 && s.var_x2 >= 0.25
    });
    Outcome {
        pass: exact_values && worst <= 0.02 && prod_err <= 1e-3 && no_squeeze,
        detail: format!(
            "analytic 3 and 5/3: {exact_values}; numeric g2 at r=5 within {:.3}%; m=0 product 16*dX1^2*dX2^2 - 1 = {:.1e}; theta=pi/2 unsqueezed for m<=100: {no_squeeze}",
            100.0 * worst,
            16.0 * prod - 1.0
        ),
    }
}

fn criterion_5() -> Outcome {
    let v = (wigner_at(&SingleModeState::vacuum(), 0.0, 0.0) - 2.0 / PI).abs();
    let one = (wigner_at(&SingleModeState::fock(1), 0.0, 0.0) + 2.0 / PI).abs();
    let grid = WignerGrid::default();
    let stand_in = working_point().rescaled_for_alpha(200, 6.7).unwrap();
    let states = [
        SingleModeState::vacuum(),
        SingleModeState::fock(1),
        project_on_q(&stand_in, 200, Method::Exact).unwrap(),
        project_on_q(&stand_in, 201, Method::Exact).unwrap(),
        project_on_n(&desk(1.0), 1, false).unwrap(),
    ];
    let mut worst_norm = 0.0f64;
    for s in &states {
        worst_norm = worst_norm.max((wigner(s, &grid).unwrap().integral - 1.0).abs());
    }
    let pa = PhotonAddedWigner::new(&working_point(), 1);
    let field = pa.field(&pa.natural_grid(1, 6.0, 201).unwrap()).unwrap();
    worst_norm = worst_norm.max((field.integral - 1.0).abs());
    let negative = field.min() < 0.0 && pa.at(0.0, 0.0) < 0.0;
    Outcome {
        pass: v <= 1e-6 && one <= 1e-6 && worst_norm <= 0.01 && negative,
        detail: format!(
            "W_vac(0)-2/pi = {v:.1e}, W_1(0)+2/pi = {one:.1e}; worst |integral-1| = {worst_norm:.1e}; photon-added m=1 min W = {:.3}",
            field.min()
        ),
    }
}

fn criterion_6() -> Outcome {
    let c = working_point().rescaled_for_alpha(200, 6.7).unwrap();
    let dls: Vec<u64> = (0..=100).collect();
    let window = FringeWindow::default();
    let all = modulation_curve(&c, 200, &dls, ParityFilter::All, &window, (121, 41), Method::Exact).unwrap();
    let even = modulation_curve(&c, 200, &dls, ParityFilter::EvenOnly, &window, (121, 41), Method::Exact).unwrap();
    let adjacent = all[1].ratio;
    let even100 = even[100].ratio;
    let dominates = all.iter().zip(&even).skip(1).all(|(a, e)| e.ratio > a.ratio);
    Outcome {
        pass: adjacent < 0.1 && even100 > 0.5 && dominates,
        detail: format!(
            "|alpha|={:.2}: ratio(dl=1, all) = {adjacent:.3}; ratio(dl=100, even) = {even100:.3}; even above all for every dl: {dominates}",
            c.alpha_n(200).norm()
        ),
    }
}

fn criterion_7() -> Outcome {
    let coh = PropagationGeometry::zno().coherence_factor();
    let bsv = bsv_parameters(10e-9, 1.6e-6, 50e-9, 100e-6).unwrap();
    let ok_coh = rel(coh, 1.07e23) <= 0.005;
    let ok_r = (13.3..=13.7).contains(&bsv.r);
    let ok_mode = rel(bsv.mode_volume_density, 2e12) <= 0.10;
    Outcome {
        pass: ok_coh && ok_r && ok_mode,
        detail: format!(
            "(N0 w l)^2/2c = {coh:.4e} s/m^3 [{}]; r(10 nJ, 1.6 um) = {:.3} [{}]; mode density = {:.3e} m^-3 [{}]",
            ok_coh, bsv.r, ok_r, bsv.mode_volume_density, ok_mode
        ),
    }
}

fn criterion_8() -> Outcome {
    let base = susceptibility_ratio_scaling(1.0, 1.0, 1.0).unwrap();
    let quarter = susceptibility_ratio_scaling(1.0, 0.25, 0.25).unwrap();
    let gas_to_solid = quarter / base;
    let w = |lambda: f64| 2.0 * PI * units::C / lambda;
    let zno = susceptibility_ratio_scaling(1.0, w(3.2e-6), 0.25).unwrap();
    let bi = susceptibility_ratio_scaling(1.0, w(10e-6), 0.002).unwrap();
    let enh = bi / zno;
    Outcome {
        pass: (gas_to_solid - 16384.0).abs() < 1e-9 && (4e6..=6e6).contains(&enh),
        detail: format!("factor-4 frequency and mass: {gas_to_solid}; ZnO -> m*=0.002 at 10 um: {enh:.3e}"),
    }
}

/// Order of magnitude of the solid's HHG plateau: about 1e2 sideband photons at N = 8,
/// roughly one decade below the harmonics.
const HHG_PLATEAU_REFERENCE: f64 = 1e3;

fn geometric_mean(v: &[f64]) -> f64 {
    (v.iter().map(|x| x.ln()).sum::<f64>() / v.len() as f64).exp()
}

fn criterion_9() -> Outcome {
    let zs = SpectrumScenario::zno();
    let z = zs.run().unwrap();
    let plateau = zs.plateau_orders();
    let hhg: Vec<(usize, f64)> = plateau.iter().map(|&n| (n, z.hhg.band(n).unwrap().n_photons)).collect();
    let lo = HHG_PLATEAU_REFERENCE / 10f64.powf(1.5);
    let hi = HHG_PLATEAU_REFERENCE * 10f64.powf(1.5);
    let hhg_ok = hhg.iter().all(|(_, v)| (lo..=hi).contains(v));
    let z_sidebands = [8usize, 10, 12, 14];
    let z_ratios: Vec<f64> = z_sidebands.iter().map(|&n| z.sideband_ratio(n).unwrap()).collect();
    let ratio_ok = z_ratios.iter().all(|r| (1e-3..=10f64.powf(-0.5)).contains(r));

    let hs = SpectrumScenario::hydrogen();
    let h = hs.run().unwrap();
    let h_plateau = hs.plateau_orders();
    let h_sidebands: Vec<usize> =
        (h_plateau[0] + 1..*h_plateau.last().unwrap()).filter(|n| n % 2 == 0).collect();
    let h_ratios: Vec<f64> = h_sidebands.iter().map(|&n| h.sideband_ratio(n).unwrap()).collect();
    let factor = geometric_mean(&z_ratios) / geometric_mean(&h_ratios);
    let factor_ok = (1e2..=1e4).contains(&factor);
    let modulation = z.theta_modulation(8).unwrap();
    let mod_ok = modulation >= 100.0;
    let fmt: Vec<String> = hhg.iter().map(|(n, v)| format!("{n}:{v:.2e}")).collect();
    Outcome {
        pass: hhg_ok && ratio_ok && factor_ok && mod_ok,
        detail: format!(
            "ZnO plateau HHG [{}] vs [{lo:.0}, {hi:.0}] [{hhg_ok}]; sideband/HHG N=8..14 [{}] [{ratio_ok}]; ZnO/H ratio factor {factor:.0} [{factor_ok}]; theta max/min of <n>_8 = {modulation:.1} [{mod_ok}]",
            fmt.join(" "),
            z_ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>().join(" ")
        ),
    }
}

fn band_photons(s: &SpectrumScenario, grid: GridSpec, volume: f64) -> (Vec<f64>, Vec<f64>) {
    let grids = SfaGrids::new(&s.pulse, &grid).unwrap();
    let req = SpectralRequest { volume_m3: volume, ..s.request() };
    let spec = spectral_coefficients(&s.medium, &s.pulse, &grids, &req).unwrap();
    let orders = s.orders();
    let h = hhg_band_photons(&spec, &s.geometry, &orders).unwrap().photons();
    let q = qshhg_band_photons(&spec, &s.bsv, &s.geometry, 0.0, &orders).unwrap().photons();
    (h, q)
}

fn max_bits_mismatch(a: &[f64], b: &[f64]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x.to_bits() != y.to_bits()).count()
}

fn criterion_10() -> Outcome {
    let s = SpectrumScenario::zno();
    // volume invariance on a light grid
    let light = GridSpec {
        samples_per_period: 128,
        momentum: MomentumGrid::for_drive(&s.pulse, &s.medium, 41, 21),
        ..s.grid
    };
    let (h1, q1) = band_photons(&s, light, 1.0);
    let (h2, q2) = band_photons(&s, light, 7.3e-3);
    let v_err = h1.iter().zip(&h2).chain(q1.iter().zip(&q2)).map(|(a, b)| rel(*b, *a)).fold(0.0, f64::max);

    // grid doubling at the reference resolution, bands with at least one photon
    let (hr, qr) = band_photons(&s, s.grid, 1.0);
    let dt = GridSpec { samples_per_period: 2 * s.grid.samples_per_period, ..s.grid };
    let dp = GridSpec { momentum: s.grid.momentum.doubled_par().doubled_perp(), ..s.grid };
    let mut worst = 0.0f64;
    for g in [dt, dp] {
        let (h, q) = band_photons(&s, g, 1.0);
        for (a, b) in hr.iter().zip(&h).chain(qr.iter().zip(&q)) {
            if *a >= 1.0 {
                worst = worst.max(rel(*b, *a));
            }
        }
    }

    // thread-count independence
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| band_photons(&s, light, 1.0))
    };
    let (a1, b1) = run(1);
    let (a3, b3) = run(3);
    let mism = max_bits_mismatch(&a1, &a3) + max_bits_mismatch(&b1, &b3);
    Outcome {
        pass: v_err < 1e-10 && worst < 0.10 && mism == 0,
        detail: format!(
            "volume pair max rel diff {v_err:.1e}; grid doubling (dt, p) max band change {:.2}%; bit mismatches 1 vs 3 threads: {mism}",
            100.0 * worst
        ),
    }
}

fn main() {
    let strict = std::env::var("QSHHG_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let criteria: [(usize, fn() -> Outcome); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    // comma-separated subset, e.g. QSHHG_ACCEPTANCE_ONLY=6,9
    let only: Option<Vec<usize>> =
        std::env::var("QSHHG_ACCEPTANCE_ONLY").ok().map(|v| v.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut failed = 0;
    let mut ran = 0;
    for (id, f) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        ran += 1;
        let t0 = Instant::now();
        let o = f();
        failed += (!o.pass) as usize;
        println!(
            "criterion {id:>2}: {} ({:.1}s) {}",
            if o.pass { "PASS" } else { "FAIL" },
            t0.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("acceptance: {} of {ran} criteria pass", ran - failed);
    if strict && failed > 0 {
        std::process::exit(1);
    }
}
