//! Stage orchestration in dependency order: sfa/emission, macroscopic, fockspace, observables.

use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use qshhg::emission::{spectral_coefficients, SpectralCoefficients, SpectralRequest};
use qshhg::fockspace::{
    joint_distribution, marginal_distribution, project_on_n, project_on_q, wigner, Method, PhotonAddedWigner,
    SidebandCoupling, WignerField, WignerGrid,
};
use qshhg::macroscopic::{
    hhg_band_photons, qshhg_band_photons, susceptibility_ratio_scaling, theta_averaged_qshhg, BandPhotonReport, ThetaScan,
};
use qshhg::observables::{
    modulation_curve, photon_statistics, projn_quadratures, projn_statistics_analytic, projq_statistics_analytic,
    resolution_averaged_wigner, FringeWindow, ParityFilter, StatisticsReport,
};
use qshhg::scenario::SpectrumScenario;
use qshhg::sfa::{GridSpec, SfaGrids, SigmaMethod};
use qshhg::{units, C64};

use crate::config::{OutputKind, ScenarioConfig, WignerState, ZetaSource};
use crate::error::{CliError, Result};
use crate::output::{num, ConvergenceRecord, GridSummary, OutputDir, RunManifest, StageTiming, MANIFEST_SCHEMA, MANIFEST_SCHEMA_VERSION};
use crate::plot;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the ambient rayon pool.
    pub threads: Option<usize>,
    pub allow_expensive: bool,
    pub figure: Option<String>,
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => f(),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(format!("cannot build a pool of {n} threads: {e}")))?;
            pool.install(f)
        }
    }
}

pub fn run_scenario(cfg: &ScenarioConfig, out: &Path, opts: &RunOptions) -> Result<RunManifest> {
    cfg.validate()?;
    with_pool(opts.threads, || Runner::new(cfg, out, opts)?.run())
}

/// Spectral coefficients on the configured frequency grid.
pub struct SpectralRun {
    pub spec: SpectralCoefficients,
    /// Zero drive field: the coefficients are zero by construction and no kernel ran.
    pub trivial: bool,
    pub time_samples: Option<usize>,
    pub grid: GridSpec,
}

pub fn spectral_run(cfg: &ScenarioConfig, grid: GridSpec) -> Result<SpectralRun> {
    let medium = cfg.medium_model()?;
    let pulse = cfg.pulse()?;
    let n = cfg.samples_per_order * cfg.max_order + 1;
    let req = SpectralRequest::harmonic_range(&pulse, 0.5, cfg.max_order as f64 + 0.5, n);
    if pulse.peak_field_v_per_m == 0.0 {
        let zero = vec![C64::new(0.0, 0.0); n];
        let spec = SpectralCoefficients {
            omega: req.omegas,
            h: zero.clone(),
            f: zero.clone(),
            g: zero,
            omega0: pulse.omega0(),
            omega_q: req.omega_q,
            volume_m3: req.volume_m3,
        };
        return Ok(SpectralRun { spec, trivial: true, time_samples: None, grid });
    }
    let grids = SfaGrids::new(&pulse, &grid)?;
    let spec = spectral_coefficients(&medium, &pulse, &grids, &req)?;
    Ok(SpectralRun { spec, trivial: false, time_samples: Some(grids.time().len()), grid })
}

pub struct Bands {
    pub hhg: BandPhotonReport,
    pub qshhg: ThetaScan<BandPhotonReport>,
}

impl Bands {
    pub fn qshhg_mean(&self, i: usize) -> f64 {
        self.qshhg.values.iter().map(|r| r.bands[i].n_photons).sum::<f64>() / self.qshhg.values.len() as f64
    }
}

pub fn band_photons(cfg: &ScenarioConfig, spec: &SpectralCoefficients) -> Result<Bands> {
    let orders: Vec<usize> = (1..=cfg.max_order).collect();
    let geo = cfg.geometry()?;
    let hhg = hhg_band_photons(spec, &geo, &orders)?;
    let qshhg = theta_averaged_qshhg(spec, &cfg.bsv()?, &geo, &orders, cfg.theta_samples)?;
    Ok(Bands { hhg, qshhg })
}

struct Sideband {
    order: usize,
    coupling: SidebandCoupling,
}

fn stats_row(head: Vec<String>, method: &str, s: &StatisticsReport) -> Vec<String> {
    let mut row = head;
    row.extend([method.to_string(), num(s.mean_n), num(s.g2.as_f64()), num(s.var_x1), num(s.var_x2)]);
    row
}

struct Runner<'a> {
    cfg: &'a ScenarioConfig,
    opts: &'a RunOptions,
    out: OutputDir,
    stages: Vec<StageTiming>,
    convergence: Vec<ConvergenceRecord>,
    notes: Vec<String>,
    grids: GridSummary,
    trivial: bool,
}

impl<'a> Runner<'a> {
    fn new(cfg: &'a ScenarioConfig, out: &Path, opts: &'a RunOptions) -> Result<Self> {
        Ok(Runner {
            cfg,
            opts,
            out: OutputDir::create(out)?,
            stages: Vec::new(),
            convergence: Vec::new(),
            notes: Vec::new(),
            grids: GridSummary::default(),
            trivial: false,
        })
    }

    fn allow(&self) -> bool {
        self.cfg.allow_expensive || self.opts.allow_expensive
    }

    fn timed<T>(&mut self, stage: &str, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let t = Instant::now();
        let v = f(self)?;
        self.stages.push(StageTiming { stage: stage.into(), wall_time_s: t.elapsed().as_secs_f64() });
        Ok(v)
    }

    fn record(&mut self, stage: &str, quantity: &str, value: f64, tolerance: Option<f64>) {
        let passed = tolerance.map(|t| value.abs() <= t);
        self.convergence.push(ConvergenceRecord { stage: stage.into(), quantity: quantity.into(), value, tolerance, passed });
    }

    fn run(mut self) -> Result<RunManifest> {
        let cfg = self.cfg;
        self.out.write("config.toml", cfg.to_toml().as_bytes())?;
        let spectrum = if cfg.needs_spectrum() { Some(self.timed("sfa-emission", |r| r.spectrum())?) } else { None };
        if cfg.wants(OutputKind::Spectra) {
            let s = spectrum.as_ref().expect("spectrum stage ran");
            self.timed("macroscopic", |r| r.write_spectra(s))?;
        }
        let sidebands = if cfg.wants_fock() { self.sidebands(spectrum.as_ref())? } else { Vec::new() };
        if cfg.wants(OutputKind::JointDistribution) {
            self.timed("joint-distribution", |r| r.joint(&sidebands))?;
        }
        if cfg.wants(OutputKind::Marginal) {
            self.timed("marginal", |r| r.marginal(&sidebands))?;
        }
        if cfg.wants(OutputKind::ProjQ) {
            self.timed("proj-q", |r| r.projq(&sidebands))?;
        }
        if cfg.wants(OutputKind::ProjN) {
            self.timed("proj-N", |r| r.projn(&sidebands))?;
        }
        if cfg.wants(OutputKind::Wigner) {
            self.timed("wigner", |r| r.wigner(&sidebands))?;
        }
        if cfg.wants(OutputKind::Scaling) {
            self.timed("scaling", |r| r.scaling())?;
        }
        self.out.write("plot.py", plot::script(&cfg.label, self.opts.figure.as_deref()).as_bytes())?;
        let manifest = RunManifest {
            schema: MANIFEST_SCHEMA.into(),
            schema_version: MANIFEST_SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            label: cfg.label.clone(),
            figure: self.opts.figure.clone(),
            config_sha256: crate::output::sha256_hex(cfg.to_toml().as_bytes()),
            trivial: self.trivial,
            threads: rayon::current_num_threads(),
            grids: self.grids.clone(),
            stages: self.stages,
            convergence: self.convergence,
            notes: self.notes,
            outputs: Vec::new(),
        };
        self.out.finish(manifest)
    }

    fn spectrum(&mut self) -> Result<SpectralRun> {
        let cfg = self.cfg;
        let grid = cfg.grid_spec(&cfg.pulse()?, &cfg.medium_model()?);
        let run = spectral_run(cfg, grid)?;
        self.trivial = run.trivial;
        if run.trivial {
            self.notes.push("zero drive field: emission is identically zero, strong-field kernels skipped".into());
        }
        self.grids.samples_per_cycle = Some(grid.samples_per_period);
        self.grids.time_samples = run.time_samples;
        self.grids.momentum_par_samples = Some(grid.momentum.par_samples);
        self.grids.momentum_perp_samples = Some(grid.momentum.perp_samples);
        self.grids.frequency_samples = Some(run.spec.omega.len());
        self.grids.theta_samples = Some(cfg.theta_samples);
        self.grids.sigma = Some(match grid.sigma {
            SigmaMethod::HighFrequency => "high-frequency".into(),
            SigmaMethod::ExactRecursion => "exact".into(),
        });
        Ok(run)
    }

    fn write_spectra(&mut self, run: &SpectralRun) -> Result<()> {
        let cfg = self.cfg;
        let spec = &run.spec;
        let bands = band_photons(cfg, spec)?;
        let nb = bands.hhg.bands.len();
        self.out.csv(
            "hhg_bands.csv",
            &["order", "n_photons"],
            bands.hhg.bands.iter().map(|b| vec![b.order.to_string(), num(b.n_photons)]),
        )?;
        let q_rows = (0..nb).map(|i| {
            let vals: Vec<f64> = bands.qshhg.values.iter().map(|r| r.bands[i].n_photons).collect();
            let z2 = bands.qshhg.values.iter().map(|r| r.bands[i].zeta.map_or(0.0, |z| z.norm_sqr())).sum::<f64>()
                / vals.len() as f64;
            vec![
                bands.hhg.bands[i].order.to_string(),
                num(bands.qshhg_mean(i)),
                num(vals.iter().copied().fold(f64::INFINITY, f64::min)),
                num(vals.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
                num(z2),
            ]
        });
        self.out.csv(
            "qshhg_bands.csv",
            &["order", "n_photons_theta_avg", "n_photons_theta_min", "n_photons_theta_max", "zeta_abs2_theta_avg"],
            q_rows,
        )?;

        // band samples share their edges; keep each frequency once
        let mut rows = Vec::new();
        let mut last = f64::NEG_INFINITY;
        for i in 0..nb {
            let h = &bands.hhg.bands[i];
            for (k, (&w, &d)) in h.omega.iter().zip(&h.dn_domega).enumerate() {
                if w <= last {
                    continue;
                }
                last = w;
                let q = bands.qshhg.values.iter().map(|r| r.bands[i].dn_domega[k]).sum::<f64>() / bands.qshhg.values.len() as f64;
                rows.push(vec![num(w / spec.omega0), num(w), num(d), num(q)]);
            }
        }
        self.out.csv(
            "spectrum.csv",
            &["harmonic_order", "omega_rad_per_s", "hhg_dn_domega_s", "qshhg_dn_domega_theta_avg_s"],
            rows,
        )?;

        if !cfg.theta_list_rad.is_empty() {
            let orders: Vec<usize> = (1..=cfg.max_order).collect();
            let (bsv, geo) = (cfg.bsv()?, cfg.geometry()?);
            let reports = cfg
                .theta_list_rad
                .par_iter()
                .map(|&t| qshhg_band_photons(spec, &bsv, &geo, t, &orders))
                .collect::<qshhg::Result<Vec<_>>>()?;
            let rows = cfg.theta_list_rad.iter().zip(&reports).flat_map(|(t, rep)| {
                rep.bands.iter().map(move |b| {
                    let z = b.zeta.unwrap_or_default();
                    vec![num(*t), b.order.to_string(), num(b.n_photons), num(z.norm_sqr()), num(z.arg())]
                })
            });
            self.out.csv("qshhg_theta.csv", &["theta_rad", "order", "n_photons", "zeta_abs2", "zeta_arg_rad"], rows)?;
        }

        let scen = SpectrumScenario {
            medium: cfg.medium_model()?,
            pulse: cfg.pulse()?,
            grid: run.grid,
            geometry: cfg.geometry()?,
            bsv: cfg.bsv()?,
            max_order: cfg.max_order,
            theta_samples: cfg.theta_samples,
        };
        #[derive(Serialize)]
        struct Summary {
            threshold_order: f64,
            cutoff_order: f64,
            plateau_orders: Vec<usize>,
            coherence_factor_s_per_m3: f64,
            bsv_r: f64,
            bsv_mode_density_per_m3: f64,
            hhg_photons_total: f64,
            qshhg_photons_theta_avg_total: f64,
        }
        let summary = Summary {
            threshold_order: scen.threshold_order(),
            cutoff_order: scen.cutoff_order(),
            plateau_orders: scen.plateau_orders(),
            coherence_factor_s_per_m3: scen.geometry.coherence_factor(),
            bsv_r: scen.bsv.r,
            bsv_mode_density_per_m3: scen.bsv.mode_volume_density,
            hhg_photons_total: bands.hhg.photons().iter().sum(),
            qshhg_photons_theta_avg_total: (0..nb).map(|i| bands.qshhg_mean(i)).sum(),
        };
        self.out.json("spectra_summary.json", &summary)
    }

    fn sidebands(&mut self, spectrum: Option<&SpectralRun>) -> Result<Vec<Sideband>> {
        let cfg = self.cfg;
        let r = cfg.fock_squeezing()?;
        let z2: Vec<f64> = match cfg.zeta_source {
            ZetaSource::Fixed => vec![cfg.zeta_abs2; cfg.sideband_orders.len()],
            ZetaSource::Spectrum => {
                let run = spectrum.expect("spectrum stage ran");
                let rep = qshhg_band_photons(&run.spec, &cfg.bsv()?, &cfg.geometry()?, cfg.theta_rad, &cfg.sideband_orders)?;
                rep.bands.iter().map(|b| b.zeta.map_or(0.0, |z| z.norm_sqr())).collect()
            }
        };
        let sidebands = cfg
            .sideband_orders
            .iter()
            .zip(z2)
            .map(|(&order, z)| Ok(Sideband { order, coupling: SidebandCoupling::from_zeta_abs2(z, r, cfg.theta_rad)? }))
            .collect::<Result<Vec<_>>>()?;
        let rows = sidebands.iter().map(|s| {
            let c = &s.coupling;
            vec![
                s.order.to_string(),
                num(c.zeta_abs2()),
                num(c.r()),
                num(c.theta()),
                num(c.mean_sideband_photons()),
                num(c.effective_squeezing()),
                num(c.marginal_decay_ratio()),
            ]
        });
        self.out.csv(
            "sidebands.csv",
            &["order", "zeta_abs2", "r", "theta_rad", "mean_sideband_photons", "effective_squeezing", "marginal_decay_ratio"],
            rows,
        )?;
        Ok(sidebands)
    }

    fn joint(&mut self, sidebands: &[Sideband]) -> Result<()> {
        let (mm, nm) = (self.cfg.joint_m_max, self.cfg.joint_n_max);
        let mut rows = Vec::new();
        for s in sidebands {
            let d = joint_distribution(&s.coupling, mm, nm);
            let total: f64 = d.iter().flatten().sum();
            self.record("joint-distribution", &format!("captured probability, N = {}", s.order), total, None);
            for (m, row) in d.iter().enumerate() {
                for (n, p) in row.iter().enumerate() {
                    rows.push(vec![s.order.to_string(), m.to_string(), n.to_string(), num(*p)]);
                }
            }
        }
        self.out.csv("joint.csv", &["order", "m", "n", "probability"], rows)
    }

    fn marginal(&mut self, sidebands: &[Sideband]) -> Result<()> {
        let allow = self.allow();
        let mut rows = Vec::new();
        for s in sidebands {
            let ana = marginal_distribution(&s.coupling, self.cfg.marginal_m_max, Method::Analytic, allow)?;
            let exact = if self.cfg.marginal_exact {
                Some(marginal_distribution(&s.coupling, self.cfg.marginal_m_max, Method::Exact, allow)?)
            } else {
                None
            };
            let sum = |v: &[qshhg::fockspace::MarginalValue]| v.iter().map(|x| x.probability).sum::<f64>();
            self.record("marginal", &format!("captured probability (analytic), N = {}", s.order), sum(&ana), None);
            if let Some(e) = &exact {
                self.record("marginal", &format!("captured probability (exact), N = {}", s.order), sum(e), None);
            }
            for (i, a) in ana.iter().enumerate() {
                let e = exact.as_ref().map_or(String::new(), |e| num(e[i].probability));
                rows.push(vec![s.order.to_string(), a.m.to_string(), num(a.probability), e]);
            }
        }
        self.out.csv("marginal.csv", &["order", "m", "p_analytic", "p_exact"], rows)
    }

    fn projq(&mut self, sidebands: &[Sideband]) -> Result<()> {
        let ls = self.cfg.projq_ls();
        let exact = self.cfg.projq_exact;
        let mut rows = Vec::new();
        for s in sidebands {
            let c = &s.coupling;
            let per_l = ls
                .par_iter()
                .map(|&l| {
                    let head = || vec![s.order.to_string(), num(c.theta()), l.to_string(), (l % 2).to_string(), num(c.alpha_n(l).norm())];
                    let mut out = vec![stats_row(head(), "analytic", &projq_statistics_analytic(c, l))];
                    if exact {
                        out.push(stats_row(head(), "numeric", &photon_statistics(&project_on_q(c, l, Method::Exact)?)?));
                    }
                    Ok(out)
                })
                .collect::<qshhg::Result<Vec<_>>>()?;
            rows.extend(per_l.into_iter().flatten());
        }
        self.out.csv(
            "projq.csv",
            &["order", "theta_rad", "l", "parity", "abs_alpha", "method", "mean_n", "g2", "var_x1", "var_x2"],
            rows,
        )
    }

    fn projn(&mut self, sidebands: &[Sideband]) -> Result<()> {
        let cfg = self.cfg;
        let allow = self.allow();
        let mut rows = Vec::new();
        let mut worst_tail = 0.0f64;
        for s in sidebands {
            for &theta in &cfg.projn_theta_list_rad {
                let c = s.coupling.with_theta(theta);
                let per_m = (0..=cfg.projn_m_max)
                    .into_par_iter()
                    .map(|m| {
                        let head = || vec![s.order.to_string(), num(c.r()), num(theta), num(c.zeta_abs2()), m.to_string()];
                        let mut out = vec![stats_row(head(), "analytic", &projn_statistics_analytic(&c, m))];
                        let mut tail = 0.0;
                        if cfg.projn_exact {
                            let state = project_on_n(&c, m, allow)?;
                            tail = state.tail_bound();
                            out.push(stats_row(head(), "numeric", &photon_statistics(&state)?));
                        }
                        Ok((out, tail))
                    })
                    .collect::<qshhg::Result<Vec<_>>>()?;
                for (r, t) in per_m {
                    rows.extend(r);
                    worst_tail = worst_tail.max(t);
                }
            }
        }
        if cfg.projn_exact {
            self.record("proj-N", "largest truncated norm of numeric states", worst_tail, Some(1e-10));
        }
        self.out.csv(
            "projn.csv",
            &["order", "r", "theta_rad", "zeta_abs2", "m", "method", "mean_n", "g2", "var_x1", "var_x2"],
            rows,
        )?;

        if cfg.projn_theta_average {
            let k = cfg.theta_samples;
            let mut rows = Vec::new();
            for s in sidebands {
                for m in 0..=cfg.projn_m_max {
                    let (mut v1, mut v2) = (0.0, 0.0);
                    for i in 0..k {
                        let (a, b) = projn_quadratures(&s.coupling.with_theta(2.0 * PI * i as f64 / k as f64), m);
                        v1 += a;
                        v2 += b;
                    }
                    rows.push(vec![s.order.to_string(), m.to_string(), num(v1 / k as f64), num(v2 / k as f64)]);
                }
            }
            self.out.csv("projn_theta_avg.csv", &["order", "m", "var_x1_theta_avg", "var_x2_theta_avg"], rows)?;
        }

        if !cfg.projn_sweep_r.is_empty() {
            let zs = cfg.projn_sweep_zetas();
            let mut rows = Vec::new();
            for &r in &cfg.projn_sweep_r {
                for &z in &zs {
                    let c = SidebandCoupling::from_zeta_abs2(z, r, cfg.theta_rad)?;
                    let (a, b) = projn_quadratures(&c, cfg.projn_sweep_m);
                    rows.push(vec![num(r), num(z), cfg.projn_sweep_m.to_string(), num(cfg.theta_rad), num(a), num(b)]);
                }
            }
            self.out.csv("projn_sweep.csv", &["r", "zeta_abs2", "m", "theta_rad", "var_x1", "var_x2"], rows)?;
        }
        Ok(())
    }

    fn wigner(&mut self, sidebands: &[Sideband]) -> Result<()> {
        let cfg = self.cfg;
        let base = &sidebands[0].coupling;
        let method = if cfg.projq_exact { Method::Exact } else { Method::Analytic };
        let n = cfg.wigner_panel_count()?;
        let pick = |v: &[u64], i: usize| if v.len() == 1 { v[0] } else { v[i] };
        let square = WignerGrid::square(cfg.wigner_half_width, cfg.wigner_points)?;
        self.grids.wigner_points = Some(cfg.wigner_points);

        #[derive(Serialize)]
        struct Panel {
            file: String,
            state: WignerState,
            index: u64,
            delta_l: u64,
            even_only: bool,
            zeta_abs2: f64,
            abs_alpha: Option<f64>,
            integral: f64,
            min: f64,
            coarse: bool,
            modulation_ratio: Option<f64>,
        }
        let mut panels = Vec::new();
        for i in 0..n {
            let index = pick(&cfg.wigner_index, i);
            let dl = pick(&cfg.wigner_delta_l, i);
            let even = if cfg.wigner_even_only.len() == 1 { cfg.wigner_even_only[0] } else { cfg.wigner_even_only[i] };
            let target = if cfg.wigner_abs_alpha.len() == 1 { cfg.wigner_abs_alpha[0] } else { cfg.wigner_abs_alpha[i] };
            let (field, c, ratio, alpha): (WignerField, SidebandCoupling, Option<f64>, Option<f64>) = match cfg.wigner_state {
                WignerState::ProjQ => {
                    let c = if target > 0.0 { base.rescaled_for_alpha(index, target)? } else { *base };
                    let alpha = Some(c.alpha_n(index).norm());
                    if dl == 0 {
                        (wigner(&project_on_q(&c, index, method)?, &square)?, c, None, alpha)
                    } else {
                        let parity = if even { ParityFilter::EvenOnly } else { ParityFilter::All };
                        let avg = resolution_averaged_wigner(&c, index, dl, parity, &square, &FringeWindow::default(), method)?;
                        (avg.field, c, Some(avg.ratio), alpha)
                    }
                }
                WignerState::ProjN => {
                    let pw = PhotonAddedWigner::new(base, index);
                    let grid = if cfg.wigner_natural_widths > 0.0 {
                        pw.natural_grid(index, cfg.wigner_natural_widths, cfg.wigner_points)?
                    } else {
                        square
                    };
                    (pw.field(&grid)?, *base, None, None)
                }
            };
            let file = format!("wigner_{i}.csv");
            let g = field.grid;
            let rows = (0..g.np).flat_map(|j| {
                let field = &field;
                (0..g.nx).map(move |k| vec![num(g.x(k)), num(g.p(j)), num(field.at(k, j))])
            });
            self.out.csv(&file, &["x", "p", "w"], rows)?;
            self.record("wigner", &format!("{file}: |integral - 1|"), (field.integral - 1.0).abs(), Some(0.01));
            panels.push(Panel {
                file,
                state: cfg.wigner_state,
                index,
                delta_l: dl,
                even_only: even,
                zeta_abs2: c.zeta_abs2(),
                abs_alpha: alpha,
                integral: field.integral,
                min: field.min(),
                coarse: field.coarse,
                modulation_ratio: ratio,
            });
        }
        self.out.json("wigner_panels.json", &panels)?;

        if !cfg.modulation_delta_l.is_empty() {
            let l = cfg.modulation_l;
            let c = if cfg.modulation_abs_alpha > 0.0 { base.rescaled_for_alpha(l, cfg.modulation_abs_alpha)? } else { *base };
            let res = (cfg.modulation_points_along, cfg.modulation_points_across);
            let mut rows = Vec::new();
            for (parity, name) in [(ParityFilter::All, "all"), (ParityFilter::EvenOnly, "even-only")] {
                for p in modulation_curve(&c, l, &cfg.modulation_delta_l, parity, &FringeWindow::default(), res, method)? {
                    rows.push(vec![l.to_string(), p.delta_l.to_string(), name.to_string(), num(c.alpha_n(l).norm()), num(p.ratio)]);
                }
            }
            self.out.csv("modulation.csv", &["l", "delta_l", "parity", "abs_alpha", "ratio"], rows)?;
        }
        Ok(())
    }

    fn scaling(&mut self) -> Result<()> {
        #[derive(Serialize)]
        struct Drive {
            intensity_w_per_m2: f64,
            omega0_rad_per_s: f64,
            carrier_mass_kg: f64,
            r_scaling_si: Option<f64>,
        }
        let drive = |cfg: &ScenarioConfig| -> Result<Drive> {
            let pulse = cfg.pulse()?;
            let f = pulse.peak_field_v_per_m;
            let intensity = 0.5 * units::C * units::EPS0 * f * f;
            let mass = cfg.medium_model()?.mass_kg();
            let r = if intensity > 0.0 { Some(susceptibility_ratio_scaling(intensity, pulse.omega0(), mass)?) } else { None };
            Ok(Drive { intensity_w_per_m2: intensity, omega0_rad_per_s: pulse.omega0(), carrier_mass_kg: mass, r_scaling_si: r })
        };
        let zno = drive(&ScenarioConfig::default())?;
        let hydrogen = drive(&ScenarioConfig {
            medium: crate::config::MediumChoice::Atom,
            wavelength_um: 0.8,
            intensity_w_per_cm2: Some(1e14),
            ..ScenarioConfig::default()
        })?;
        let this = drive(self.cfg)?;
        #[derive(Serialize)]
        struct Report {
            scenario: Drive,
            relative_to_zno_reference: Option<f64>,
            relative_to_hydrogen_reference: Option<f64>,
            zno_over_hydrogen_reference: Option<f64>,
            zno_reference: Drive,
            hydrogen_reference: Drive,
        }
        let ratio = |a: &Drive, b: &Drive| Some(a.r_scaling_si? / b.r_scaling_si?);
        let report = Report {
            relative_to_zno_reference: ratio(&this, &zno),
            relative_to_hydrogen_reference: ratio(&this, &hydrogen),
            zno_over_hydrogen_reference: ratio(&zno, &hydrogen),
            scenario: this,
            zno_reference: zno,
            hydrogen_reference: hydrogen,
        };
        self.out.json("scaling.json", &report)
    }
}

/// Reruns the spectrum with doubled time sampling and doubled momentum axes and compares band photons.
pub fn convergence_check(cfg: &ScenarioConfig, out: &Path, opts: &RunOptions) -> Result<RunManifest> {
    cfg.validate()?;
    with_pool(opts.threads, || {
        let mut dir = OutputDir::create(out)?;
        dir.write("config.toml", cfg.to_toml().as_bytes())?;
        let base = cfg.grid_spec(&cfg.pulse()?, &cfg.medium_model()?);
        let doubled_k = GridSpec { samples_per_period: 2 * base.samples_per_period, ..base };
        let doubled_p = GridSpec { momentum: base.momentum.doubled_par().doubled_perp(), ..base };

        #[derive(Serialize)]
        struct Variant {
            name: String,
            samples_per_cycle: usize,
            momentum_par_samples: usize,
            momentum_perp_samples: usize,
            max_rel_change_hhg: f64,
            max_rel_change_qshhg: f64,
            passed: bool,
        }
        let mut stages = Vec::new();
        let mut runs = Vec::new();
        for (name, grid) in [("base", base), ("samples_per_cycle x2", doubled_k), ("momentum x2", doubled_p)] {
            let t = Instant::now();
            let run = spectral_run(cfg, grid)?;
            let bands = band_photons(cfg, &run.spec)?;
            let dt = t.elapsed().as_secs_f64();
            stages.push(StageTiming { stage: format!("spectrum ({name})"), wall_time_s: dt });
            runs.push((name, grid, bands, dt, run.trivial));
        }
        let (hhg0, q0): (Vec<f64>, Vec<f64>) = {
            let b = &runs[0].2;
            (b.hhg.photons(), (0..b.hhg.bands.len()).map(|i| b.qshhg_mean(i)).collect())
        };
        // bands below one photon are noise-dominated and excluded
        let worst = |base: &[f64], other: &[f64]| {
            base.iter().zip(other).filter(|(b, _)| **b >= 1.0).map(|(b, o)| ((o - b) / b).abs()).fold(0.0, f64::max)
        };
        let tol = cfg.convergence_tolerance;
        let mut variants = Vec::new();
        let mut records = Vec::new();
        for (name, grid, bands, _, _) in &runs {
            let q: Vec<f64> = (0..bands.hhg.bands.len()).map(|i| bands.qshhg_mean(i)).collect();
            let (h, qq) = (worst(&hhg0, &bands.hhg.photons()), worst(&q0, &q));
            let passed = h <= tol && qq <= tol;
            if *name != "base" {
                for (what, v) in [("hhg", h), ("qshhg", qq)] {
                    records.push(ConvergenceRecord {
                        stage: "convergence-check".into(),
                        quantity: format!("{name}: max relative change of {what} bands with >= 1 photon"),
                        value: v,
                        tolerance: Some(tol),
                        passed: Some(v <= tol),
                    });
                }
            }
            variants.push(Variant {
                name: name.to_string(),
                samples_per_cycle: grid.samples_per_period,
                momentum_par_samples: grid.momentum.par_samples,
                momentum_perp_samples: grid.momentum.perp_samples,
                max_rel_change_hhg: h,
                max_rel_change_qshhg: qq,
                passed,
            });
        }
        let passed = variants.iter().all(|v| v.passed);
        #[derive(Serialize)]
        struct Report {
            tolerance: f64,
            passed: bool,
            variants: Vec<Variant>,
        }
        dir.json("convergence.json", &Report { tolerance: tol, passed, variants })?;
        let trivial = runs[0].4;
        let manifest = RunManifest {
            schema: MANIFEST_SCHEMA.into(),
            schema_version: MANIFEST_SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            label: cfg.label.clone(),
            figure: opts.figure.clone(),
            config_sha256: crate::output::sha256_hex(cfg.to_toml().as_bytes()),
            trivial,
            threads: rayon::current_num_threads(),
            grids: GridSummary {
                samples_per_cycle: Some(base.samples_per_period),
                momentum_par_samples: Some(base.momentum.par_samples),
                momentum_perp_samples: Some(base.momentum.perp_samples),
                frequency_samples: Some(cfg.samples_per_order * cfg.max_order + 1),
                theta_samples: Some(cfg.theta_samples),
                ..GridSummary::default()
            },
            stages,
            convergence: records,
            notes: if trivial { vec!["zero drive field: all bands are zero, convergence holds trivially".into()] } else { vec![] },
            outputs: Vec::new(),
        };
        let manifest = dir.finish(manifest)?;
        if passed {
            Ok(manifest)
        } else {
            Err(CliError::Core(qshhg::Error::NotConverged(format!(
                "band photons change by more than {tol} under grid doubling; see {}",
                out.join("convergence.json").display()
            ))))
        }
    })
}
