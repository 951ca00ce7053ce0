//! Single-emitter HHG and sideband spectral coefficients.
//!
//! The momentum integral is organised in rows of fixed p_par. Along a row only
//! u = p_perp^2 changes, so the row shares p_t, v(t), the displacement sigma
//! and the p_par part of the action; the transverse part of the phase is a
//! constant rotation per time step.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{config, Result};
use crate::reduce::pairwise_reduce;
use crate::sfa::{
    cumulative_trapezoid, pulse_fields, DisplacementStep, LaserPulse, MediumAu, MediumModel, PulseFields, SfaGrids,
    SigmaMethod, SlidingWindow, TimeGrid, Trajectory,
};
use crate::units;

/// Momentum-integrated time series (a.u.), weights included.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumMoments {
    pub time: TimeGrid,
    /// x(t) = int d^3p 2 Re(d* b)
    pub dipole: Vec<f64>,
    /// int d^3p v 2 Re(Gamma)
    pub brunel: Vec<f64>,
    /// int d^3p v 2 Im(d* b); the sideband dipole term is i times this
    pub sideband_dipole: Vec<f64>,
    /// int d^3p v^2 Im(Gamma)
    pub sideband_ionization: Vec<f64>,
    /// gamma(t) = int d^3p Gamma
    pub ionization: Vec<C64>,
}

impl MomentumMoments {
    fn zeros(time: TimeGrid) -> Self {
        let n = time.len();
        MomentumMoments {
            time,
            dipole: vec![0.0; n],
            brunel: vec![0.0; n],
            sideband_dipole: vec![0.0; n],
            sideband_ionization: vec![0.0; n],
            ionization: vec![C64::new(0.0, 0.0); n],
        }
    }

    fn add(mut self, o: &MomentumMoments) -> Self {
        let add = |a: &mut [f64], b: &[f64]| a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        add(&mut self.dipole, &o.dipole);
        add(&mut self.brunel, &o.brunel);
        add(&mut self.sideband_dipole, &o.sideband_dipole);
        add(&mut self.sideband_ionization, &o.sideband_ionization);
        self.ionization.iter_mut().zip(&o.ionization).for_each(|(x, y)| *x += y);
        self
    }
}

/// Frequencies (rad/s) and convention volume for a spectral evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralRequest {
    pub omegas: Vec<f64>,
    pub omega_q: f64,
    pub volume_m3: f64,
}

impl SpectralRequest {
    /// `n` uniform samples between harmonic orders `lo` and `hi`, perturbation at 2 w0.
    pub fn harmonic_range(pulse: &LaserPulse, lo: f64, hi: f64, n: usize) -> Self {
        SpectralRequest { omegas: omega_grid(pulse.omega0(), lo, hi, n), omega_q: 2.0 * pulse.omega0(), volume_m3: 1.0 }
    }
}

/// Uniform grid of `n` angular frequencies from order `lo` to `hi` of `omega0`.
pub fn omega_grid(omega0: f64, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo * omega0];
    }
    (0..n).map(|i| omega0 * (lo + (hi - lo) * i as f64 / (n - 1) as f64)).collect()
}

/// H, F and G spectra on one frequency grid, evaluated at the emitter position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCoefficients {
    /// rad/s
    pub omega: Vec<f64>,
    pub h: Vec<C64>,
    pub f: Vec<C64>,
    pub g: Vec<C64>,
    pub omega0: f64,
    pub omega_q: f64,
    /// Quantization volume (m^3) used for the vacuum field E_v.
    pub volume_m3: f64,
}

/// Vacuum field sqrt(hbar w / 2 eps0 V) in a.u. for w and V in a.u.
pub fn vacuum_field_au(omega_au: f64, volume_au: f64) -> f64 {
    (2.0 * std::f64::consts::PI * omega_au / volume_au).sqrt()
}

fn validate_request(grids: &SfaGrids, req: &SpectralRequest) -> Result<()> {
    if req.omegas.is_empty() {
        return Err(config("frequency grid is empty"));
    }
    if !(req.omega_q > 0.0) || !(req.volume_m3 > 0.0) {
        return Err(config("perturbation frequency and convention volume must be positive"));
    }
    if req.omegas.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
        return Err(config("frequency samples must be positive"));
    }
    let top = req.omegas.iter().fold(0.0f64, |m, w| m.max(*w)) + req.omega_q;
    let nyq = grids.time().nyquist();
    if units::omega_to_au(top) > nyq {
        return Err(config(format!(
            "frequency grid reaches {:.4} a.u. (including the perturbation) beyond the time-grid Nyquist limit {:.4} a.u.",
            units::omega_to_au(top),
            nyq
        )));
    }
    Ok(())
}

/// Trapezoid-weighted transform sum_n w_n e^{i w t_n} y_n dt.
pub fn fourier_sample<T>(y: &[T], time: &TimeGrid, omega_au: f64) -> C64
where
    T: Copy + Into<C64>,
{
    const RESYNC: usize = 64;
    let n = y.len();
    let dt = time.dt();
    let step = C64::from_polar(1.0, omega_au * dt);
    let mut acc = C64::new(0.0, 0.0);
    let mut rot = C64::new(0.0, 0.0);
    for (i, v) in y.iter().enumerate() {
        if i % RESYNC == 0 {
            rot = C64::from_polar(1.0, omega_au * time.t(i));
        }
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        acc += w * rot * (*v).into();
        rot *= step;
    }
    acc * dt
}

/// Series shared by one p_par row, summed over the transverse nodes.
struct RowSums {
    re_db: Vec<f64>,
    im_db: Vec<f64>,
    re_gamma2: Vec<f64>,
    im_gamma: Vec<f64>,
    gamma: Vec<C64>,
}

struct RowContext<'a> {
    medium: MediumAu,
    fields: &'a PulseFields,
    grids: &'a SfaGrids,
    perp: Vec<(f64, f64)>,
}

impl RowContext<'_> {
    fn row(&self, p_par: f64) -> (Vec<f64>, RowSums) {
        let m = &self.medium;
        let f = self.fields;
        let nt = f.time.len();
        let dt = f.time.dt();
        let k = self.grids.samples_per_period();
        let px: Vec<f64> = f.potential.iter().map(|a| p_par + a).collect();
        let eps_par: Vec<f64> = px.iter().map(|p| m.dispersion(p * p)).collect();
        let s_par = cumulative_trapezoid(&eps_par, dt);
        let phase_par: Vec<C64> = s_par.iter().map(|s| C64::from_polar(1.0, -s)).collect();
        let velocity: Vec<f64> = px.iter().map(|p| p / m.mass).collect();

        let mut sums = RowSums {
            re_db: vec![0.0; nt],
            im_db: vec![0.0; nt],
            re_gamma2: vec![0.0; nt],
            im_gamma: vec![0.0; nt],
            gamma: vec![C64::new(0.0, 0.0); nt],
        };
        let mut window = SlidingWindow::new(self.grids.filter());
        for &(u, wu) in &self.perp {
            if wu == 0.0 {
                continue;
            }
            window.reset();
            let shift = 0.5 * u / m.mass;
            let rot = C64::from_polar(1.0, -shift * dt);
            let mut z = C64::new(1.0, 0.0);
            for n in 0..nt {
                if n % k == 0 {
                    z = C64::from_polar(1.0, -shift * dt * n as f64);
                }
                let eps = eps_par[n] + shift;
                let d = m.dipole_x(px[n], eps);
                let omega = d * f.field[n];
                let ph = phase_par[n] * z;
                let s = window.push(omega * ph);
                let b = dt * s * ph.conj();
                let db = d * b;
                let gam = omega * b;
                sums.re_db[n] += wu * 2.0 * db.re;
                sums.im_db[n] += wu * 2.0 * db.im;
                sums.re_gamma2[n] += wu * 2.0 * gam.re;
                sums.im_gamma[n] += wu * gam.im;
                sums.gamma[n] += wu * gam;
                z *= rot;
            }
        }
        (velocity, sums)
    }
}

fn row_context<'a>(medium: &MediumModel, fields: &'a PulseFields, grids: &'a SfaGrids) -> RowContext<'a> {
    RowContext { medium: medium.to_au(), fields, grids, perp: grids.momentum().perp_nodes() }
}

/// Momentum-integrated series with a deterministic reduction over p_par rows.
pub fn momentum_moments(medium: &MediumModel, pulse: &LaserPulse, grids: &SfaGrids) -> Result<MomentumMoments> {
    medium.validate()?;
    let fields = pulse_fields(pulse, grids)?;
    Ok(moments_from_fields(medium, &fields, grids))
}

fn moments_from_fields(medium: &MediumModel, fields: &PulseFields, grids: &SfaGrids) -> MomentumMoments {
    let ctx = row_context(medium, fields, grids);
    let par = grids.momentum().par_nodes();
    let time = fields.time;
    let leaf = |i: usize| {
        let (p, wp) = par[i];
        let mut out = MomentumMoments::zeros(time);
        if wp == 0.0 {
            return out;
        }
        let (v, s) = ctx.row(p);
        for n in 0..time.len() {
            out.dipole[n] = wp * s.re_db[n];
            out.sideband_dipole[n] = wp * v[n] * s.im_db[n];
            out.brunel[n] = wp * v[n] * s.re_gamma2[n];
            out.sideband_ionization[n] = wp * v[n] * v[n] * s.im_gamma[n];
            out.ionization[n] = wp * s.gamma[n];
        }
        out
    };
    pairwise_reduce(par.len(), leaf, |a, b| a.add(&b)).unwrap_or_else(|| MomentumMoments::zeros(time))
}

impl SpectralCoefficients {
    /// Spectra from momentum moments with the high-frequency displacement sigma = -v/w^2.
    pub fn from_moments(m: &MomentumMoments, omega0: f64, req: &SpectralRequest) -> SpectralCoefficients {
        let vol = units::volume_to_au(req.volume_m3);
        let wq = units::omega_to_au(req.omega_q);
        let evq = vacuum_field_au(wq, vol);
        let rows: Vec<(C64, C64, C64)> = req
            .omegas
            .par_iter()
            .map(|&w_si| {
                let w = units::omega_to_au(w_si);
                let ev = vacuum_field_au(w, vol);
                let inv2 = 1.0 / (w * w);
                let h = -ev * (fourier_sample(&m.dipole, &m.time, w) - inv2 * fourier_sample(&m.brunel, &m.time, w));
                let pref = C64::new(0.0, -ev * evq / (wq * wq));
                let sideband = |x: f64| {
                    fourier_sample(&m.sideband_dipole, &m.time, x) - inv2 * fourier_sample(&m.sideband_ionization, &m.time, x)
                };
                (h, pref * sideband(w + wq), pref * sideband(w - wq))
            })
            .collect();
        SpectralCoefficients {
            omega: req.omegas.clone(),
            h: rows.iter().map(|r| r.0).collect(),
            f: rows.iter().map(|r| r.1).collect(),
            g: rows.iter().map(|r| r.2).collect(),
            omega0,
            omega_q: req.omega_q,
            volume_m3: req.volume_m3,
        }
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn orders(&self) -> Vec<f64> {
        self.omega.iter().map(|w| w / self.omega0).collect()
    }
}

/// Spectral sums accumulated per row when sigma is integrated exactly.
#[derive(Debug, Clone)]
struct ExactPart {
    h: Vec<C64>,
    f: Vec<C64>,
    g: Vec<C64>,
}

impl ExactPart {
    fn add(mut self, o: &ExactPart) -> Self {
        for (a, b) in [(&mut self.h, &o.h), (&mut self.f, &o.f), (&mut self.g, &o.g)] {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        self
    }
}

fn exact_row(
    time: &TimeGrid,
    v: &[f64],
    s: &RowSums,
    wp: f64,
    omegas: &[f64],
    wq: f64,
    evs: &[f64],
    evq: f64,
) -> ExactPart {
    let nt = time.len();
    let dt = time.dt();
    let sig_q = crate::sfa::mode_displacement_au(wq, v, dt, SigmaMethod::ExactRecursion).expect("positive frequency");
    // sideband dipole terms: sigma_q x_p and conj(sigma_q) x_p, x_p = i Im part
    let xq: Vec<C64> = (0..nt).map(|n| sig_q[n] * C64::new(0.0, wp * s.im_db[n])).collect();
    let xqc: Vec<C64> = (0..nt).map(|n| sig_q[n].conj() * C64::new(0.0, wp * s.im_db[n])).collect();
    let mut out = ExactPart { h: Vec::with_capacity(omegas.len()), f: Vec::new(), g: Vec::new() };
    for (k, &w) in omegas.iter().enumerate() {
        let step = DisplacementStep::new(w, dt);
        let mut sig = C64::new(0.0, 0.0);
        let mut h_s = vec![C64::new(0.0, 0.0); nt];
        let mut f_s = vec![C64::new(0.0, 0.0); nt];
        let mut g_s = vec![C64::new(0.0, 0.0); nt];
        for n in 0..nt {
            if n > 0 {
                sig = step.advance(sig, v[n - 1], v[n]);
            }
            h_s[n] = sig * (wp * s.re_gamma2[n]);
            let tail = sig * C64::new(0.0, wp * s.im_gamma[n]);
            f_s[n] = sig_q[n] * tail;
            g_s[n] = sig_q[n].conj() * tail;
        }
        let ev = evs[k];
        out.h.push(-ev * fourier_sample(&h_s, time, w));
        out.f.push(ev * evq * (fourier_sample(&xq, time, w + wq) + fourier_sample(&f_s, time, w + wq)));
        out.g.push(ev * evq * (fourier_sample(&xqc, time, w - wq) + fourier_sample(&g_s, time, w - wq)));
    }
    out
}

/// All three spectra in one momentum sweep. Honors the grid's sigma method.
pub fn spectral_coefficients(
    medium: &MediumModel,
    pulse: &LaserPulse,
    grids: &SfaGrids,
    req: &SpectralRequest,
) -> Result<SpectralCoefficients> {
    medium.validate()?;
    validate_request(grids, req)?;
    let fields = pulse_fields(pulse, grids)?;
    match grids.sigma() {
        SigmaMethod::HighFrequency => {
            let m = moments_from_fields(medium, &fields, grids);
            Ok(SpectralCoefficients::from_moments(&m, pulse.omega0(), req))
        }
        SigmaMethod::ExactRecursion => Ok(exact_spectra(medium, &fields, grids, pulse.omega0(), req)),
    }
}

fn exact_spectra(
    medium: &MediumModel,
    fields: &PulseFields,
    grids: &SfaGrids,
    omega0: f64,
    req: &SpectralRequest,
) -> SpectralCoefficients {
    let ctx = row_context(medium, fields, grids);
    let par = grids.momentum().par_nodes();
    let time = fields.time;
    let vol = units::volume_to_au(req.volume_m3);
    let omegas: Vec<f64> = req.omegas.iter().map(|w| units::omega_to_au(*w)).collect();
    let wq = units::omega_to_au(req.omega_q);
    let evs: Vec<f64> = omegas.iter().map(|w| vacuum_field_au(*w, vol)).collect();
    let evq = vacuum_field_au(wq, vol);
    let nw = omegas.len();
    let zero = || ExactPart {
        h: vec![C64::new(0.0, 0.0); nw],
        f: vec![C64::new(0.0, 0.0); nw],
        g: vec![C64::new(0.0, 0.0); nw],
    };
    let leaf = |i: usize| {
        let (p, wp) = par[i];
        if wp == 0.0 {
            return (MomentumMoments::zeros(time), zero());
        }
        let (v, s) = ctx.row(p);
        let mut mm = MomentumMoments::zeros(time);
        for n in 0..time.len() {
            mm.dipole[n] = wp * s.re_db[n];
            mm.ionization[n] = wp * s.gamma[n];
        }
        (mm, exact_row(&time, &v, &s, wp, &omegas, wq, &evs, evq))
    };
    let (mm, ex) = pairwise_reduce(par.len(), leaf, |a, b| (a.0.add(&b.0), a.1.add(&b.1)))
        .unwrap_or_else(|| (MomentumMoments::zeros(time), zero()));
    let h = (0..nw).map(|k| ex.h[k] - evs[k] * fourier_sample(&mm.dipole, &time, omegas[k])).collect();
    SpectralCoefficients {
        omega: req.omegas.clone(),
        h,
        f: ex.f,
        g: ex.g,
        omega0,
        omega_q: req.omega_q,
        volume_m3: req.volume_m3,
    }
}

/// H~(w) alone.
pub fn hhg_spectral_coefficient(
    medium: &MediumModel,
    pulse: &LaserPulse,
    grids: &SfaGrids,
    omegas: &[f64],
) -> Result<Vec<C64>> {
    let req = SpectralRequest { omegas: omegas.to_vec(), omega_q: 2.0 * pulse.omega0(), volume_m3: 1.0 };
    Ok(spectral_coefficients(medium, pulse, grids, &req)?.h)
}

/// (F~(w), G~(w)) for perturbation frequency `omega_q`.
pub fn qshhg_spectral_coefficients(
    medium: &MediumModel,
    pulse: &LaserPulse,
    grids: &SfaGrids,
    omega_q: f64,
    omegas: &[f64],
) -> Result<(Vec<C64>, Vec<C64>)> {
    let req = SpectralRequest { omegas: omegas.to_vec(), omega_q, volume_m3: 1.0 };
    let s = spectral_coefficients(medium, pulse, grids, &req)?;
    Ok((s.f, s.g))
}

/// x_p(t) = d* b - c.c. for one momentum (purely imaginary).
pub fn imaginary_dipole_density(
    medium: &MediumModel,
    pulse: &LaserPulse,
    p: [f64; 3],
    grids: &SfaGrids,
) -> Result<Vec<C64>> {
    let fields = pulse_fields(pulse, grids)?;
    let t = Trajectory::compute(medium, &fields, grids, p);
    Ok(t.continuum.iter().zip(&t.dipole).map(|(b, d)| d * b - (d * b).conj()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sfa::{GridSpec, MomentumGrid};

    fn small(pulse: &LaserPulse, sigma: SigmaMethod) -> SfaGrids {
        let m = MomentumGrid { par_max: 0.6, par_samples: 9, perp_max: 0.3, perp_samples: 5, taper: 0.0 };
        SfaGrids::new(pulse, &GridSpec { samples_per_period: 64, span_periods: None, max_harmonic: 15.0, momentum: m, sigma })
            .unwrap()
    }

    fn pulse() -> LaserPulse {
        LaserPulse::new(3.2e-6, 1.3e9, 2.0).unwrap()
    }

    #[test]
    fn zero_drive_zero_spectra() {
        let p = LaserPulse::new(3.2e-6, 0.0, 2.0).unwrap();
        let g = small(&p, SigmaMethod::HighFrequency);
        let req = SpectralRequest::harmonic_range(&p, 1.0, 10.0, 16);
        let s = spectral_coefficients(&MediumModel::zno(4e28), &p, &g, &req).unwrap();
        assert!(s.h.iter().chain(&s.f).chain(&s.g).all(|z| z.norm() == 0.0));
    }

    #[test]
    fn nyquist_violation_rejected() {
        let p = pulse();
        let g = small(&p, SigmaMethod::HighFrequency);
        let req = SpectralRequest::harmonic_range(&p, 1.0, 31.0, 8);
        assert!(matches!(spectral_coefficients(&MediumModel::zno(4e28), &p, &g, &req), Err(crate::Error::Config(_))));
    }

    #[test]
    fn x_p_is_imaginary() {
        let p = pulse();
        let g = small(&p, SigmaMethod::HighFrequency);
        let x = imaginary_dipole_density(&MediumModel::zno(4e28), &p, [0.1, 0.05, 0.0], &g).unwrap();
        assert!(x.iter().all(|z| z.re == 0.0));
        assert!(x.iter().any(|z| z.im != 0.0));
    }

    #[test]
    fn volume_scaling_of_spectra() {
        let p = pulse();
        let g = small(&p, SigmaMethod::HighFrequency);
        let m = momentum_moments(&MediumModel::zno(4e28), &p, &g).unwrap();
        let mut req = SpectralRequest::harmonic_range(&p, 1.0, 12.0, 12);
        let a = SpectralCoefficients::from_moments(&m, p.omega0(), &req);
        req.volume_m3 = 2.0;
        let b = SpectralCoefficients::from_moments(&m, p.omega0(), &req);
        for k in 0..a.len() {
            assert!((b.h[k].norm_sqr() / a.h[k].norm_sqr() - 0.5).abs() < 1e-12);
            assert!((b.f[k].norm_sqr() / a.f[k].norm_sqr() - 0.25).abs() < 1e-12);
            assert!((b.g[k].norm_sqr() / a.g[k].norm_sqr() - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_sigma_path_runs_and_is_finite() {
        let p = pulse();
        let g = small(&p, SigmaMethod::ExactRecursion);
        let req = SpectralRequest::harmonic_range(&p, 2.0, 12.0, 6);
        let s = spectral_coefficients(&MediumModel::zno(4e28), &p, &g, &req).unwrap();
        assert!(s.h.iter().chain(&s.f).chain(&s.g).all(|z| z.re.is_finite() && z.im.is_finite()));
    }

    #[test]
    fn fourier_sample_of_real_series_is_hermitian() {
        let t = TimeGrid::new(-3.0, 0.01, 601).unwrap();
        let y: Vec<f64> = (0..601).map(|n| (-(t.t(n)).powi(2)).exp() * (2.0 * t.t(n)).cos()).collect();
        let a = fourier_sample(&y, &t, 1.3);
        let b = fourier_sample(&y, &t, -1.3);
        assert!((a - b.conj()).norm() < 1e-13);
    }
}
