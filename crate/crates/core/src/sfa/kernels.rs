use num_complex::Complex64 as C64;

use super::grids::{RecollisionFilter, SfaGrids, SigmaMethod, TimeGrid, SUPPORT_THRESHOLD};
use super::medium::{MediumAu, MediumModel};
use super::pulse::{Envelope, LaserPulse};
use crate::error::{config, domain, Result};
use crate::units;

/// Field F(t) and vector potential A(t) on the time grid (a.u.).
#[derive(Debug, Clone, PartialEq)]
pub struct PulseFields {
    pub time: TimeGrid,
    pub field: Vec<f64>,
    pub potential: Vec<f64>,
}

/// Sample the drive and integrate -dA/dt = F with the trapezoid rule.
/// Gaussian pulses start from A = 0; a flat envelope gets the zero-mean integration constant.
pub fn pulse_fields(pulse: &LaserPulse, grids: &SfaGrids) -> Result<PulseFields> {
    pulse.validate()?;
    let time = *grids.time();
    if pulse.envelope == Envelope::Gaussian && pulse.peak_field_v_per_m > 0.0 {
        let edge = pulse.envelope_at(time.t_start()).max(pulse.envelope_at(time.t_end()));
        if edge > SUPPORT_THRESHOLD * (1.0 + 1e-9) {
            return Err(config(format!(
                "time grid too short: envelope is {edge:.3e} of peak at the grid edge (needs <= {SUPPORT_THRESHOLD:e})"
            )));
        }
    }
    let field: Vec<f64> = (0..time.len()).map(|n| pulse.field_at(time.t(n))).collect();
    let mut potential = cumulative_trapezoid(&field, time.dt());
    potential.iter_mut().for_each(|a| *a = -*a);
    if pulse.envelope == Envelope::Flat {
        let mean = potential.iter().sum::<f64>() / potential.len() as f64;
        potential.iter_mut().for_each(|a| *a -= mean);
    }
    Ok(PulseFields { time, field, potential })
}

/// Running trapezoid integral with value 0 at the first sample.
pub fn cumulative_trapezoid(y: &[f64], dt: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(y.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in y.windows(2) {
        acc += 0.5 * dt * (w[0] + w[1]);
        out.push(acc);
    }
    out.truncate(y.len());
    out
}

/// Streaming evaluation of s_n = sum_{k=0}^{K} c_k g_{n-k} with the filter's quadrature weights c_k.
/// Interior lags use two running sums (flat part, and the part decaying as a^k with a = exp(-10/K));
/// the jump nodes K/2 and K are added explicitly. O(1) per sample; the running sums are
/// re-accumulated exactly once per period to stop rounding drift.
#[derive(Debug, Clone)]
pub struct SlidingWindow {
    k: usize,
    half: usize,
    a: f64,
    a_half: f64,
    a_tail: f64,
    c_half: f64,
    c_end: f64,
    weights: Vec<f64>,
    ring: Vec<C64>,
    n: usize,
    sum_flat: C64,
    sum_decay: C64,
}

impl SlidingWindow {
    pub fn new(filter: &RecollisionFilter) -> Self {
        let k = filter.samples_per_period();
        let a = filter.decay();
        SlidingWindow {
            k,
            half: k / 2,
            a,
            a_half: a.powi((k / 2) as i32),
            a_tail: a.powi(k as i32 - 1),
            c_half: filter.weight(k / 2),
            c_end: filter.weight(k),
            weights: (0..=k).map(|i| filter.weight(i)).collect(),
            ring: vec![C64::new(0.0, 0.0); k + 1],
            n: 0,
            sum_flat: C64::new(0.0, 0.0),
            sum_decay: C64::new(0.0, 0.0),
        }
    }

    pub fn reset(&mut self) {
        self.ring.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        self.n = 0;
        self.sum_flat = C64::new(0.0, 0.0);
        self.sum_decay = C64::new(0.0, 0.0);
    }

    /// g_{n-lag} where n is the next sample to be pushed.
    #[inline]
    fn back(&self, lag: usize) -> C64 {
        if lag > self.n {
            return C64::new(0.0, 0.0);
        }
        let len = self.k + 1;
        self.ring[(self.n + len - lag) % len]
    }

    /// Push g_n and return the windowed sum s_n.
    #[inline]
    pub fn push(&mut self, g: C64) -> C64 {
        let len = self.k + 1;
        let pos = self.n % len;
        let lagged = |lag: usize, ring: &[C64], n: usize| {
            if lag <= n {
                ring[(pos + len - lag) % len]
            } else {
                C64::new(0.0, 0.0)
            }
        };
        let g_half = lagged(self.half, &self.ring, self.n);
        let g_end = lagged(self.k, &self.ring, self.n);
        let out = 0.5 * g + self.sum_flat + self.sum_decay + self.c_half * g_half + self.c_end * g_end;
        // advance to n+1: flat covers lags 1..K/2-1, decay covers K/2+1..K-1
        let g_flat_out = lagged(self.half - 1, &self.ring, self.n);
        let g_decay_out = lagged(self.k - 1, &self.ring, self.n);
        self.ring[pos] = g;
        self.sum_flat += g - g_flat_out;
        self.sum_decay = self.a * (self.sum_decay + self.a_half * g_half - self.a_tail * g_decay_out);
        self.n += 1;
        if self.n % self.k == 0 {
            self.resum();
        }
        out
    }

    fn resum(&mut self) {
        // sums for the next push, whose lag-1 sample is the newest stored one
        let mut flat = C64::new(0.0, 0.0);
        for lag in 1..self.half {
            flat += self.back(lag);
        }
        let mut decay = C64::new(0.0, 0.0);
        for lag in self.half + 1..self.k {
            decay += self.weights[lag] * self.back(lag);
        }
        self.sum_flat = flat;
        self.sum_decay = decay;
    }
}

/// out[n] = dt sum_{k=0}^{K} c_k g_{n-k} with the filter quadrature weights c_k.
pub fn windowed_sum(g: &[C64], filter: &RecollisionFilter, dt: f64) -> Vec<C64> {
    let mut w = SlidingWindow::new(filter);
    g.iter().map(|&z| dt * w.push(z)).collect()
}

/// One canonical momentum followed through the pulse (a.u.).
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub p: [f64; 3],
    pub time: TimeGrid,
    pub field: Vec<f64>,
    pub potential: Vec<f64>,
    /// Polarization component of p_t = p + A(t).
    pub kinetic_momentum: Vec<f64>,
    pub velocity: Vec<f64>,
    pub action: Vec<f64>,
    pub rabi: Vec<f64>,
    pub dipole: Vec<f64>,
    pub continuum: Vec<C64>,
    pub ionization: Vec<C64>,
}

impl Trajectory {
    pub fn compute(medium: &MediumModel, fields: &PulseFields, grids: &SfaGrids, p: [f64; 3]) -> Trajectory {
        let m = medium.to_au();
        Self::compute_au(&m, fields, grids.filter(), p)
    }

    pub fn compute_au(m: &MediumAu, fields: &PulseFields, filter: &RecollisionFilter, p: [f64; 3]) -> Trajectory {
        let nt = fields.time.len();
        let dt = fields.time.dt();
        let perp2 = p[1] * p[1] + p[2] * p[2];
        let kinetic_momentum: Vec<f64> = fields.potential.iter().map(|a| p[0] + a).collect();
        let eps: Vec<f64> = kinetic_momentum.iter().map(|px| m.dispersion(px * px + perp2)).collect();
        let action = cumulative_trapezoid(&eps, dt);
        let dipole: Vec<f64> = kinetic_momentum.iter().zip(&eps).map(|(px, e)| m.dipole_x(*px, *e)).collect();
        let rabi: Vec<f64> = dipole.iter().zip(&fields.field).map(|(d, f)| d * f).collect();
        let g: Vec<C64> = (0..nt).map(|n| rabi[n] * C64::from_polar(1.0, -action[n])).collect();
        let s = windowed_sum(&g, filter, dt);
        let continuum: Vec<C64> = (0..nt).map(|n| C64::from_polar(1.0, action[n]) * s[n]).collect();
        let ionization: Vec<C64> = continuum.iter().zip(&rabi).map(|(b, o)| o * b).collect();
        let velocity = kinetic_momentum.iter().map(|px| px / m.mass).collect();
        Trajectory {
            p,
            time: fields.time,
            field: fields.field.clone(),
            potential: fields.potential.clone(),
            kinetic_momentum,
            velocity,
            action,
            rabi,
            dipole,
            continuum,
            ionization,
        }
    }

    /// sigma-bar for angular frequency `omega` (rad/s).
    pub fn mode_displacement(&self, omega: f64, method: SigmaMethod) -> Result<Vec<C64>> {
        mode_displacement_au(units::omega_to_au(omega), &self.velocity, self.time.dt(), method)
    }
}

/// S(t) = integral of eps(p_t) from the grid start.
pub fn action_phase(medium: &MediumModel, pulse: &LaserPulse, p: [f64; 3], grids: &SfaGrids) -> Result<Vec<f64>> {
    let fields = pulse_fields(pulse, grids)?;
    Ok(Trajectory::compute(medium, &fields, grids, p).action)
}

/// Filtered continuum amplitude b_p(t).
pub fn continuum_amplitude(medium: &MediumModel, pulse: &LaserPulse, p: [f64; 3], grids: &SfaGrids) -> Result<Vec<C64>> {
    let fields = pulse_fields(pulse, grids)?;
    Ok(Trajectory::compute(medium, &fields, grids, p).continuum)
}

/// Gamma_p(t) = Omega*(t) b_p(t), built on the filtered amplitude.
pub fn ionization_kernel(medium: &MediumModel, pulse: &LaserPulse, p: [f64; 3], grids: &SfaGrids) -> Result<Vec<C64>> {
    let fields = pulse_fields(pulse, grids)?;
    Ok(Trajectory::compute(medium, &fields, grids, p).ionization)
}

/// Step coefficients for sigma_{n+1} = e sigma_n - (i/w)(wa v_n + wb v_{n+1}): the displacement integral
/// taken exactly for v linear within each step.
#[derive(Debug, Clone, Copy)]
pub struct DisplacementStep {
    pub rotation: C64,
    pub wa: C64,
    pub wb: C64,
    pub omega: f64,
}

impl DisplacementStep {
    pub fn new(omega: f64, dt: f64) -> Self {
        let phi = omega * dt;
        let z = C64::new(0.0, -phi);
        // I0 = int_0^h e^{-i w u} du, I1 = int_0^h u e^{-i w u} du
        let (i0, i1) = if phi.abs() < 1e-2 {
            let mut i0 = C64::new(0.0, 0.0);
            let mut i1 = C64::new(0.0, 0.0);
            let mut term = C64::new(1.0, 0.0);
            for j in 0..12 {
                i0 += term / (j as f64 + 1.0);
                i1 += term / (j as f64 + 2.0);
                term *= z / (j as f64 + 1.0);
            }
            (i0 * dt, i1 * dt * dt)
        } else {
            let e = z.exp();
            let a = C64::new(0.0, -omega);
            ((e - 1.0) / a, (e * (a * dt - 1.0) + 1.0) / (a * a))
        };
        let wa = i1 / dt;
        DisplacementStep { rotation: C64::from_polar(1.0, -phi), wa, wb: i0 - wa, omega }
    }

    #[inline]
    pub fn advance(&self, sigma: C64, v_prev: f64, v_next: f64) -> C64 {
        self.rotation * sigma - C64::new(0.0, 1.0 / self.omega) * (self.wa * v_prev + self.wb * v_next)
    }
}

/// sigma-bar(t) for frequency `omega` (a.u.) from the velocity series.
pub fn mode_displacement_au(omega: f64, velocity: &[f64], dt: f64, method: SigmaMethod) -> Result<Vec<C64>> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(domain(format!("mode frequency must be positive, got {omega}")));
    }
    Ok(match method {
        SigmaMethod::HighFrequency => velocity.iter().map(|v| C64::new(-v / (omega * omega), 0.0)).collect(),
        SigmaMethod::ExactRecursion => {
            let step = DisplacementStep::new(omega, dt);
            let mut out = Vec::with_capacity(velocity.len());
            let mut s = C64::new(0.0, 0.0);
            out.push(s);
            for w in velocity.windows(2) {
                s = step.advance(s, w[0], w[1]);
                out.push(s);
            }
            out.truncate(velocity.len());
            out
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sfa::grids::{GridSpec, MomentumGrid};

    fn grids(pulse: &LaserPulse, k: usize, span: Option<f64>) -> SfaGrids {
        let m = MomentumGrid { par_max: 1.0, par_samples: 3, perp_max: 1.0, perp_samples: 3, taper: 0.0 };
        SfaGrids::new(pulse, &GridSpec { samples_per_period: k, span_periods: span, max_harmonic: 1.0, momentum: m, sigma: SigmaMethod::HighFrequency })
            .unwrap()
    }

    fn direct_window(g: &[C64], f: &RecollisionFilter, dt: f64) -> Vec<C64> {
        let k = f.samples_per_period();
        (0..g.len())
            .map(|n| {
                let mut s = C64::new(0.0, 0.0);
                for lag in 0..=k.min(n) {
                    s += f.weight(lag) * g[n - lag];
                }
                dt * s
            })
            .collect()
    }

    #[test]
    fn zero_drive_gives_zero_fields() {
        let p = LaserPulse::new(3.2e-6, 0.0, 6.0).unwrap();
        let f = pulse_fields(&p, &grids(&p, 64, None)).unwrap();
        assert!(f.field.iter().chain(&f.potential).all(|x| *x == 0.0));
    }

    #[test]
    fn short_grid_is_rejected() {
        let p = LaserPulse::new(3.2e-6, 1.3e9, 6.0).unwrap();
        assert!(matches!(pulse_fields(&p, &grids(&p, 64, Some(20.0))), Err(crate::Error::Config(_))));
    }

    #[test]
    fn potential_starts_at_zero_and_differentiates_to_field() {
        let p = LaserPulse::new(3.2e-6, 1.3e9, 6.0).unwrap();
        let f = pulse_fields(&p, &grids(&p, 64, None)).unwrap();
        assert_eq!(f.potential[0], 0.0);
        let dt = f.time.dt();
        for n in 0..f.field.len() - 1 {
            let lhs = -(f.potential[n + 1] - f.potential[n]) / dt;
            let rhs = 0.5 * (f.field[n] + f.field[n + 1]);
            assert!((lhs - rhs).abs() < 1e-12 * p.field_au());
        }
    }

    #[test]
    fn flat_envelope_potential_amplitude() {
        let p = LaserPulse::new(3.2e-6, 1.3e9, 6.0).unwrap().with_envelope(Envelope::Flat);
        let f = pulse_fields(&p, &grids(&p, 256, Some(10.0))).unwrap();
        let amax = f.potential.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let expect = p.field_au() / p.omega0_au();
        assert!((amax / expect - 1.0).abs() < 1e-3, "{amax} vs {expect}");
    }

    #[test]
    fn sliding_window_matches_direct() {
        let f = RecollisionFilter::new(16).unwrap();
        let g: Vec<C64> = (0..200).map(|n| C64::new((n as f64 * 0.3).sin(), (n as f64 * 0.17).cos() * 0.5)).collect();
        let a = windowed_sum(&g, &f, 0.7);
        let b = direct_window(&g, &f, 0.7);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn action_of_field_free_bound_state() {
        let p = LaserPulse::new(3.2e-6, 0.0, 6.0).unwrap();
        let g = grids(&p, 64, None);
        let h = MediumModel::hydrogen(1.0);
        let s = action_phase(&h, &p, [0.0; 3], &g).unwrap();
        let e0 = h.to_au().energy0;
        for (n, sv) in s.iter().enumerate() {
            let expect = e0 * (g.time().t(n) - g.time().t_start());
            assert!((sv - expect).abs() < 1e-9 * expect.max(1.0));
        }
    }

    #[test]
    fn constant_velocity_displacement_is_exact() {
        let v = vec![0.3; 400];
        let w = 0.7;
        let dt = 0.13;
        let s = mode_displacement_au(w, &v, dt, SigmaMethod::ExactRecursion).unwrap();
        for (n, z) in s.iter().enumerate() {
            let t = n as f64 * dt;
            let exact = -0.3 * (1.0 - C64::from_polar(1.0, -w * t)) / (w * w);
            assert!((z - exact).norm() < 1e-12);
        }
    }

    #[test]
    fn displacement_small_step_series_is_continuous() {
        let a = DisplacementStep::new(1.0, 0.009_999);
        let b = DisplacementStep::new(1.0, 0.010_001);
        assert!((a.wa - b.wa).norm() < 1e-5 && (a.wb - b.wb).norm() < 1e-5);
    }

    #[test]
    fn nonpositive_frequency_rejected() {
        assert!(mode_displacement_au(0.0, &[1.0, 2.0], 0.1, SigmaMethod::HighFrequency).is_err());
    }
}
