use num_complex::Complex64 as C64;

use super::coupling::SidebandCoupling;
use super::joint::{check_exact_allowed, joint_log_amplitude, Method, TAIL_TOLERANCE};
use super::state::SingleModeState;
use crate::error::{domain, Error, Result};
use crate::special::{ln_factorial, LogAmp};

/// Largest Fock dimension a projection will materialize.
pub const MAX_STATE_DIM: usize = 40_000_000;

fn too_large(what: &str, dim: u64) -> Error {
    Error::Refused {
        reason: format!("{what} needs a Fock dimension of {dim} (limit {MAX_STATE_DIM})"),
        remedy: "use the analytic statistics instead".into(),
    }
}

/// Sideband-mode state left after measuring l photons in the BSV mode (up to a global phase).
pub fn project_on_q(c: &SidebandCoupling, l: u64, method: Method) -> Result<SingleModeState> {
    let eta = l % 2;
    match method {
        Method::Exact => {
            let half = (l - eta) / 2;
            if half + 1 > MAX_STATE_DIM as u64 / 2 {
                return Err(too_large("exact BSV-mode projection", l));
            }
            let mut amps = vec![LogAmp::ZERO; l as usize + 1];
            for mp in 0..=half {
                let k = 2 * mp + eta;
                amps[k as usize] = joint_log_amplitude(c, k, l);
            }
            SingleModeState::from_log_amplitudes(amps, 0.0)
                .map_err(|_| domain(format!("BSV photon number {l} has zero probability for this coupling")))
        }
        Method::Analytic => analytic_cat(c.alpha_n(l), eta),
    }
}

/// Parity-eta cat: sum_m (-1)^m sqrt(alpha)^(2m+eta) / sqrt((2m+eta)!) |2m+eta>.
fn analytic_cat(alpha: C64, eta: u64) -> Result<SingleModeState> {
    let a = alpha.norm();
    if !a.is_finite() {
        return Err(domain("cat parameter alpha is not finite"));
    }
    if a == 0.0 {
        // sinh guard: the odd branch collapses onto |1>, the even one onto vacuum
        return Ok(SingleModeState::fock(eta as usize));
    }
    let (ln_a, arg) = (a.ln(), alpha.arg());
    let mut amps = Vec::new();
    let mut partial = 0.0f64;
    let mut k = eta;
    loop {
        let mp = (k - eta) / 2;
        let ln_abs = 0.5 * k as f64 * ln_a - 0.5 * ln_factorial(k);
        let phase = 0.5 * k as f64 * arg + std::f64::consts::PI * (mp % 2) as f64;
        while amps.len() < k as usize {
            amps.push(LogAmp::ZERO);
        }
        amps.push(LogAmp::new(ln_abs, phase));
        let w = (2.0 * ln_abs).exp();
        partial += w;
        // |c_{k+2}|^2/|c_k|^2 = a^2/((k+1)(k+2)), decreasing in k
        let rho = a * a / ((k as f64 + 1.0) * (k as f64 + 2.0));
        if rho < 1.0 && w * rho / (1.0 - rho) <= TAIL_TOLERANCE * partial {
            let tail = w * rho / (1.0 - rho) / partial;
            return SingleModeState::from_log_amplitudes(amps, tail);
        }
        if amps.len() > MAX_STATE_DIM {
            return Err(too_large("analytic cat state", amps.len() as u64));
        }
        k += 2;
    }
}

/// BSV-mode state left after measuring m sideband photons: the m-photon-added
/// squeezed vacuum sum_l (-beta_N)^l sqrt((2l+m)!)/l! |2l+m>.
pub fn project_on_n(c: &SidebandCoupling, m: u64, allow_expensive: bool) -> Result<SingleModeState> {
    check_exact_allowed(c, allow_expensive, "exact sideband-mode projection")?;
    let b = -c.beta_n();
    let b2 = b.norm_sqr();
    let mf = m as f64;
    if b2 == 0.0 {
        return Ok(SingleModeState::fock(m as usize));
    }
    let mut amps = vec![LogAmp::ZERO; m as usize];
    let mut ln_amp = 0.5 * ln_factorial(m);
    let mut ln_partial = f64::NEG_INFINITY;
    let mut l = 0u64;
    loop {
        amps.push(LogAmp::new(ln_amp, (l as f64 * b.arg()) % std::f64::consts::TAU));
        let lp = 2.0 * ln_amp;
        ln_partial = if ln_partial == f64::NEG_INFINITY {
            lp
        } else if lp > ln_partial {
            lp + (ln_partial - lp).exp().ln_1p()
        } else {
            ln_partial + (lp - ln_partial).exp().ln_1p()
        };
        let lf = l as f64;
        let rho = b2 * (mf + 2.0 * lf + 1.0) * (mf + 2.0 * lf + 2.0) / ((lf + 1.0) * (lf + 1.0));
        let bound = rho.max(4.0 * b2);
        if bound < 1.0 {
            let ln_tail = lp + (bound / (1.0 - bound)).ln() - ln_partial;
            if ln_tail <= TAIL_TOLERANCE.ln() {
                return SingleModeState::from_log_amplitudes(amps, ln_tail.exp());
            }
        }
        amps.push(LogAmp::ZERO);
        if amps.len() > MAX_STATE_DIM {
            return Err(too_large("exact sideband-mode projection", amps.len() as u64));
        }
        ln_amp += 0.5 * rho.ln();
        l += 1;
    }
}

/// Finite core of the m-photon-added squeezed vacuum: the state equals S(r_e, phi) |core>,
/// where S squeezes with tanh r_e = 2|beta_N| along the axis set by phi = arg beta_N.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonAddedForm {
    /// Normalized Fock amplitudes of (a^dag - tanh(r_e) e^{-i phi} a)^m |0>.
    pub core: Vec<C64>,
    pub squeezing: f64,
    pub angle: f64,
}

pub fn photon_added_form(c: &SidebandCoupling, m: u64) -> PhotonAddedForm {
    let beta = c.beta_n();
    let angle = if beta.norm() == 0.0 { 0.0 } else { beta.arg() };
    let t = 1.0 - c.one_minus_two_beta_n();
    let k = C64::from_polar(t, -angle);
    let mut v = vec![C64::new(0.0, 0.0); m as usize + 1];
    v[0] = C64::new(1.0, 0.0);
    for _ in 0..m {
        let mut w = vec![C64::new(0.0, 0.0); v.len()];
        for n in 0..v.len() {
            if v[n] == C64::new(0.0, 0.0) {
                continue;
            }
            if n + 1 < w.len() {
                w[n + 1] += v[n] * ((n + 1) as f64).sqrt();
            }
            if n > 0 {
                w[n - 1] -= k * v[n] * (n as f64).sqrt();
            }
        }
        let nrm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v = w.into_iter().map(|z| z / nrm).collect();
    }
    PhotonAddedForm { core: v, squeezing: c.effective_squeezing(), angle }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(z2: f64, r: f64, th: f64) -> SidebandCoupling {
        SidebandCoupling::from_zeta_abs2(z2, r, th).unwrap()
    }

    #[test]
    fn q_projection_small_l() {
        let k = c(6.7e-10, 13.6, 0.0);
        for method in [Method::Exact, Method::Analytic] {
            let v = project_on_q(&k, 0, method).unwrap();
            assert_eq!(v.truncation(), 0);
            let one = project_on_q(&k, 1, method).unwrap();
            assert_eq!(one.truncation(), 1);
            assert!((one.probabilities()[1] - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn q_projection_parity_and_spec_form() {
        let k = c(5.4e-4, 10.0, 0.8);
        for l in [40u64, 41, 400, 401] {
            let s = project_on_q(&k, l, Method::Exact).unwrap();
            assert_eq!(s.parity(), Some((l % 2) as usize));
            // ratio of successive amplitudes against -(|zeta|^2/beta_N) (l_eta/2 - m) / sqrt((2m+eta+1)(2m+eta+2))
            let eta = l % 2;
            let q = k.zeta_abs2() / k.beta_n();
            for mp in 0..5u64 {
                let kk = (2 * mp + eta) as usize;
                let ratio = s.amplitude(kk + 2) / s.amplitude(kk);
                let want = -q * ((l - eta) / 2 - mp) as f64 / (((kk + 1) * (kk + 2)) as f64).sqrt();
                assert!((ratio - want).norm() < 1e-10 * want.norm(), "l={l} m={mp}");
            }
        }
    }

    #[test]
    fn analytic_cat_is_limit_of_exact() {
        let k = c(5.4e-4, 10.0, 0.0);
        let l = 20_000u64;
        let e = project_on_q(&k, l, Method::Exact).unwrap();
        let a = project_on_q(&k, l, Method::Analytic).unwrap();
        let overlap: C64 = (0..=a.truncation()).map(|n| e.amplitude(n).conj() * a.amplitude(n)).sum();
        assert!(overlap.norm() > 0.999, "{}", overlap.norm());
    }

    #[test]
    fn n_projection_reduces_to_squeezed_vacuum() {
        let k = c(0.0, 1.2, 0.0);
        let s = project_on_n(&k, 0, false).unwrap();
        assert_eq!(s.parity(), Some(0));
        // |c_2/c_0| = tanh(r)/sqrt 2
        let ratio = s.amplitude(2) / s.amplitude(0);
        assert!((ratio.re + 1.2f64.tanh() / 2f64.sqrt()).abs() < 1e-12);
        assert!(s.tail_bound() < 1e-12);
        let odd = project_on_n(&c(1e-3, 1.2, 0.4), 1, false).unwrap();
        assert_eq!(odd.parity(), Some(1));
    }

    #[test]
    fn n_projection_matches_joint_amplitudes() {
        let k = c(1e-3, 1.5, 0.6);
        let m = 3u64;
        let s = project_on_n(&k, m, false).unwrap();
        let ref0 = joint_log_amplitude(&k, m, m).to_complex();
        let s0 = s.amplitude(m as usize);
        for j in 0..10u64 {
            let n = m + 2 * j;
            let want = joint_log_amplitude(&k, m, n).to_complex() / ref0;
            let got = s.amplitude(n as usize) / s0;
            assert!((want - got).norm() < 1e-11 * want.norm().max(1e-300), "n={n}");
        }
    }

    #[test]
    fn refusals() {
        let k = c(6.7e-10, 13.6, 0.0);
        assert!(matches!(project_on_n(&k, 1, false), Err(Error::Refused { .. })));
        let z = c(0.0, 1.0, 0.0);
        assert!(project_on_q(&z, 3, Method::Exact).is_err());
    }

    #[test]
    fn photon_added_core_single_photon() {
        let f = photon_added_form(&c(6.7e-10, 13.6, 0.0), 1);
        assert_eq!(f.core.len(), 2);
        assert!((f.core[1].norm() - 1.0).abs() < 1e-15);
        assert!(f.squeezing > 10.0);
    }
}
