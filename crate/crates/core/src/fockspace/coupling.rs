use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::special::ln_cosh;

/// Sideband/squeezed-vacuum coupling of the two-mode state.
///
/// Only (zeta, r, theta) are stored; beta, beta_N and the normalization are
/// derived on demand so they can never drift apart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SidebandCoupling {
    zeta: C64,
    r: f64,
    theta: f64,
}

/// Build the coupling. Small |zeta|^2 is the validity regime but is not enforced.
pub fn sideband_coupling(zeta: C64, r: f64, theta: f64) -> Result<SidebandCoupling> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(domain(format!("squeezing r must be finite and >= 0, got {r}")));
    }
    if !(zeta.re.is_finite() && zeta.im.is_finite() && theta.is_finite()) {
        return Err(domain("coupling zeta and theta must be finite"));
    }
    Ok(SidebandCoupling { zeta, r, theta })
}

impl SidebandCoupling {
    /// Coupling with a real, non-negative zeta given by its square |zeta|^2.
    pub fn from_zeta_abs2(zeta_abs2: f64, r: f64, theta: f64) -> Result<Self> {
        if !(zeta_abs2 >= 0.0) {
            return Err(domain("|zeta|^2 must be >= 0"));
        }
        sideband_coupling(C64::new(zeta_abs2.sqrt(), 0.0), r, theta)
    }

    pub fn zeta(&self) -> C64 {
        self.zeta
    }
    pub fn zeta_abs2(&self) -> f64 {
        self.zeta.norm_sqr()
    }
    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn with_theta(&self, theta: f64) -> Self {
        SidebandCoupling { theta, ..*self }
    }

    /// beta = tanh(r) e^{-i theta} / 2
    pub fn beta(&self) -> C64 {
        C64::from_polar(0.5 * self.r.tanh(), -self.theta)
    }

    /// beta_N = beta / (1 + |zeta|^2)
    pub fn beta_n(&self) -> C64 {
        self.beta() / (1.0 + self.zeta_abs2())
    }

    /// Normalization prefactor 1/sqrt(1 + |zeta|^2).
    pub fn norm_n(&self) -> f64 {
        1.0 / (1.0 + self.zeta_abs2()).sqrt()
    }

    pub fn ln_cosh_r(&self) -> f64 {
        ln_cosh(self.r)
    }

    /// <n>_N = cosh^2(r) |zeta|^2
    pub fn mean_sideband_photons(&self) -> f64 {
        (2.0 * self.ln_cosh_r()).exp() * self.zeta_abs2()
    }

    /// 1 - tanh(r), stable for large r.
    pub fn one_minus_tanh_r(&self) -> f64 {
        let e = (-2.0 * self.r).exp();
        2.0 * e / (1.0 + e)
    }

    /// 1 - 2|beta_N|, stable for large r: (|zeta|^2 + 1 - tanh r) / (1 + |zeta|^2).
    pub fn one_minus_two_beta_n(&self) -> f64 {
        let z = self.zeta_abs2();
        (z + self.one_minus_tanh_r()) / (1.0 + z)
    }

    /// Limit of P(m+1)/P(m) for the exact two-mode state, |zeta|^2 / (1 - 2|beta_N|).
    /// At or above 1 the state has no finite norm; that happens once |zeta|^4 exceeds 1 - tanh r.
    pub fn marginal_decay_ratio(&self) -> f64 {
        self.zeta_abs2() / self.one_minus_two_beta_n()
    }

    pub fn is_normalizable(&self) -> bool {
        self.marginal_decay_ratio() < 1.0
    }

    /// Squeezing r_e of the effective squeezed vacuum exp(-beta_N a^2)|0>, tanh r_e = 2|beta_N|.
    pub fn effective_squeezing(&self) -> f64 {
        let d = self.one_minus_two_beta_n();
        0.5 * ((2.0 - d) / d).ln()
    }

    /// Cat parameter alpha_N = l_eta |zeta|^2 / (2 beta_N) for BSV photon number l.
    pub fn alpha_n(&self, l: u64) -> C64 {
        let l_eta = (l - l % 2) as f64;
        if l_eta == 0.0 || self.zeta_abs2() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let b = self.beta_n();
        if b.norm() == 0.0 {
            return C64::new(f64::INFINITY, 0.0);
        }
        l_eta * self.zeta_abs2() / (2.0 * b)
    }

    /// Same r and theta with |zeta|^2 chosen so that |alpha_N(l)| = target.
    pub fn rescaled_for_alpha(&self, l: u64, target_abs_alpha: f64) -> Result<Self> {
        let l_eta = (l - l % 2) as f64;
        let t = self.r.tanh();
        if l_eta == 0.0 || t == 0.0 || !(target_abs_alpha > 0.0) {
            return Err(domain("alpha rescaling needs l >= 2, r > 0 and a positive target"));
        }
        // |alpha| = l_eta z (1 + z) / tanh r
        let c = target_abs_alpha * t / l_eta;
        let z = 2.0 * c / (1.0 + (1.0 + 4.0 * c).sqrt());
        Self::from_zeta_abs2(z, self.r, self.theta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_zeta_reduces_to_bare_squeezing() {
        let c = sideband_coupling(C64::new(0.0, 0.0), 2.0, 0.3).unwrap();
        assert_eq!(c.beta_n(), c.beta());
        assert_eq!(c.norm_n(), 1.0);
    }

    #[test]
    fn no_squeezing_no_beta() {
        let c = SidebandCoupling::from_zeta_abs2(0.1, 0.0, 0.0).unwrap();
        assert_eq!(c.beta_n().norm(), 0.0);
    }

    #[test]
    fn working_point_beta() {
        let c = SidebandCoupling::from_zeta_abs2(6.7e-10, 13.6, 0.0).unwrap();
        assert_relative_eq!(c.beta_n().norm(), 0.5 * 13.6f64.tanh() / (1.0 + 6.7e-10), max_relative = 1e-15);
        assert!(c.beta_n().norm() < 0.5);
        // stable complement agrees with the naive one where the latter is accurate
        let m = SidebandCoupling::from_zeta_abs2(0.01, 2.0, 0.0).unwrap();
        assert_relative_eq!(m.one_minus_two_beta_n(), 1.0 - 2.0 * m.beta_n().norm(), max_relative = 1e-12);
        assert_relative_eq!(m.effective_squeezing().tanh(), 2.0 * m.beta_n().norm(), max_relative = 1e-12);
    }

    #[test]
    fn negative_r_rejected() {
        assert!(sideband_coupling(C64::new(0.0, 0.0), -1.0, 0.0).is_err());
    }

    #[test]
    fn alpha_rescaling_hits_target() {
        let c = SidebandCoupling::from_zeta_abs2(6.7e-10, 13.6, 0.0).unwrap();
        let s = c.rescaled_for_alpha(200, 6.7).unwrap();
        assert_relative_eq!(s.alpha_n(200).norm(), 6.7, max_relative = 1e-12);
        assert_relative_eq!(s.alpha_n(201).norm(), 6.7, max_relative = 1e-12);
        assert!(s.alpha_n(200).re > 0.0);
    }
}
