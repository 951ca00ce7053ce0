use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::fockspace::{SidebandCoupling, SingleModeState};

/// Second-order coherence with explicit non-finite states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum G2 {
    Value(f64),
    /// Diverges, e.g. the even cat as alpha -> 0.
    Infinite,
    /// <n> = 0, so the ratio has no value.
    Undefined,
}

impl G2 {
    pub fn value(&self) -> Option<f64> {
        match self {
            G2::Value(v) => Some(*v),
            _ => None,
        }
    }

    /// Finite value, +inf or NaN, for plotting.
    pub fn as_f64(&self) -> f64 {
        match self {
            G2::Value(v) => *v,
            G2::Infinite => f64::INFINITY,
            G2::Undefined => f64::NAN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Numeric,
    AnalyticProjq,
    AnalyticProjn,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StatisticsReport {
    pub mean_n: f64,
    pub g2: G2,
    pub var_x1: f64,
    pub var_x2: f64,
    pub provenance: Provenance,
}

impl StatisticsReport {
    pub fn uncertainty_product(&self) -> f64 {
        self.var_x1 * self.var_x2
    }
}

/// Fock-basis expectation values with X1 = (a + a^dag)/2, X2 = (a - a^dag)/(2i).
pub fn photon_statistics(state: &SingleModeState) -> Result<StatisticsReport> {
    let c = state.amplitudes();
    let norm: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(domain(format!("state norm {norm} is not 1")));
    }
    let k = c.len();
    let zero = C64::new(0.0, 0.0);
    let at = |n: isize| if n < 0 || n as usize >= k { zero } else { c[n as usize] };
    let (mut n1, mut n2, mut a1) = (0.0f64, 0.0f64, zero);
    let (mut x1sq, mut x2sq) = (0.0f64, 0.0f64);
    for n in 0..=k {
        let i = n as isize;
        let nf = n as f64;
        let p = at(i).norm_sqr();
        n1 += nf * p;
        n2 += nf * (nf - 1.0) * p;
        a1 += at(i).conj() * at(i + 1) * (nf + 1.0).sqrt();
        // components of (a +- a^dag) psi on |n>
        let up = at(i + 1) * (nf + 1.0).sqrt();
        let down = at(i - 1) * nf.sqrt();
        x1sq += (up + down).norm_sqr();
        x2sq += (up - down).norm_sqr();
    }
    let var_x1 = 0.25 * x1sq - a1.re * a1.re;
    let var_x2 = 0.25 * x2sq - a1.im * a1.im;
    let g2 = if n1 == 0.0 { G2::Undefined } else { G2::Value(n2 / (n1 * n1)) };
    Ok(StatisticsReport { mean_n: n1, g2, var_x1, var_x2, provenance: Provenance::Numeric })
}

/// Closed-form statistics of the BSV-projected sideband state (cat limit).
pub fn projq_statistics_analytic(c: &SidebandCoupling, l: u64) -> StatisticsReport {
    let alpha = c.alpha_n(l);
    let a = alpha.norm();
    let odd = l % 2 == 1;
    let t = a.tanh();
    // a / tanh(a) -> 1 as a -> 0
    let a_over_t = if a < 1e-8 { 1.0 + a * a / 3.0 } else { a / t };
    let spread = if odd { a_over_t } else { a * t };
    let g2 = if odd {
        G2::Value(t * t)
    } else if a == 0.0 {
        G2::Infinite
    } else {
        G2::Value(1.0 / (t * t))
    };
    StatisticsReport {
        mean_n: spread,
        g2,
        var_x1: 0.25 * (1.0 + 2.0 * (spread - alpha.re)),
        var_x2: 0.25 * (1.0 + 2.0 * (spread + alpha.re)),
        provenance: Provenance::AnalyticProjq,
    }
}

/// Quadrature variances of the sideband-projected BSV state, general theta,
/// with the large-cancellation factors rewritten in terms of 1 - tanh.
pub fn projn_quadratures(c: &SidebandCoupling, m: u64) -> (f64, f64) {
    let (r, th, z) = (c.r(), c.theta(), c.zeta_abs2());
    let n = c.mean_sideband_photons();
    let mf = m as f64;
    let t = r.tanh();
    let one_minus_t = c.one_minus_tanh_r();
    let s2 = (0.5 * th).sin().powi(2);
    let cos = th.cos();
    let e4 = (-4.0 * r).exp();
    let one_minus_t2 = 2.0 * e4 / (1.0 + e4);
    let cosh2 = (2.0 * r).cosh();
    let a1 = cosh2 * (2.0 * s2 + cos * one_minus_t2);
    let a2 = cosh2 * (1.0 + (1.0 - one_minus_t2) * cos);
    let pair = if m < 2 { 0.0 } else { mf * (mf - 1.0) / (2.0 * (2.0 * mf - 1.0)) };
    let b1 = (2.0 * s2 - one_minus_t - z * cos) / t;
    let b2 = 1.0 + cos * (1.0 + z) / t;
    let w = (2.0 * mf + 1.0) / 4.0 / (1.0 + 2.0 * n);
    let extra = z * (1.0 + n);
    (pair * b1 + w * (a1 + extra), pair * b2 + w * (a2 + extra))
}

/// theta = 0, tanh r ~ 1, <n>_N >> 1 reduction of `projn_quadratures`.
pub fn projn_quadratures_theta0(c: &SidebandCoupling, m: u64) -> (f64, f64) {
    let (r, z) = (c.r(), c.zeta_abs2());
    let n = c.mean_sideband_photons();
    let mf = m as f64;
    let w = (2.0 * mf + 1.0) / 4.0 / (1.0 + 2.0 * n);
    let tail = z / 4.0 * (1.0 + 1.0 / (2.0 * (2.0 * mf - 1.0)));
    (w * (-2.0 * r).exp() + tail, w * (2.0 * r).exp() + tail)
}

/// g2 = 1 + 2/(2m+1), independent of r, theta and zeta; <n> from X1^2 + X2^2 = n + 1/2.
pub fn projn_statistics_analytic(c: &SidebandCoupling, m: u64) -> StatisticsReport {
    let (v1, v2) = projn_quadratures(c, m);
    StatisticsReport {
        mean_n: v1 + v2 - 0.5,
        g2: G2::Value(1.0 + 2.0 / (2.0 * m as f64 + 1.0)),
        var_x1: v1,
        var_x2: v2,
        provenance: Provenance::AnalyticProjn,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fockspace::{project_on_n, project_on_q, Method};
    use proptest::prelude::*;

    fn c(z2: f64, r: f64, th: f64) -> SidebandCoupling {
        SidebandCoupling::from_zeta_abs2(z2, r, th).unwrap()
    }

    #[test]
    fn fock_anchors() {
        let v = photon_statistics(&SingleModeState::vacuum()).unwrap();
        assert_eq!(v.g2, G2::Undefined);
        assert!((v.var_x1 - 0.25).abs() < 1e-15 && (v.var_x2 - 0.25).abs() < 1e-15);
        let one = photon_statistics(&SingleModeState::fock(1)).unwrap();
        assert_eq!(one.g2, G2::Value(0.0));
        assert!((one.var_x1 - 0.75).abs() < 1e-15 && (one.var_x2 - 0.75).abs() < 1e-15);
    }

    #[test]
    fn squeezed_vacuum_closed_form() {
        // r = 1: amplitudes of exp(-tanh(r)/2 a^2)|0> via the m = 0 projection with zeta = 0
        let s = project_on_n(&c(0.0, 1.0, 0.0), 0, false).unwrap();
        let st = photon_statistics(&s).unwrap();
        let e2 = (2.0f64).exp();
        assert!((st.var_x1 / (0.25 / e2) - 1.0).abs() < 1e-9);
        assert!((st.var_x2 / (0.25 * e2) - 1.0).abs() < 1e-9);
        let want = 3.0 + 1.0 / 1f64.sinh().powi(2);
        // the 1e-12 norm tail is amplified by n^2 in the second moment
        assert!((st.g2.value().unwrap() / want - 1.0).abs() < 1e-8);
    }

    #[test]
    fn projq_limits() {
        let k = c(5.4e-4, 10.0, 0.0);
        let odd = projq_statistics_analytic(&k, 1);
        assert_eq!(odd.g2, G2::Value(0.0));
        assert!((odd.var_x1 - 0.75).abs() < 1e-15);
        let even = projq_statistics_analytic(&k, 0);
        assert_eq!(even.g2, G2::Infinite);
        assert!((even.var_x1 - 0.25).abs() < 1e-15);
        let big = projq_statistics_analytic(&k, 200_000);
        assert!((big.g2.value().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projq_analytic_matches_numeric_cat() {
        let k = c(5.4e-4, 10.0, 0.6);
        for l in [2u64, 3, 1000, 1001, 9000, 9001] {
            let a = projq_statistics_analytic(&k, l);
            let n = photon_statistics(&project_on_q(&k, l, Method::Analytic).unwrap()).unwrap();
            assert!((a.var_x1 - n.var_x1).abs() < 1e-9 * a.var_x1.max(1.0), "l={l}");
            assert!((a.var_x2 - n.var_x2).abs() < 1e-9 * a.var_x2.max(1.0), "l={l}");
            assert!((a.mean_n - n.mean_n).abs() < 1e-9 * a.mean_n.max(1.0));
        }
    }

    #[test]
    fn projn_anchors() {
        let k = c(6.7e-10, 13.6, 0.0);
        assert_eq!(projn_statistics_analytic(&k, 0).g2, G2::Value(3.0));
        assert!((projn_statistics_analytic(&k, 1).g2.value().unwrap() - 5.0 / 3.0).abs() < 1e-15);
        let s = projn_statistics_analytic(&k, 0);
        assert!((s.uncertainty_product() * 16.0 - 1.0).abs() < 1e-3);
        let perp = projn_statistics_analytic(&k.with_theta(std::f64::consts::FRAC_PI_2), 0);
        assert!(perp.var_x1 >= 0.25 && perp.var_x2 >= 0.25);
        assert!((projn_statistics_analytic(&k, 100_000).g2.value().unwrap() - 1.0) < 1e-4);
    }

    #[test]
    fn projn_theta0_reduction_agrees() {
        let k = c(6.7e-10, 13.6, 0.0);
        let n = k.mean_sideband_photons();
        for m in [2u64, 5, 50] {
            let (a1, a2) = projn_quadratures(&k, m);
            let (b1, b2) = projn_quadratures_theta0(&k, m);
            // the reduction drops terms of relative size (2m+1)/(1+2<n>)
            let tol = (2.0 * m as f64 + 1.0) / (1.0 + 2.0 * n) + 1e-3;
            assert!((a1 - b1).abs() < tol * b1, "m={m}: {a1} {b1}");
            assert!((a2 - b2).abs() < 1e-3 * b2);
        }
    }

    proptest! {
        #[test]
        fn heisenberg_bound(re in proptest::collection::vec(-1.0f64..1.0, 1..12), im in proptest::collection::vec(-1.0f64..1.0, 12)) {
            let c: Vec<C64> = re.iter().zip(&im).map(|(a, b)| C64::new(*a, *b)).collect();
            prop_assume!(c.iter().any(|z| z.norm() > 1e-3));
            let s = SingleModeState::from_amplitudes(&c).unwrap();
            let st = photon_statistics(&s).unwrap();
            prop_assert!(st.uncertainty_product() >= 1.0 / 16.0 - 1e-9);
            prop_assert!(st.mean_n >= 0.0);
        }
    }
}
