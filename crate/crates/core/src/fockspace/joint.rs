use num_complex::Complex64 as C64;
use serde::Serialize;

use super::coupling::SidebandCoupling;
use crate::error::{Error, Result};
use crate::special::{ln_double_factorial_ratio, ln_factorial, LogAmp};

/// Exact Fock sums above this squeezing need `allow_expensive`.
pub const EXACT_R_LIMIT: f64 = 12.0;
/// Relative tail tolerance for truncated Fock series.
pub const TAIL_TOLERANCE: f64 = 1e-12;
/// Hard cap on series length regardless of flags.
pub const MAX_SERIES_TERMS: u64 = 50_000_000_000;

pub(crate) fn check_exact_allowed(c: &SidebandCoupling, allow_expensive: bool, what: &str) -> Result<()> {
    if c.r() > EXACT_R_LIMIT && !allow_expensive {
        return Err(Error::Refused {
            reason: format!("{what} at r = {} needs ~cosh^2(r) = {:.1e} Fock terms", c.r(), (2.0 * c.ln_cosh_r()).exp()),
            remedy: "use the analytic method or pass --allow-expensive".into(),
        });
    }
    Ok(())
}

fn check_normalizable(c: &SidebandCoupling) -> Result<()> {
    if c.is_normalizable() {
        return Ok(());
    }
    Err(Error::Domain(format!(
        "two-mode state is not normalizable at r = {}, |zeta|^2 = {:e}: P(m+1)/P(m) -> {:.6} >= 1",
        c.r(),
        c.zeta_abs2(),
        c.marginal_decay_ratio()
    )))
}

/// Joint amplitude <m, n|phi> as (ln|.|, phase); zero unless n >= m and n - m even.
pub fn joint_log_amplitude(c: &SidebandCoupling, m: u64, n: u64) -> LogAmp {
    if n < m || (n - m) % 2 == 1 {
        return LogAmp::ZERO;
    }
    let j = (n - m) / 2;
    let z = c.zeta_abs2().sqrt();
    let b = -c.beta_n();
    let zpart = if m == 0 { 0.0 } else { m as f64 * z.ln() };
    let bpart = if j == 0 { 0.0 } else { j as f64 * b.norm().ln() };
    let ln_abs = c.norm_n().ln() - 0.5 * c.ln_cosh_r() + zpart + bpart + 0.5 * ln_factorial(n)
        - 0.5 * ln_factorial(m)
        - ln_factorial(j);
    if ln_abs.is_nan() {
        return LogAmp::ZERO;
    }
    LogAmp::new(ln_abs, if j == 0 { 0.0 } else { j as f64 * b.arg() })
}

pub fn joint_amplitude(c: &SidebandCoupling, m: u64, n: u64) -> C64 {
    joint_log_amplitude(c, m, n).to_complex()
}

/// P(m, n) = |<m, n|phi>|^2
pub fn joint_probability(c: &SidebandCoupling, m: u64, n: u64) -> f64 {
    joint_log_amplitude(c, m, n).ln_prob().exp()
}

/// P(m, n) for m in 0..=m_max (rows) and n in 0..=n_max (columns).
pub fn joint_distribution(c: &SidebandCoupling, m_max: u64, n_max: u64) -> Vec<Vec<f64>> {
    (0..=m_max).map(|m| (0..=n_max).map(|n| joint_probability(c, m, n)).collect()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Analytic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarginalValue {
    pub m: u64,
    pub probability: f64,
    pub ln_probability: f64,
    /// Relative bound on the discarded part of the n-sum (0 for the analytic form).
    pub tail_bound: f64,
    pub terms: u64,
}

/// ln sum_j b2^j (m+2j)! / (m! (j!)^2), truncated once a geometric bound on
/// the remainder drops below `TAIL_TOLERANCE` of the partial sum.
pub(crate) struct SeriesSum {
    pub ln_sum: f64,
    pub tail: f64,
    pub terms: u64,
}

pub(crate) fn squeezed_series(m: u64, b2: f64) -> Result<SeriesSum> {
    const BIG: f64 = 1e250;
    let limit = 4.0 * b2;
    let (mut sum, mut term, mut ln_scale) = (1.0f64, 1.0f64, 0.0f64);
    let mf = m as f64;
    let mut j = 0u64;
    loop {
        let jf = j as f64;
        let rho = b2 * (mf + 2.0 * jf + 1.0) * (mf + 2.0 * jf + 2.0) / ((jf + 1.0) * (jf + 1.0));
        let bound = rho.max(limit);
        if bound < 1.0 {
            let tail = term * bound / (1.0 - bound);
            if tail <= TAIL_TOLERANCE * sum {
                return Ok(SeriesSum { ln_sum: sum.ln() + ln_scale, tail: tail / sum, terms: j + 1 });
            }
        }
        if j >= MAX_SERIES_TERMS {
            return Err(Error::NotConverged(format!("squeezed series for m = {m} exceeded {MAX_SERIES_TERMS} terms")));
        }
        term *= rho;
        sum += term;
        j += 1;
        if sum > BIG {
            sum /= BIG;
            term /= BIG;
            ln_scale += BIG.ln();
        }
    }
}

/// Sideband photon distribution P(m).
pub fn marginal_probability(c: &SidebandCoupling, m: u64, method: Method, allow_expensive: bool) -> Result<MarginalValue> {
    match method {
        Method::Analytic => {
            let n = c.mean_sideband_photons();
            let ln_p = if n == 0.0 {
                if m == 0 {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            } else {
                let t2 = c.r().tanh().powi(2);
                let x = 2.0 * n * t2;
                let lx = if m == 0 { 0.0 } else { m as f64 * x.ln() };
                ln_double_factorial_ratio(m) + lx - (m as f64 + 0.5) * (2.0 * n).ln_1p()
            };
            Ok(MarginalValue { m, probability: ln_p.exp(), ln_probability: ln_p, tail_bound: 0.0, terms: 0 })
        }
        Method::Exact => {
            check_exact_allowed(c, allow_expensive, "exact marginal")?;
            check_normalizable(c)?;
            let z2 = c.zeta_abs2();
            if z2 == 0.0 && m > 0 {
                return Ok(MarginalValue { m, probability: 0.0, ln_probability: f64::NEG_INFINITY, tail_bound: 0.0, terms: 0 });
            }
            let s = squeezed_series(m, c.beta_n().norm_sqr())?;
            let zpart = if m == 0 { 0.0 } else { m as f64 * z2.ln() };
            let ln_p = 2.0 * c.norm_n().ln() - c.ln_cosh_r() + zpart + s.ln_sum;
            Ok(MarginalValue { m, probability: ln_p.exp(), ln_probability: ln_p, tail_bound: s.tail, terms: s.terms })
        }
    }
}

/// ln S_m for m = 0..=m_max, S_m = sum_j b2^j (m+2j)!/(m! (j!)^2) = (1-y)^(-(m+1)/2) P_m(x),
/// x = (1-y)^(-1/2), y = 4 b2, with P_m Legendre. Forward recurrence is stable for x >= 1.
fn squeezed_series_legendre(m_max: u64, one_minus_y: f64) -> Vec<f64> {
    const BIG: f64 = 1e250;
    let ln_1my = one_minus_y.ln();
    let x = (-0.5 * ln_1my).exp();
    let mut out = Vec::with_capacity(m_max as usize + 1);
    let (mut p_prev, mut p, mut ln_scale) = (0.0f64, 1.0f64, 0.0f64);
    for m in 0..=m_max {
        let mf = m as f64;
        out.push(p.ln() + ln_scale - 0.5 * (mf + 1.0) * ln_1my);
        let next = ((2.0 * mf + 1.0) * x * p - mf * p_prev) / (mf + 1.0);
        p_prev = p;
        p = next;
        if p > BIG {
            p /= BIG;
            p_prev /= BIG;
            ln_scale += BIG.ln();
        }
    }
    out
}

/// P(m) for m in 0..=m_max. The exact path sums every n-series at once through a
/// three-term recurrence in m, so its cost is O(m_max) at any squeezing.
pub fn marginal_distribution(c: &SidebandCoupling, m_max: u64, method: Method, allow_expensive: bool) -> Result<Vec<MarginalValue>> {
    use rayon::prelude::*;
    match method {
        Method::Analytic => (0..=m_max).into_par_iter().map(|m| marginal_probability(c, m, method, false)).collect(),
        Method::Exact => {
            check_exact_allowed(c, allow_expensive, "exact marginal")?;
            check_normalizable(c)?;
            let z2 = c.zeta_abs2();
            let b = 2.0 * c.beta_n().norm();
            let one_minus_y = c.one_minus_two_beta_n() * (1.0 + b);
            let head = 2.0 * c.norm_n().ln() - c.ln_cosh_r();
            let ln_s = squeezed_series_legendre(m_max, one_minus_y);
            Ok(ln_s
                .into_iter()
                .enumerate()
                .map(|(m, ls)| {
                    let ln_p = match (m, z2 == 0.0) {
                        (0, _) => head + ls,
                        (_, true) => f64::NEG_INFINITY,
                        _ => head + m as f64 * z2.ln() + ls,
                    };
                    MarginalValue { m: m as u64, probability: ln_p.exp(), ln_probability: ln_p, tail_bound: 0.0, terms: m as u64 + 1 }
                })
                .collect())
        }
    }
}
