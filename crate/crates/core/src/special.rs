//! Log-domain helpers for factorial-heavy amplitudes.

use statrs::function::gamma::ln_gamma;

/// ln(n!) through log-gamma.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        0.0
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

/// ln((2m-1)!!/(2m)!!) = ln Gamma(m+1/2) - ln Gamma(m+1) - ln(pi)/2.
pub fn ln_double_factorial_ratio(m: u64) -> f64 {
    let m = m as f64;
    ln_gamma(m + 0.5) - ln_gamma(m + 1.0) - 0.5 * std::f64::consts::PI.ln()
}

/// ln cosh(r) without overflow.
pub fn ln_cosh(r: f64) -> f64 {
    let a = r.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// A complex number stored as (ln|z|, arg z). Zero has `ln_abs = -inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogAmp {
    pub ln_abs: f64,
    pub phase: f64,
}

impl LogAmp {
    pub const ZERO: LogAmp = LogAmp { ln_abs: f64::NEG_INFINITY, phase: 0.0 };

    pub fn new(ln_abs: f64, phase: f64) -> Self {
        LogAmp { ln_abs, phase }
    }

    pub fn is_zero(&self) -> bool {
        self.ln_abs == f64::NEG_INFINITY
    }

    pub fn to_complex(self) -> num_complex::Complex64 {
        if self.is_zero() {
            return num_complex::Complex64::new(0.0, 0.0);
        }
        num_complex::Complex64::from_polar(self.ln_abs.exp(), self.phase)
    }

    /// ln|z|^2
    pub fn ln_prob(&self) -> f64 {
        2.0 * self.ln_abs
    }
}

/// ln(sum exp(x_i)) over finite entries; `-inf` for an empty or all-zero input.
pub fn log_sum_exp(xs: impl IntoIterator<Item = f64> + Clone) -> f64 {
    let max = xs.clone().into_iter().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let s: f64 = xs.into_iter().map(|x| (x - max).exp()).sum();
    max + s.ln()
}
