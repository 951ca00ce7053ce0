use num_complex::Complex64 as C64;

use crate::error::{domain, Result};
use crate::special::{log_sum_exp, LogAmp};

/// Truncated single-mode Fock state c_0..c_K, stored as log-magnitude and phase.
///
/// Amplitudes are normalized over the kept entries; `tail` bounds the relative
/// weight of the discarded entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleModeState {
    amps: Vec<LogAmp>,
    tail: f64,
}

impl SingleModeState {
    /// Normalize raw log amplitudes. At least one entry must be non-zero.
    pub fn from_log_amplitudes(mut amps: Vec<LogAmp>, tail: f64) -> Result<Self> {
        if amps.iter().any(|a| a.ln_abs.is_nan() || a.ln_abs == f64::INFINITY || !a.phase.is_finite()) {
            return Err(domain("non-finite Fock amplitude"));
        }
        let ln_norm2 = log_sum_exp(amps.iter().map(|a| a.ln_prob()));
        if ln_norm2 == f64::NEG_INFINITY {
            return Err(domain("state has zero norm"));
        }
        for a in amps.iter_mut().filter(|a| !a.is_zero()) {
            a.ln_abs -= 0.5 * ln_norm2;
        }
        while amps.len() > 1 && amps.last().is_some_and(|a| a.is_zero()) {
            amps.pop();
        }
        Ok(SingleModeState { amps, tail: tail.max(0.0) })
    }

    pub fn from_amplitudes(c: &[C64]) -> Result<Self> {
        let amps = c
            .iter()
            .map(|z| if z.norm() == 0.0 { LogAmp::ZERO } else { LogAmp::new(z.norm().ln(), z.arg()) })
            .collect();
        Self::from_log_amplitudes(amps, 0.0)
    }

    pub fn fock(n: usize) -> Self {
        let mut amps = vec![LogAmp::ZERO; n + 1];
        amps[n] = LogAmp::new(0.0, 0.0);
        SingleModeState { amps, tail: 0.0 }
    }

    pub fn vacuum() -> Self {
        Self::fock(0)
    }

    /// Truncation K (highest kept Fock index).
    pub fn truncation(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail
    }

    pub fn log_amplitudes(&self) -> &[LogAmp] {
        &self.amps
    }

    pub fn amplitude(&self, n: usize) -> C64 {
        self.amps.get(n).map_or(C64::new(0.0, 0.0), |a| a.to_complex())
    }

    pub fn amplitudes(&self) -> Vec<C64> {
        self.amps.iter().map(|a| a.to_complex()).collect()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.ln_prob().exp()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.probabilities().iter().sum()
    }

    /// Fock parity shared by every populated entry, if any.
    pub fn parity(&self) -> Option<usize> {
        let mut p = None;
        for (n, a) in self.amps.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            match p {
                None => p = Some(n % 2),
                Some(q) if q != n % 2 => return None,
                _ => {}
            }
        }
        p
    }
}
