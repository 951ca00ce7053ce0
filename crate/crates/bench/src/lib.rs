//! Shared fixtures for the criterion benches.

use qshhg::fockspace::SidebandCoupling;
use qshhg::sfa::{GridSpec, MomentumGrid, RecollisionFilter, SfaGrids, SigmaMethod};
use qshhg::scenario::SpectrumScenario;
use qshhg::C64;

/// ZnO working point with a reduced momentum grid so one evaluation takes well under a second.
pub fn small_zno(par: usize, perp: usize) -> (SpectrumScenario, SfaGrids) {
    let mut s = SpectrumScenario::zno();
    s.grid = GridSpec {
        momentum: MomentumGrid::for_drive(&s.pulse, &s.medium, par, perp),
        sigma: SigmaMethod::HighFrequency,
        ..s.grid
    };
    let grids = SfaGrids::new(&s.pulse, &s.grid).expect("valid fixture");
    (s, grids)
}

/// Reference O(N K) evaluation of the recollision-filtered sum.
pub fn direct_windowed_sum(g: &[C64], filter: &RecollisionFilter, dt: f64) -> Vec<C64> {
    let k = filter.samples_per_period();
    let w: Vec<f64> = (0..=k).map(|i| filter.weight(i)).collect();
    (0..g.len())
        .map(|n| {
            let s: C64 = (0..=k.min(n)).map(|lag| w[lag] * g[n - lag]).sum();
            dt * s
        })
        .collect()
}

/// A smooth oscillating test signal.
pub fn chirp(n: usize) -> Vec<C64> {
    (0..n).map(|i| C64::from_polar(1.0, 1e-4 * (i * i) as f64)).collect()
}

/// Strongly squeezed coupling: r = 10, |zeta|^2 = 2.916e-7.
pub fn coupling_r10() -> SidebandCoupling {
    SidebandCoupling::from_zeta_abs2(2.916e-7, 10.0, 0.0).expect("valid fixture")
}

#[cfg(test)]
mod tests {
    use super::*;
    use qshhg::sfa::windowed_sum;

    #[test]
    fn sliding_window_matches_direct_sum() {
        let f = RecollisionFilter::new(64).unwrap();
        let g = chirp(1000);
        let fast = windowed_sum(&g, &f, 0.1);
        let slow = direct_windowed_sum(&g, &f, 0.1);
        let scale = slow.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() <= 1e-10 * scale);
        }
    }
}
