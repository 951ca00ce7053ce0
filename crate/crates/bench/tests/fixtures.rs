use qshhg::fockspace::{marginal_distribution, Method};
use qshhg::sfa::{windowed_sum, RecollisionFilter};
use qshhg_bench::{chirp, coupling_r10, direct_windowed_sum, small_zno};

#[test]
fn bench_fixtures_are_valid() {
    let (s, grids) = small_zno(5, 3);
    assert_eq!(grids.samples_per_period(), s.grid.samples_per_period);
    assert!(coupling_r10().is_normalizable());
}

#[test]
fn both_marginal_paths_agree_on_the_bench_coupling() {
    let k = coupling_r10();
    let exact = marginal_distribution(&k, 1000, Method::Exact, false).unwrap();
    let closed = marginal_distribution(&k, 1000, Method::Analytic, false).unwrap();
    for (a, b) in exact.iter().zip(&closed) {
        assert!((a.probability - b.probability).abs() <= 1e-3 * b.probability);
    }
}

#[test]
fn direct_sum_agrees_on_a_short_signal() {
    let f = RecollisionFilter::new(16).unwrap();
    let g = chirp(40);
    let fast = windowed_sum(&g, &f, 1.0);
    for (a, b) in fast.iter().zip(direct_windowed_sum(&g, &f, 1.0)) {
        assert!((a - b).norm() < 1e-12);
    }
}
