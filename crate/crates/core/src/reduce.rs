//! Deterministic parallel reductions.
//!
//! The tree shape depends only on the number of leaves, so floating-point
//! results are bit-identical for any rayon pool size.

/// Evaluate `leaf(i)` for `i in 0..n` in parallel and combine with a fixed
/// balanced binary tree. Returns `None` when `n == 0`.
pub fn pairwise_reduce<T, L, M>(n: usize, leaf: L, merge: M) -> Option<T>
where
    T: Send,
    L: Fn(usize) -> T + Sync,
    M: Fn(T, T) -> T + Sync,
{
    fn rec<T, L, M>(lo: usize, hi: usize, leaf: &L, merge: &M) -> T
    where
        T: Send,
        L: Fn(usize) -> T + Sync,
        M: Fn(T, T) -> T + Sync,
    {
        if hi - lo == 1 {
            return leaf(lo);
        }
        let mid = lo + (hi - lo) / 2;
        let (a, b) = rayon::join(|| rec(lo, mid, leaf, merge), || rec(mid, hi, leaf, merge));
        merge(a, b)
    }
    if n == 0 {
        None
    } else {
        Some(rec(0, n, &leaf, &merge))
    }
}

/// Sequential pairwise summation with the same tree shape as [`pairwise_reduce`].
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_is_none() {
        assert!(pairwise_reduce(0, |i| i as f64, |a, b| a + b).is_none());
    }

    #[test]
    fn pool_size_does_not_change_bits() {
        let f = |i: usize| ((i as f64) * 0.37).sin() * 1e-3 + 1.0 / (1.0 + i as f64);
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| pairwise_reduce(1001, f, |a, b| a + b).unwrap())
        };
        let a = run(1);
        assert_eq!(a.to_bits(), run(2).to_bits());
        assert_eq!(a.to_bits(), run(5).to_bits());
    }

    proptest! {
        #[test]
        fn matches_sequential_pairwise(xs in proptest::collection::vec(-1e3f64..1e3, 1..300)) {
            let par = pairwise_reduce(xs.len(), |i| xs[i], |a, b| a + b).unwrap();
            prop_assert_eq!(par.to_bits(), pairwise_sum(&xs).to_bits());
        }
    }
}
