//! Deterministic reductions.
//!
//! Every norm in this crate is a sum (or max) over a large index set,
//! evaluated in parallel. Floating-point addition is not associative, so
//! naive parallel reduction would make results depend on the worker
//! count. The reductions here fix the association tree as a function of
//! the input length alone: splitting always happens at the midpoint and
//! leaves below a fixed size are folded sequentially. Serial and
//! parallel evaluation therefore produce bit-identical results, and the
//! thread count never leaks into the output.

use rayon::join;

/// Below this length the recursion folds sequentially. The value only
/// trades speed; it does not affect results because the tree shape is
/// still determined by slice length.
const LEAF: usize = 32;

/// Length above which the two halves are evaluated on the rayon pool.
const PARALLEL_CUTOFF: usize = 8192;

/// Fixed-tree pairwise sum. Bit-identical to [`par_pairwise_sum`].
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let (lo, hi) = xs.split_at(xs.len() / 2);
    pairwise_sum(lo) + pairwise_sum(hi)
}

/// Fixed-tree pairwise sum with the two halves evaluated in parallel.
/// The association tree is identical to [`pairwise_sum`], so the result
/// has the same bits regardless of how rayon schedules the halves.
pub fn par_pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= PARALLEL_CUTOFF {
        return pairwise_sum(xs);
    }
    let (lo, hi) = xs.split_at(xs.len() / 2);
    let (a, b) = join(|| par_pairwise_sum(lo), || par_pairwise_sum(hi));
    a + b
}

/// Maximum with a deterministic witness: among equal values the smallest
/// index wins, so ties never depend on evaluation order.
pub fn argmax_first(xs: &[f64]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &x) in xs.iter().enumerate() {
        match best {
            None => best = Some((i, x)),
            Some((_, b)) if x > b => best = Some((i, x)),
            _ => {}
        }
    }
    best
}

/// Merge per-block (index, value) maxima computed over disjoint index
/// ranges, preserving the first-index tie-break. Blocks must be passed
/// in increasing index order.
pub fn merge_argmax(blocks: impl IntoIterator<Item = Option<(usize, f64)>>) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for blk in blocks {
        let Some((i, x)) = blk else { continue };
        match best {
            None => best = Some((i, x)),
            Some((_, b)) if x > b => best = Some((i, x)),
            _ => {}
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serial_and_parallel_sums_are_bit_identical() {
        // Adversarial magnitudes so that association actually matters.
        let xs: Vec<f64> = (0..100_000)
            .map(|i| {
                let s = if i % 3 == 0 { -1.0 } else { 1.0 };
                s * (1.0 + (i as f64) * 1e-7) * 10f64.powi(i % 13 - 6)
            })
            .collect();
        let a = pairwise_sum(&xs);
        let b = par_pairwise_sum(&xs);
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn parallel_sum_is_stable_across_pool_sizes() {
        let xs: Vec<f64> = (0..50_000).map(|i| ((i * 37) % 1000) as f64 * 1.0e-3 - 0.25).collect();
        let reference = pairwise_sum(&xs);
        for threads in [1usize, 2, 5] {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            let got = pool.install(|| par_pairwise_sum(&xs));
            assert_eq!(reference.to_bits(), got.to_bits(), "threads = {threads}");
        }
    }

    #[test]
    fn pairwise_sum_tracks_exact_integer_sums() {
        let xs: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 500_500.0);
    }

    #[test]
    fn pairwise_sum_is_more_accurate_than_naive_on_ill_conditioned_input() {
        // 1 followed by many tiny terms; naive left fold loses them.
        let mut xs = vec![1.0f64];
        xs.extend(std::iter::repeat_n(1e-16, 1 << 20));
        let exact = 1.0 + 1e-16 * (1u64 << 20) as f64;
        let pair_err = (pairwise_sum(&xs) - exact).abs();
        let naive: f64 = xs.iter().fold(0.0, |a, b| a + b);
        let naive_err = (naive - exact).abs();
        assert!(pair_err <= naive_err);
        assert!(pair_err < 1e-12);
    }

    #[test]
    fn argmax_prefers_the_first_of_equal_values() {
        let xs = [1.0, 3.0, 3.0, 2.0];
        assert_eq!(argmax_first(&xs), Some((1, 3.0)));
        let merged = merge_argmax([Some((0, 3.0)), Some((2, 3.0))]);
        assert_eq!(merged, Some((0, 3.0)));
    }

    #[test]
    fn argmax_handles_empty_input() {
        assert_eq!(argmax_first(&[]), None);
        assert_eq!(merge_argmax([None, None]), None);
    }
}
