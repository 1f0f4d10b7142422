//! Small order-statistics helpers shared across modules.
//!
//! Quantiles follow the sorted-index convention `x[ceil(q*n) - 1]` with the
//! lower median for even-length samples.

/// Empirical q-quantile of an already sorted, non-empty slice.
///
/// The rank is computed with a small downward guard so that exact integer
/// products like `0.9 * 10` do not round up past the intended index.
pub(crate) fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    debug_assert!(q > 0.0 && q < 1.0);
    let n = sorted.len();
    let rank = (q * n as f64 - 1e-9).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

/// Empirical q-quantile of an arbitrary slice (copies and sorts).
pub(crate) fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    quantile_sorted(&v, q)
}

/// Lower median (the `q = 0.5` quantile under the same convention).
pub(crate) fn lower_median_sorted(sorted: &[f64]) -> f64 {
    quantile_sorted(sorted, 0.5)
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    debug_assert!(!values.is_empty());
    values.iter().sum::<f64>() / values.len() as f64
}
