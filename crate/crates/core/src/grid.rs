//! Log-spaced sample grids.

/// `n` points from `lo` to `hi` (both included), equally spaced in `ln k`.
///
/// Returns an empty vector when `n == 0` or the bounds are not positive and ordered.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 0 || !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Vec::new();
    }
    if n == 1 {
        return vec![lo];
    }
    let (l0, l1) = (lo.ln(), hi.ln());
    let step = (l1 - l0) / (n - 1) as f64;
    let mut out: Vec<f64> = (0..n).map(|i| (l0 + step * i as f64).exp()).collect();
    out[0] = lo;
    out[n - 1] = hi;
    out
}

/// Shrinks `[lo, hi]` towards its log-midpoint by `frac` of its log-width on each side.
pub fn shrink_log(lo: f64, hi: f64, frac: f64) -> (f64, f64) {
    let (l0, l1) = (lo.ln(), hi.ln());
    let w = (l1 - l0) * frac;
    ((l0 + w).exp(), (l1 - w).exp())
}
