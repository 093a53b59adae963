//! Small numerical kernels shared by the physics and analysis modules.

pub mod quadrature;

/// Sum with a fixed pairwise-reduction tree.
///
/// The split points depend only on the slice length, so the result is
/// bit-identical no matter how the values were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Linear interpolation of `(xs, ys)` at `x`; zero outside the sampled range.
pub fn interp_linear(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n == 0 || x < xs[0] || x > xs[n - 1] {
        return 0.0;
    }
    let hi = xs.partition_point(|&v| v < x).min(n - 1);
    if hi == 0 {
        return ys[0];
    }
    let lo = hi - 1;
    let t = (x - xs[lo]) / (xs[hi] - xs[lo]);
    ys[lo] + t * (ys[hi] - ys[lo])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_integers() {
        let v: Vec<f64> = (0..10_001).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 10_000.0 * 10_001.0 / 2.0);
    }

    #[test]
    fn interp_endpoints_and_midpoint() {
        let xs = [0.0, 1.0, 2.0];
        let ys = [1.0, 3.0, 2.0];
        assert_eq!(interp_linear(&xs, &ys, 0.0), 1.0);
        assert_eq!(interp_linear(&xs, &ys, 2.0), 2.0);
        assert_eq!(interp_linear(&xs, &ys, 0.5), 2.0);
        assert_eq!(interp_linear(&xs, &ys, 2.5), 0.0);
    }
}
