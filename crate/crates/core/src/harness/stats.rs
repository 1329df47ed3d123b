//! Summary statistics for per-trial samples.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Percentile bootstrap confidence interval for the mean.
///
/// `level` is the coverage (e.g. 0.95). Resampling is seeded, so the
/// interval is reproducible.
pub fn bootstrap_mean_ci(xs: &[f64], level: f64, resamples: usize, seed: u64) -> (f64, f64) {
    assert!(!xs.is_empty(), "bootstrap of an empty sample");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = xs.len();
    let mut means: Vec<f64> = (0..resamples.max(1))
        .map(|_| (0..n).map(|_| xs[rng.gen_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    let pick = |q: f64| {
        let idx = (q * (means.len() - 1) as f64).round() as usize;
        means[idx.min(means.len() - 1)]
    };
    (pick(tail), pick(1.0 - tail))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_sample_has_degenerate_interval() {
        let (lo, hi) = bootstrap_mean_ci(&[0.3; 50], 0.95, 500, 1);
        assert_eq!(lo, hi);
        assert!((lo - 0.3).abs() < 1e-12);
    }

    #[test]
    fn interval_brackets_the_mean() {
        let xs: Vec<f64> = (0..200).map(|i| (i % 17) as f64).collect();
        let (lo, hi) = bootstrap_mean_ci(&xs, 0.95, 2000, 9);
        let m = mean(&xs);
        assert!(lo < m && m < hi);
        // normal approximation: half-width ≈ 1.96·sd/√n ≈ 0.68
        assert!((hi - lo) > 0.9 && (hi - lo) < 1.9, "{lo} {hi}");
    }
}
