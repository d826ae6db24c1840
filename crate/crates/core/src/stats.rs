//! Small Monte Carlo summaries shared by the experiment drivers.
//!
//! Inputs are always reduced serially in slice order so results do not
//! depend on how the samples were produced.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeanSe {
    pub mean: f64,
    /// Standard error of the mean (sample standard deviation / √n).
    pub se: f64,
    pub n: usize,
}

pub fn mean_se(values: &[f64]) -> MeanSe {
    let n = values.len();
    if n == 0 {
        return MeanSe { mean: f64::NAN, se: f64::NAN, n };
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return MeanSe { mean, se: 0.0, n };
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    MeanSe { mean, se: (ss / (n - 1) as f64 / n as f64).sqrt(), n }
}

impl MeanSe {
    /// `(mean − target) / se`; zero when both the error and the spread
    /// vanish, infinite when only the spread does.
    pub fn z_score(&self, target: f64, abs_tol: f64) -> f64 {
        let diff = self.mean - target;
        if self.se <= 1e-12 {
            if diff.abs() <= abs_tol {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / self.se
        }
    }
}

/// `½ Σ |p_i − q_i|` over the common index range; missing entries count as 0.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let len = p.len().max(q.len());
    let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    0.5 * (0..len).map(|i| (at(p, i) - at(q, i)).abs()).sum::<f64>()
}

/// Converts counts to frequencies.
pub fn frequencies(counts: &[u64]) -> Vec<f64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return vec![0.0; counts.len()];
    }
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}

/// Wilson score interval for a binomial proportion at normal quantile `z`.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Normal quantile for a two-sided 95% interval.
pub const Z95: f64 = 1.959_963_984_540_054;
