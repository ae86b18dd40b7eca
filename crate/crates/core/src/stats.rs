//! Small statistics toolbox: histograms, Kolmogorov–Smirnov distances, and
//! the normal CDF used as the equilibrium reference.

use serde::Serialize;

/// Fixed-range histogram with uniform bins.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    /// Samples that fell outside [lo, hi).
    pub out_of_range: u64,
}

impl Histogram {
    pub fn from_samples(samples: impl Iterator<Item = f64>, lo: f64, hi: f64, bins: usize) -> Self {
        assert!(hi > lo && bins >= 1);
        let mut counts = vec![0u64; bins];
        let mut out_of_range = 0;
        let width = (hi - lo) / bins as f64;
        for x in samples {
            if x >= lo && x < hi {
                let idx = (((x - lo) / width) as usize).min(bins - 1);
                counts[idx] += 1;
            } else {
                out_of_range += 1;
            }
        }
        Histogram {
            lo,
            hi,
            counts,
            out_of_range,
        }
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.counts.len() as f64
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.bin_width()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.out_of_range
    }
}

/// Standard normal CDF.
pub fn standard_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// N(mean, sd²) CDF.
pub fn normal_cdf(x: f64, mean: f64, sd: f64) -> f64 {
    standard_normal_cdf((x - mean) / sd)
}

/// One-sample Kolmogorov–Smirnov statistic sup|F_n − F| against an
/// arbitrary reference CDF. Sorts a copy of the samples.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    assert!(!samples.is_empty());
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("samples must not contain NaN"));
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        let above = (i as f64 + 1.0) / n - f;
        let below = f - i as f64 / n;
        d = d.max(above).max(below);
    }
    d
}

/// KS statistic of samples against N(mean, sd²).
pub fn ks_vs_normal(samples: &[f64], mean: f64, sd: f64) -> f64 {
    ks_statistic(samples, |x| normal_cdf(x, mean, sd))
}

/// KS statistic of samples against a tabulated density on a uniform grid
/// (piecewise-linear CDF from the trapezoid cumulative, renormalized).
pub fn ks_vs_tabulated_density(samples: &[f64], grid: &[f64], density: &[f64]) -> f64 {
    assert_eq!(grid.len(), density.len());
    assert!(grid.len() >= 2);
    let mut cum = Vec::with_capacity(grid.len());
    cum.push(0.0);
    for i in 1..grid.len() {
        let dp = grid[i] - grid[i - 1];
        cum.push(cum[i - 1] + 0.5 * (density[i] + density[i - 1]) * dp);
    }
    let total = *cum.last().unwrap();
    assert!(total > 0.0, "density integrates to zero");
    let cdf = |x: f64| -> f64 {
        if x <= grid[0] {
            return 0.0;
        }
        if x >= *grid.last().unwrap() {
            return 1.0;
        }
        let idx = match grid.binary_search_by(|g| g.partial_cmp(&x).unwrap()) {
            Ok(i) => return cum[i] / total,
            Err(i) => i,
        };
        let (x0, x1) = (grid[idx - 1], grid[idx]);
        let (c0, c1) = (cum[idx - 1], cum[idx]);
        (c0 + (c1 - c0) * (x - x0) / (x1 - x0)) / total
    };
    ks_statistic(samples, cdf)
}

/// Mean and (population) variance in one shifted pass.
///
/// Shifting by the first element keeps the squared accumulator small when
/// the data hover far from zero.
pub fn mean_variance(samples: &[f64]) -> (f64, f64) {
    assert!(!samples.is_empty());
    let shift = samples[0];
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for &x in samples {
        let d = x - shift;
        sum += d;
        sum_sq += d * d;
    }
    let n = samples.len() as f64;
    let mean = shift + sum / n;
    let var = (sum_sq - sum * sum / n) / n;
    (mean, var.max(0.0))
}

/// Summary of an ensemble-mean estimate: value and standard error.
#[derive(Copy, Clone, Debug, Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub standard_error: f64,
}

impl MeanEstimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let (mean, var) = mean_variance(samples);
        MeanEstimate {
            mean,
            standard_error: (var / samples.len() as f64).sqrt(),
        }
    }

    /// |mean − reference| in units of the standard error.
    pub fn z_score(&self, reference: f64) -> f64 {
        if self.standard_error == 0.0 {
            if self.mean == reference {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - reference).abs() / self.standard_error
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn normal_cdf_reference_values() {
        assert_relative_eq!(standard_normal_cdf(0.0), 0.5, max_relative = 1e-15);
        // Φ(1) frozen from the standard tables at double precision.
        assert_relative_eq!(
            standard_normal_cdf(1.0),
            0.841_344_746_068_542_9,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            standard_normal_cdf(-2.0),
            0.022_750_131_948_179_21,
            max_relative = 1e-12
        );
    }

    #[test]
    fn ks_of_exact_grid_is_small() {
        // Deterministic uniform quantile grid against U(0,1): D = 1/(2n).
        let n = 1000;
        let samples: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&samples, |x| x.clamp(0.0, 1.0));
        assert_relative_eq!(d, 0.5 / n as f64, max_relative = 1e-9);
    }

    #[test]
    fn ks_detects_wrong_scale() {
        let n = 2000;
        let samples: Vec<f64> = (0..n)
            .map(|i| {
                // Normal quantiles via inverse-CDF bisection on Φ.
                let u = (i as f64 + 0.5) / n as f64;
                let (mut lo, mut hi) = (-10.0, 10.0);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if standard_normal_cdf(mid) < u {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect();
        assert!(ks_vs_normal(&samples, 0.0, 1.0) < 1e-3);
        assert!(ks_vs_normal(&samples, 0.0, 1.3) > 0.05);
    }

    #[test]
    fn tabulated_density_ks_matches_analytic_normal() {
        let n_grid = 4001;
        let grid: Vec<f64> = (0..n_grid)
            .map(|i| -8.0 + 16.0 * i as f64 / (n_grid - 1) as f64)
            .collect();
        let density: Vec<f64> = grid
            .iter()
            .map(|&p| (-0.5 * p * p).exp() / (2.0 * std::f64::consts::PI).sqrt())
            .collect();
        let samples: Vec<f64> = (0..500).map(|i| -3.0 + 6.0 * i as f64 / 499.0).collect();
        let d_tab = ks_vs_tabulated_density(&samples, &grid, &density);
        let d_ana = ks_vs_normal(&samples, 0.0, 1.0);
        assert!((d_tab - d_ana).abs() < 1e-4);
    }

    #[test]
    fn histogram_counts_and_range() {
        let samples = [0.1, 0.2, 0.9, 1.5, -0.3];
        let h = Histogram::from_samples(samples.iter().cloned(), 0.0, 1.0, 2);
        assert_eq!(h.counts, vec![2, 1]);
        assert_eq!(h.out_of_range, 2);
        assert_eq!(h.total(), 5);
        assert_relative_eq!(h.bin_center(0), 0.25);
    }

    #[test]
    fn shifted_moments_survive_large_offsets() {
        let offset = 1e9;
        let samples: Vec<f64> = (0..100).map(|i| offset + (i % 7) as f64).collect();
        let (mean, var) = mean_variance(&samples);
        let plain_mean: f64 = samples.iter().sum::<f64>() / 100.0;
        assert_relative_eq!(mean, plain_mean, max_relative = 1e-12);
        assert!(var > 0.0 && var < 10.0);
    }
}
