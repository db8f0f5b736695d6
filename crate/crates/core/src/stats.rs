//! Aggregation of replication outputs.

use serde::{Deserialize, Serialize};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Number of blocks used by [`median_of_means`] in the estimator.
pub const MOM_BLOCKS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSummary {
    pub mean: f64,
    /// Standard error of the mean; zero for a single observation.
    pub stderr: f64,
    pub count: usize,
}

/// Sample mean with CLT standard error. Sums in slice order.
pub fn mean_summary(values: &[f64]) -> MeanSummary {
    let count = values.len();
    assert!(count > 0, "mean of an empty sample");
    let n = count as f64;
    let mean = values.iter().sum::<f64>() / n;
    let stderr = if count > 1 {
        let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
        (ss / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    MeanSummary { mean, stderr, count }
}

/// Mean and standard error of the paired differences `a[i] - b[i]`.
pub fn paired_difference(a: &[f64], b: &[f64]) -> MeanSummary {
    assert_eq!(a.len(), b.len());
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    mean_summary(&diffs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedianOfMeans {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub blocks: usize,
    /// Achieved coverage of the order-statistic interval.
    pub coverage: f64,
}

/// Median of `blocks` contiguous block means.
///
/// The interval is `[X_(j), X_(K+1-j)]` over the sorted block means, with the
/// largest `j` whose distribution-free coverage for the median of the block
/// mean distribution is at least 95%. Trailing observations that do not fill
/// a block are dropped.
pub fn median_of_means(values: &[f64], blocks: usize) -> MedianOfMeans {
    let blocks = blocks.min(values.len()).max(1);
    let size = values.len() / blocks;
    let mut means: Vec<f64> = values
        .chunks_exact(size)
        .take(blocks)
        .map(|c| c.iter().sum::<f64>() / size as f64)
        .collect();
    means.sort_by(f64::total_cmp);

    let k = means.len();
    let estimate = if k % 2 == 1 {
        means[k / 2]
    } else {
        0.5 * (means[k / 2 - 1] + means[k / 2])
    };

    // P(Bin(k, 1/2) <= j - 1) for j = 1, 2, ...
    let mut lower_tail = 0.0;
    let mut pick = 1;
    let mut coverage = 1.0 - 2.0 * 0.5f64.powi(k as i32);
    for j in 1..=k / 2 {
        lower_tail += binomial_half(k, j - 1);
        let cov = 1.0 - 2.0 * lower_tail;
        if cov >= 0.95 {
            pick = j;
            coverage = cov;
        } else {
            break;
        }
    }
    MedianOfMeans {
        estimate,
        ci_low: means[pick - 1],
        ci_high: means[k - pick],
        blocks: k,
        coverage,
    }
}

fn binomial_half(n: usize, i: usize) -> f64 {
    let mut c = 1.0;
    for t in 0..i {
        c = c * (n - t) as f64 / (t + 1) as f64;
    }
    c * 0.5f64.powi(n as i32)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Absent for fewer than three points.
    pub slope_stderr: Option<f64>,
}

/// Ordinary least squares fit of `y` on `x`.
pub fn fit_line(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_stderr = (n > 2).then(|| {
        let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
        (rss / (nf - 2.0) / sxx).sqrt()
    });
    Some(LineFit { slope, intercept, slope_stderr })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_stderr() {
        let s = mean_summary(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        // sample variance 5/3, stderr sqrt(5/12)
        assert!((s.stderr - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_summary(&[7.0]).stderr, 0.0);
    }

    #[test]
    fn paired_difference_cancels_shared_noise() {
        let a = [3.0, 5.0, 9.0];
        let b = [2.0, 4.0, 8.0];
        let s = paired_difference(&a, &b);
        assert_eq!(s.mean, 1.0);
        assert_eq!(s.stderr, 0.0);
    }

    #[test]
    fn mom_order_statistics_for_24_blocks() {
        // P(Bin(24, 1/2) <= 6) = 190051 / 2^24, so j = 7.
        let values: Vec<f64> = (0..24).map(|i| i as f64).collect();
        let m = median_of_means(&values, 24);
        assert_eq!(m.blocks, 24);
        assert_eq!(m.estimate, 11.5);
        assert_eq!(m.ci_low, 6.0);
        assert_eq!(m.ci_high, 17.0);
        assert!((m.coverage - (1.0 - 2.0 * 190_051.0 / 16_777_216.0)).abs() < 1e-12);
    }

    #[test]
    fn mom_blocks_are_contiguous() {
        let mut values = vec![1.0; 30];
        values.extend(vec![100.0; 10]);
        let m = median_of_means(&values, 4);
        assert_eq!(m.estimate, 1.0);
        assert_eq!(m.ci_high, 100.0);
    }

    #[test]
    fn mom_resists_single_outlier() {
        let mut values = vec![2.0; 2400];
        values[17] = 1e12;
        let m = median_of_means(&values, 24);
        assert_eq!(m.estimate, 2.0);
        assert!(m.ci_low <= m.estimate && m.estimate <= m.ci_high);
    }

    #[test]
    fn mom_with_fewer_values_than_blocks() {
        let m = median_of_means(&[5.0, 1.0, 3.0], 24);
        assert_eq!(m.blocks, 3);
        assert_eq!(m.estimate, 3.0);
        assert!(m.ci_low <= 3.0 && m.ci_high >= 3.0);
    }

    #[test]
    fn line_fit_recovers_exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 0.5 * v - 1.0).collect();
        let f = fit_line(&x, &y).unwrap();
        assert!((f.slope - 0.5).abs() < 1e-12);
        assert!((f.intercept + 1.0).abs() < 1e-12);
        assert!(f.slope_stderr.unwrap() < 1e-12);
        assert!(fit_line(&[1.0], &[1.0]).is_none());
        assert!(fit_line(&[1.0, 2.0], &[1.0, 3.0]).unwrap().slope_stderr.is_none());
    }
}
