//! Convergence studies on nested grids with common random numbers.
//!
//! All grids are evaluated on the same paths simulated at the finest spacing,
//! so every coarse functional is pathwise bounded by the fine one and paired
//! differences carry no between-grid sampling noise.

use serde::{Deserialize, Serialize};

use crate::budget::plan_horizon;
use crate::closed_form::{piterbarg_bm_full, piterbarg_bm_half, rate_constant};
use crate::error::{check_alpha, Error, Result};
use crate::estimator::{simulate_z_max, Domain, EstimatorConfig};
use crate::stats::{fit_line, mean_summary, paired_difference, LineFit};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub delta: f64,
    pub p_hat: f64,
    pub stderr: f64,
    /// Exact constant minus `p_hat`.
    pub gap: f64,
    pub gap_stderr: f64,
    /// `gap / (sqrt(delta) * p_hat)`; tends to `-zeta(1/2)/sqrt(pi)`.
    pub empirical_rate: f64,
    /// `p_hat(finest) - p_hat(delta)` on common paths.
    pub paired_gap: f64,
    pub paired_gap_stderr: f64,
    /// Set when `gap < -3 stderr`.
    pub below_noise: bool,
}

impl RatePoint {
    pub const CSV_HEADER: &'static str = "delta,p_hat,stderr,gap,gap_stderr,empirical_rate";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.delta, self.p_hat, self.stderr, self.gap, self.gap_stderr, self.empirical_rate
        )
    }
}

pub fn rate_points_csv(points: &[RatePoint]) -> String {
    let mut out = String::from(RatePoint::CSV_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&p.csv_row());
        out.push('\n');
    }
    out
}

/// Strides of each spacing relative to the smallest one. Spacings must be
/// strictly decreasing and each a power-of-two multiple of the last.
pub fn nested_strides(deltas: &[f64]) -> Result<Vec<usize>> {
    if deltas.is_empty() {
        return Err(Error::NotNested("no spacings given".into()));
    }
    if deltas.iter().any(|&d| !(d > 0.0 && d.is_finite())) {
        return Err(Error::NotNested("spacings must be positive".into()));
    }
    if deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::NotNested("spacings must be strictly decreasing".into()));
    }
    let finest = *deltas.last().unwrap();
    deltas
        .iter()
        .map(|&d| {
            let ratio = d / finest;
            let stride = ratio.round();
            if (ratio - stride).abs() > 1e-9 * ratio || !(stride as usize).is_power_of_two() {
                Err(Error::NotNested(format!("{d} is not a power-of-two multiple of {finest}")))
            } else {
                Ok(stride as usize)
            }
        })
        .collect()
}

/// Per-path functionals on every nested grid, one column per spacing.
#[derive(Debug, Clone)]
pub struct PairedSample {
    pub config: EstimatorConfig,
    pub deltas: Vec<f64>,
    pub strides: Vec<usize>,
    /// `columns[i][r]` is replication `r` evaluated on grid `deltas[i]`.
    pub columns: Vec<Vec<f64>>,
}

/// Simulates `replications` paths at the finest spacing with horizon
/// `plan_horizon(finest, alpha)` unless `horizon` is given, and evaluates
/// every coarser grid on the same paths.
pub fn paired_sample(
    alpha: f64,
    d: f64,
    domain: Domain,
    deltas: &[f64],
    horizon: Option<f64>,
    replications: u64,
    seed: u64,
) -> Result<PairedSample> {
    check_alpha(alpha)?;
    if !(d > 0.0) {
        return Err(Error::Domain(format!("penalty d must be positive, got {d}")));
    }
    let strides = nested_strides(deltas)?;
    let finest = *deltas.last().unwrap();
    let horizon = match horizon {
        Some(t) => t,
        None => plan_horizon(finest, alpha)?,
    };
    let config = EstimatorConfig { alpha, d, domain, delta: finest, horizon, replications, seed };
    let rows = simulate_z_max(&config, &strides)?;
    let columns = (0..strides.len())
        .map(|i| rows.iter().map(|row| row[i].exp()).collect())
        .collect();
    Ok(PairedSample { config, deltas: deltas.to_vec(), strides, columns })
}

/// Rate study for Brownian motion (`alpha = 1`) against the exact constant.
pub fn run_rate_study_bm(
    d: f64,
    domain: Domain,
    deltas: &[f64],
    replications: u64,
    seed: u64,
) -> Result<Vec<RatePoint>> {
    let exact = match domain {
        Domain::HalfLine => piterbarg_bm_half(d)?,
        Domain::FullLine => piterbarg_bm_full(d)?,
    };
    let sample = paired_sample(1.0, d, domain, deltas, None, replications, seed)?;
    Ok(rate_points(&sample, exact))
}

fn rate_points(sample: &PairedSample, exact: f64) -> Vec<RatePoint> {
    let finest = sample.columns.last().unwrap();
    sample
        .deltas
        .iter()
        .zip(&sample.columns)
        .map(|(&delta, column)| {
            let s = mean_summary(column);
            let paired = paired_difference(finest, column);
            let gap = exact - s.mean;
            RatePoint {
                delta,
                p_hat: s.mean,
                stderr: s.stderr,
                gap,
                gap_stderr: s.stderr,
                empirical_rate: gap / (delta.sqrt() * s.mean),
                paired_gap: paired.mean,
                paired_gap_stderr: paired.stderr,
                below_noise: gap < -3.0 * s.stderr,
            }
        })
        .collect()
}

/// Small-spacing limit of [`RatePoint::empirical_rate`].
pub fn bm_rate_limit() -> f64 {
    rate_constant().value
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapPoint {
    pub delta: f64,
    /// `p_hat(finest) - p_hat(delta)` on common paths; exactly 0 at the finest.
    pub gap: f64,
    pub gap_stderr: f64,
}

/// Paired difference between two consecutive grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapIncrement {
    pub coarse_delta: f64,
    pub fine_delta: f64,
    /// `p_hat(fine_delta) - p_hat(coarse_delta)`.
    pub gap: f64,
    pub gap_stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapDecayReport {
    pub alpha: f64,
    pub points: Vec<GapPoint>,
    pub increments: Vec<GapIncrement>,
    /// `increments[i + 1].gap / increments[i].gap`; about `2^{-alpha/2}` for
    /// halvings when the gap decays like `delta^{alpha/2}`.
    pub successive_ratios: Vec<f64>,
    /// Slope of `ln(increment)` against `ln(coarse_delta)`, when at least two
    /// increments are positive.
    pub fitted_exponent: Option<f64>,
    pub exponent_stderr: Option<f64>,
}

/// Paired discretization gaps for general `alpha`, with a log-log fit of the
/// consecutive-grid increments.
pub fn run_gap_decay(
    alpha: f64,
    d: f64,
    domain: Domain,
    deltas: &[f64],
    replications: u64,
    seed: u64,
) -> Result<GapDecayReport> {
    let sample = paired_sample(alpha, d, domain, deltas, None, replications, seed)?;
    Ok(gap_decay(&sample))
}

pub fn gap_decay(sample: &PairedSample) -> GapDecayReport {
    let finest = sample.columns.last().unwrap();
    let points = sample
        .deltas
        .iter()
        .zip(&sample.columns)
        .map(|(&delta, column)| {
            let s = paired_difference(finest, column);
            GapPoint { delta, gap: s.mean, gap_stderr: s.stderr }
        })
        .collect();

    let increments: Vec<GapIncrement> = (0..sample.deltas.len().saturating_sub(1))
        .map(|i| {
            let s = paired_difference(&sample.columns[i + 1], &sample.columns[i]);
            GapIncrement {
                coarse_delta: sample.deltas[i],
                fine_delta: sample.deltas[i + 1],
                gap: s.mean,
                gap_stderr: s.stderr,
            }
        })
        .collect();

    let successive_ratios = increments.windows(2).map(|w| w[1].gap / w[0].gap).collect();

    let (x, y): (Vec<f64>, Vec<f64>) = increments
        .iter()
        .filter(|g| g.gap > 0.0)
        .map(|g| (g.coarse_delta.ln(), g.gap.ln()))
        .unzip();
    let fit: Option<LineFit> = fit_line(&x, &y);

    GapDecayReport {
        alpha: sample.config.alpha,
        points,
        increments,
        successive_ratios,
        fitted_exponent: fit.map(|f| f.slope),
        exponent_stderr: fit.and_then(|f| f.slope_stderr),
    }
}
