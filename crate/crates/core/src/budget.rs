//! Error budget for approximating the continuous constant by a truncated
//! discrete estimate: discretization bound, truncation bound, horizon rule.
//!
//! Both bounds hold only up to multiplicative constants that are not known
//! in closed form. They are exposed as `c_disc` and `c_trunc` (default 1) and
//! the report is flagged `up_to_constant` unless both are supplied.

use serde::{Deserialize, Serialize};

use crate::error::{check_alpha, Error, Result};
use crate::estimator::{EstimateResult, EstimatorConfig};

fn check_small_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("delta must lie in (0, 1), got {delta}")))
    }
}

fn check_constant(name: &str, c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive, got {c}")))
    }
}

/// Horizon `S_delta = (-ln delta)^{2/alpha}`.
pub fn plan_horizon(delta: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_small_delta(delta)?;
    Ok((-delta.ln()).powf(2.0 / alpha))
}

/// `c * delta^{alpha/2} * (-ln delta)^{1/2}`.
pub fn discretization_bound(delta: f64, alpha: f64, c_disc: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_small_delta(delta)?;
    check_constant("c_disc", c_disc)?;
    Ok(c_disc * delta.powf(alpha / 2.0) * (-delta.ln()).sqrt())
}

/// `exp(-c * T^alpha)`.
pub fn truncation_bound(horizon: f64, alpha: f64, c_trunc: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::Domain(format!("horizon must be positive, got {horizon}")));
    }
    check_constant("c_trunc", c_trunc)?;
    Ok((-c_trunc * horizon.powf(alpha)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetConstants {
    pub c_disc: f64,
    pub c_trunc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetReport {
    pub delta: f64,
    pub horizon: f64,
    pub disc_bound: f64,
    pub trunc_bound: f64,
    /// Standard error, or interval half-width for median-of-means. Absent
    /// when no simulation was run.
    pub stat_error: Option<f64>,
    pub constants: BudgetConstants,
    pub total: f64,
    /// Set when either constant is the default rather than calibrated.
    pub up_to_constant: bool,
    /// The truncation bound is asymptotic in `T`; flagged for `T < 1`.
    pub short_horizon: bool,
}

/// Budget without a simulation; `horizon` defaults to [`plan_horizon`].
pub fn plan_budget(
    delta: f64,
    alpha: f64,
    horizon: Option<f64>,
    c_disc: Option<f64>,
    c_trunc: Option<f64>,
) -> Result<BudgetReport> {
    let horizon = match horizon {
        Some(t) => t,
        None => plan_horizon(delta, alpha)?,
    };
    let constants = BudgetConstants {
        c_disc: c_disc.unwrap_or(1.0),
        c_trunc: c_trunc.unwrap_or(1.0),
    };
    let disc_bound = discretization_bound(delta, alpha, constants.c_disc)?;
    let trunc_bound = truncation_bound(horizon, alpha, constants.c_trunc)?;
    Ok(BudgetReport {
        delta,
        horizon,
        disc_bound,
        trunc_bound,
        stat_error: None,
        constants,
        total: disc_bound + trunc_bound,
        up_to_constant: c_disc.is_none() || c_trunc.is_none(),
        short_horizon: horizon < 1.0,
    })
}

/// Combines both bounds with the statistical error of `result`.
pub fn total_budget(
    config: &EstimatorConfig,
    result: &EstimateResult,
    c_disc: Option<f64>,
    c_trunc: Option<f64>,
) -> Result<BudgetReport> {
    if result.config != *config {
        return Err(Error::ConfigMismatch);
    }
    let mut report = plan_budget(config.delta, config.alpha, Some(config.horizon), c_disc, c_trunc)?;
    report.stat_error = result.stat_error();
    report.total += report.stat_error.unwrap_or(0.0);
    Ok(report)
}
