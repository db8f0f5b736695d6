//! Monte Carlo estimation of Piterbarg constants
//! `P_alpha(d, K) = E sup_{t in K} exp(sqrt(2) B_alpha(t) - (1 + d)|t|^alpha)`
//! for fractional Brownian motion `B_alpha`, through their discrete truncated
//! counterparts on `delta Z intersect [-T, T]`.
//!
//! - [`fbm`]: exact fGn / fBM sampling by circulant embedding.
//! - [`estimator`]: per-path supremum functional and replication aggregation.
//! - [`budget`]: discretization and truncation bounds, horizon rule.
//! - [`closed_form`]: Brownian-motion constants and the rate constant.
//! - [`rate_study`]: nested-grid convergence studies with common random numbers.

pub mod budget;
pub mod closed_form;
pub mod error;
pub mod estimator;
pub mod fbm;
pub mod rate_study;
pub mod rng;
pub mod stats;

pub use budget::{discretization_bound, plan_budget, plan_horizon, total_budget, truncation_bound, BudgetReport};
pub use closed_form::{piterbarg_bm_full, piterbarg_bm_half, rate_constant, RateConstant};
pub use error::{Error, Result};
pub use estimator::{
    estimate_constant, subsampled_functionals, sup_functional, Domain, EstimateResult, EstimatorConfig, Method,
    SupRecord,
};
pub use fbm::{
    cholesky_sample, circulant_spectrum, fgn_autocovariance, rescale_path, sample_fgn, sample_two_sided_path,
    CirculantSpectrum, FgnSpec, PathGrid,
};
pub use rate_study::{run_gap_decay, run_rate_study_bm, GapDecayReport, RatePoint};
