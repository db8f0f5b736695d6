//! Exact Brownian-motion Piterbarg constants and the `-zeta(1/2)/sqrt(pi)`
//! discretization rate constant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_penalty(d: f64) -> Result<()> {
    if d > 0.0 && d.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("penalty d must be positive, got {d}")))
    }
}

/// `P_1(d, (-inf, inf)) = 1 + 2/d - 1/(2d + 1)`.
pub fn piterbarg_bm_full(d: f64) -> Result<f64> {
    check_penalty(d)?;
    Ok(1.0 + 2.0 / d - 1.0 / (2.0 * d + 1.0))
}

/// `P_1(d, [0, inf)) = 1 + 1/d`.
pub fn piterbarg_bm_half(d: f64) -> Result<f64> {
    check_penalty(d)?;
    Ok(1.0 + 1.0 / d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateConstant {
    pub zeta_half: f64,
    pub value: f64,
}

/// Dirichlet eta at `s = 1/2` by Euler-van Wijngaarden repeated averaging of
/// the alternating partial sums.
pub fn eta_half() -> f64 {
    const TERMS: usize = 96;
    const START: usize = 32;
    let mut partial = Vec::with_capacity(TERMS);
    let mut sum = 0.0;
    for k in 1..=TERMS {
        let term = (k as f64).sqrt().recip();
        sum += if k % 2 == 1 { term } else { -term };
        partial.push(sum);
    }
    // Each averaging pass cancels one more order of the oscillating error.
    let mut row = partial[START..].to_vec();
    while row.len() > 1 {
        row = row.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    row[0]
}

/// `zeta(1/2) = eta(1/2) / (1 - 2^{1/2})`.
pub fn zeta_half() -> f64 {
    eta_half() / (1.0 - std::f64::consts::SQRT_2)
}

pub fn rate_constant() -> RateConstant {
    let zeta_half = zeta_half();
    RateConstant {
        zeta_half,
        value: -zeta_half / std::f64::consts::PI.sqrt(),
    }
}
