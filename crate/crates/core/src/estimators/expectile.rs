//! Empirical expectile and the ExpVaR plug-in estimator.
//!
//! The expectile equation `alpha * sum (x_i - c)_+ = (1 - alpha) * sum (x_i - c)_-`
//! has a continuous, strictly decreasing, piecewise-linear left-hand side
//! minus right-hand side, so the root is located by walking the order
//! statistics and solving the linear piece exactly.

use super::RiskEstimator;
use crate::error::{Result, RiskError};
use crate::sample::{sort_values, validate_values};
use crate::weights::WeightVector;

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectileSolution {
    pub expectile: f64,
    /// `-expectile`.
    pub exp_var: f64,
    /// Number of order statistics at or below the expectile.
    pub n_star: usize,
    /// Sample-dependent weights `a*(x)` with `exp_var = <a*(x), -s(x)>`.
    pub realized_weights: WeightVector,
}

impl ExpectileSolution {
    /// Normalised residual `(1/n) [alpha sum (x-e)_+ - (1-alpha) sum (x-e)_-]`.
    pub fn residual(&self, alpha: f64, x: &[f64]) -> f64 {
        expectile_residual(alpha, x, self.expectile)
    }
}

pub(crate) fn expectile_residual(alpha: f64, x: &[f64], c: f64) -> f64 {
    let mut pos = 0.0;
    let mut neg = 0.0;
    for &v in x {
        if v > c {
            pos += v - c;
        } else {
            neg += c - v;
        }
    }
    (alpha * pos - (1.0 - alpha) * neg) / x.len() as f64
}

pub fn expectile_estimate(alpha: f64, x: &[f64]) -> Result<ExpectileSolution> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(RiskError::InvalidParameter(format!(
            "expectile level must lie in (0, 1/2), got {alpha}"
        )));
    }
    validate_values(x)?;
    let n = x.len();
    let mut s = x.to_vec();
    sort_values(&mut s);

    let total: f64 = s.iter().sum();
    let nf = n as f64;
    // k = number of points on the "loss" side of the candidate root.
    let solve = |k: usize, lo_sum: f64| {
        let hi_sum = total - lo_sum;
        let kf = k as f64;
        (alpha * hi_sum + (1.0 - alpha) * lo_sum) / ((1.0 - 2.0 * alpha) * kf + nf * alpha)
    };

    let mut lo_sum = 0.0;
    let mut root = None;
    let mut fallback = (f64::INFINITY, s[0]);
    for k in 1..=n {
        lo_sum += s[k - 1];
        let c = solve(k, lo_sum);
        let lower = s[k - 1];
        let upper = if k < n { s[k] } else { f64::INFINITY };
        if c >= lower && c <= upper {
            root = Some(c);
            break;
        }
        let miss = (lower - c).max(c - upper).max(0.0);
        if miss < fallback.0 {
            fallback = (miss, c.clamp(lower, upper.min(f64::MAX)));
        }
    }
    // Rounding can push every linear piece's root just outside its segment.
    let expectile = root.unwrap_or(fallback.1);

    let n_star = s.partition_point(|&v| v <= expectile);
    let denom = (1.0 - 2.0 * alpha) * n_star as f64 + nf * alpha;
    let w_lo = (1.0 - alpha) / denom;
    let w_hi = alpha / denom;
    let mut weights: Vec<f64> = (0..n).map(|i| if i < n_star { w_lo } else { w_hi }).collect();
    // Absorb the rounding of `n_star * w_lo + (n - n_star) * w_hi` so the
    // weights sit inside the simplex tolerance.
    let sum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= sum;
    }
    let realized_weights = WeightVector::new(weights)?;

    Ok(ExpectileSolution { expectile, exp_var: -expectile, n_star, realized_weights })
}

/// ExpVaR plug-in estimator `x -> -e_alpha(x)` as a black box.
#[derive(Debug, Clone, Copy)]
pub struct ExpVarEstimator {
    pub alpha: f64,
}

impl ExpVarEstimator {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 0.5) {
            return Err(RiskError::InvalidParameter(format!(
                "expectile level must lie in (0, 1/2), got {alpha}"
            )));
        }
        Ok(Self { alpha })
    }
}

impl RiskEstimator for ExpVarEstimator {
    fn estimate(&self, x: &[f64]) -> Result<f64> {
        Ok(expectile_estimate(self.alpha, x)?.exp_var)
    }

    fn label(&self) -> String {
        format!("expvar({})", self.alpha)
    }
}
