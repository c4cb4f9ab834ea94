use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use super::RiskEstimator;
use crate::error::{Result, RiskError};
use crate::sample::validate_values;

/// Gaussian parametric plug-in ES: `-(mean - sd * phi(Phi^{-1}(alpha)) / alpha)`
/// with the `n - 1` sample standard deviation. Not monotone, hence not a CRE.
pub fn gaussian_plugin_es(alpha: f64, x: &[f64]) -> Result<f64> {
    GaussianPluginEs::new(alpha)?.estimate(x)
}

#[derive(Debug, Clone, Copy)]
pub struct GaussianPluginEs {
    alpha: f64,
    tail_factor: f64,
}

impl GaussianPluginEs {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(RiskError::InvalidParameter(format!("alpha must lie in (0,1), got {alpha}")));
        }
        let z = Normal::standard();
        let tail_factor = z.pdf(z.inverse_cdf(alpha)) / alpha;
        Ok(Self { alpha, tail_factor })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl RiskEstimator for GaussianPluginEs {
    fn estimate(&self, x: &[f64]) -> Result<f64> {
        validate_values(x)?;
        let n = x.len();
        if n < 2 {
            return Err(RiskError::InvalidParameter(
                "the Gaussian plug-in needs at least two observations".into(),
            ));
        }
        let mean = x.iter().sum::<f64>() / n as f64;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        Ok(-(mean - var.sqrt() * self.tail_factor))
    }

    fn label(&self) -> String {
        format!("gaussian_plugin_es({})", self.alpha)
    }
}
