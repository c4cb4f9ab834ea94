//! Concrete risk estimators: empirical and interpolated VaR, the six
//! L-statistic ES estimators, spectral plug-ins, the Gaussian parametric
//! plug-in and the empirical expectile (ExpVaR).
//!
//! Every order-statistic estimator is an [`LEstimatorSpec`]; the remaining
//! ones implement [`RiskEstimator`] directly so they can be fed to the
//! coherence checks as black boxes.

mod expectile;
mod gaussian;
mod spectral;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use expectile::{expectile_estimate, ExpVarEstimator, ExpectileSolution};
pub use gaussian::{gaussian_plugin_es, GaussianPluginEs};
pub use spectral::{
    build_spectral_weights, build_spectral_weights_alt, validate_spectrum, EsSpectrum,
    FnSpectrum, LinearSpectrum, Spectrum, UniformSpectrum,
};

use crate::error::{Result, RiskError};
use crate::sample::sort_values;
use crate::supremum::{supremum_sorted, SupremumCre};
use crate::weights::{
    check_len, l_estimate_sorted, GeneralWeightScheme, OrderWeights, WeightVector,
};

/// Default Pareto shape used by estimators #4 and #6.
pub const DEFAULT_XI: f64 = 1.0 / 3.0;

/// A map from P&L samples to a capital number.
///
/// Implementors must be callable concurrently.
pub trait RiskEstimator: Send + Sync {
    fn estimate(&self, x: &[f64]) -> Result<f64>;

    /// Evaluates with a pre-sorted copy of `x` at hand. Law-invariant
    /// estimators override this to skip sorting.
    fn estimate_presorted(&self, x: &[f64], _sorted: &[f64]) -> Result<f64> {
        self.estimate(x)
    }

    fn label(&self) -> String;
}

/// Wraps a closure as a [`RiskEstimator`].
pub struct FnEstimator<F> {
    label: String,
    f: F,
}

impl<F> FnEstimator<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    pub fn new(label: impl Into<String>, f: F) -> Self {
        Self { label: label.into(), f }
    }
}

impl<F> RiskEstimator for FnEstimator<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn estimate(&self, x: &[f64]) -> Result<f64> {
        Ok((self.f)(x))
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// Which population risk measure an estimator targets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RiskTarget {
    ValueAtRisk(f64),
    ExpectedShortfall(f64),
}

impl RiskTarget {
    pub fn alpha(&self) -> f64 {
        match *self {
            RiskTarget::ValueAtRisk(a) | RiskTarget::ExpectedShortfall(a) => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EstimatorId {
    VarEmp,
    #[serde(rename = "VAR_INTERP_1PCT")]
    VarInterp1pct,
    Es1,
    Es2,
    Es3,
    Es4,
    Es5,
    Es6,
    Spectral,
    SpectralAlt,
    Custom,
}

impl EstimatorId {
    pub const ES_ALL: [EstimatorId; 6] = [
        EstimatorId::Es1,
        EstimatorId::Es2,
        EstimatorId::Es3,
        EstimatorId::Es4,
        EstimatorId::Es5,
        EstimatorId::Es6,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorId::VarEmp => "var",
            EstimatorId::VarInterp1pct => "var_interp_1pct",
            EstimatorId::Es1 => "es1",
            EstimatorId::Es2 => "es2",
            EstimatorId::Es3 => "es3",
            EstimatorId::Es4 => "es4",
            EstimatorId::Es5 => "es5",
            EstimatorId::Es6 => "es6",
            EstimatorId::Spectral => "spectral",
            EstimatorId::SpectralAlt => "spectral_alt",
            EstimatorId::Custom => "custom",
        }
    }
}

impl fmt::Display for EstimatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimatorId {
    type Err = RiskError;

    fn from_str(s: &str) -> Result<Self> {
        let id = match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "var" | "var_emp" => EstimatorId::VarEmp,
            "var_interp_1pct" | "var1" | "var_1pct" => EstimatorId::VarInterp1pct,
            "es1" => EstimatorId::Es1,
            "es2" => EstimatorId::Es2,
            "es3" => EstimatorId::Es3,
            "es4" => EstimatorId::Es4,
            "es5" => EstimatorId::Es5,
            "es6" => EstimatorId::Es6,
            "spectral" => EstimatorId::Spectral,
            "spectral_alt" => EstimatorId::SpectralAlt,
            "custom" => EstimatorId::Custom,
            other => return Err(RiskError::Parse(format!("unknown estimator '{other}'"))),
        };
        Ok(id)
    }
}

/// A named weight scheme on order statistics, evaluated as `-sum w_i x_{i:n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LEstimatorSpec {
    pub id: EstimatorId,
    pub alpha: f64,
    pub n: usize,
    pub weights: GeneralWeightScheme,
    pub is_cre: bool,
}

impl LEstimatorSpec {
    fn from_weights(id: EstimatorId, alpha: f64, weights: Vec<f64>) -> Result<Self> {
        let n = weights.len();
        let weights = GeneralWeightScheme::new(id.as_str(), weights)?;
        let is_cre = weights.is_cre();
        Ok(Self { id, alpha, n, weights, is_cre })
    }

    pub fn custom(name: impl Into<String>, alpha: f64, weights: Vec<f64>) -> Result<Self> {
        let n = weights.len();
        let weights = GeneralWeightScheme::new(name, weights)?;
        let is_cre = weights.is_cre();
        Ok(Self { id: EstimatorId::Custom, alpha, n, weights, is_cre })
    }

    /// Builds any named estimator at `(alpha, n)` with default parameters.
    /// The interpolated VaR ignores `alpha` (its level is fixed at 1%).
    pub fn build(id: EstimatorId, alpha: f64, n: usize) -> Result<Self> {
        match id {
            EstimatorId::VarEmp => build_var_weights(alpha, n),
            EstimatorId::VarInterp1pct => build_var_interp_1pct(n),
            EstimatorId::Es1 => build_es1(alpha, n),
            EstimatorId::Es2 => build_es2(alpha, n),
            EstimatorId::Es3 => build_es3(alpha, n),
            EstimatorId::Es4 => build_es4(alpha, n, DEFAULT_XI),
            EstimatorId::Es5 => build_es5(alpha, n),
            EstimatorId::Es6 => build_es6(alpha, n, DEFAULT_XI),
            EstimatorId::Spectral => {
                let w = build_spectral_weights(&EsSpectrum::new(alpha)?, n)?;
                Self::from_weights(EstimatorId::Spectral, alpha, w.into_inner())
            }
            EstimatorId::SpectralAlt => {
                let w = build_spectral_weights_alt(&EsSpectrum::new(alpha)?, n)?;
                Self::from_weights(EstimatorId::SpectralAlt, alpha, w.into_inner())
            }
            EstimatorId::Custom => Err(RiskError::InvalidParameter(
                "custom estimators need explicit weights".into(),
            )),
        }
    }

    pub fn weights(&self) -> &[f64] {
        self.weights.weights()
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.weight_sum()
    }

    pub fn to_weight_vector(&self) -> Result<WeightVector> {
        self.weights.to_weight_vector()
    }

    pub fn target(&self) -> RiskTarget {
        match self.id {
            EstimatorId::VarEmp | EstimatorId::VarInterp1pct => RiskTarget::ValueAtRisk(self.alpha),
            _ => RiskTarget::ExpectedShortfall(self.alpha),
        }
    }

    /// Display label, e.g. `#3` or `VaR1%`.
    pub fn label(&self) -> String {
        match self.id {
            EstimatorId::VarEmp => format!("VaR{}%", fmt_pct(self.alpha)),
            EstimatorId::VarInterp1pct => "VaR1%".to_string(),
            EstimatorId::Es1 => "#1".into(),
            EstimatorId::Es2 => "#2".into(),
            EstimatorId::Es3 => "#3".into(),
            EstimatorId::Es4 => "#4".into(),
            EstimatorId::Es5 => "#5".into(),
            EstimatorId::Es6 => "#6".into(),
            EstimatorId::Spectral => "spectral".into(),
            EstimatorId::SpectralAlt => "spectral_alt".into(),
            EstimatorId::Custom => self.weights.name.clone(),
        }
    }

    pub fn evaluate_sorted(&self, sorted: &[f64]) -> f64 {
        l_estimate_sorted(self.weights.weights(), sorted)
    }
}

fn fmt_pct(alpha: f64) -> String {
    let p = alpha * 100.0;
    if (p - p.round()).abs() < 1e-9 {
        format!("{}", p.round())
    } else {
        format!("{p}")
    }
}

impl OrderWeights for LEstimatorSpec {
    fn weights(&self) -> &[f64] {
        self.weights.weights()
    }
}

fn l_estimate_checked(w: &[f64], x: &[f64]) -> Result<f64> {
    check_len(w.len(), x.len())?;
    let mut sorted = x.to_vec();
    sort_values(&mut sorted);
    Ok(l_estimate_sorted(w, &sorted))
}

impl RiskEstimator for LEstimatorSpec {
    fn estimate(&self, x: &[f64]) -> Result<f64> {
        l_estimate_checked(self.weights.weights(), x)
    }

    fn estimate_presorted(&self, _x: &[f64], sorted: &[f64]) -> Result<f64> {
        check_len(self.n, sorted.len())?;
        Ok(self.evaluate_sorted(sorted))
    }

    fn label(&self) -> String {
        LEstimatorSpec::label(self)
    }
}

impl RiskEstimator for WeightVector {
    fn estimate(&self, x: &[f64]) -> Result<f64> {
        l_estimate_checked(self.as_slice(), x)
    }

    fn estimate_presorted(&self, _x: &[f64], sorted: &[f64]) -> Result<f64> {
        check_len(self.len(), sorted.len())?;
        Ok(l_estimate_sorted(self.as_slice(), sorted))
    }

    fn label(&self) -> String {
        "weights".into()
    }
}

impl RiskEstimator for GeneralWeightScheme {
    fn estimate(&self, x: &[f64]) -> Result<f64> {
        l_estimate_checked(self.weights(), x)
    }

    fn estimate_presorted(&self, _x: &[f64], sorted: &[f64]) -> Result<f64> {
        check_len(self.len(), sorted.len())?;
        Ok(l_estimate_sorted(self.weights(), sorted))
    }

    fn label(&self) -> String {
        self.name.clone()
    }
}

impl RiskEstimator for SupremumCre {
    fn estimate(&self, x: &[f64]) -> Result<f64> {
        check_len(self.dim(), x.len())?;
        let mut sorted = x.to_vec();
        sort_values(&mut sorted);
        Ok(supremum_sorted(self, &sorted).value)
    }

    fn estimate_presorted(&self, _x: &[f64], sorted: &[f64]) -> Result<f64> {
        check_len(self.dim(), sorted.len())?;
        Ok(supremum_sorted(self, sorted).value)
    }

    fn label(&self) -> String {
        format!("sup[{}]", self.candidates().len())
    }
}

/// `floor(x)` that snaps values within 1e-9 of an integer, so that products
/// such as `0.29 * 100` land on the intended integer.
pub(crate) fn floor_snapped(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < 1e-9 * x.abs().max(1.0) {
        r
    } else {
        x.floor()
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(RiskError::InvalidParameter(format!("alpha must lie in (0,1), got {alpha}")));
    }
    Ok(())
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(RiskError::InvalidParameter("sample size must be at least 1".into()));
    }
    Ok(())
}

/// Empirical quantile VaR, `-x_{(floor(alpha n)+1):n}`.
pub fn build_var_weights(alpha: f64, n: usize) -> Result<LEstimatorSpec> {
    check_alpha(alpha)?;
    check_n(n)?;
    let pos = floor_snapped(alpha * n as f64) as usize + 1;
    if pos > n {
        return Err(RiskError::LevelSize {
            alpha,
            n,
            reason: format!("order statistic {pos} does not exist"),
        });
    }
    let mut w = vec![0.0; n];
    w[pos - 1] = 1.0;
    LEstimatorSpec::from_weights(EstimatorId::VarEmp, alpha, w)
}

/// Type-6 interpolated VaR at 1% for `n = 250`: `0.49 x_{2:n} + 0.51 x_{3:n}`.
pub fn build_var_interp_1pct(n: usize) -> Result<LEstimatorSpec> {
    if n != 250 {
        return Err(RiskError::LevelSize {
            alpha: 0.01,
            n,
            reason: "the interpolated 1% VaR is defined for n = 250 only".into(),
        });
    }
    let mut w = vec![0.0; n];
    w[1] = 0.49;
    w[2] = 0.51;
    LEstimatorSpec::from_weights(EstimatorId::VarInterp1pct, 0.01, w)
}

fn tail_count(alpha: f64, n: usize) -> Result<usize> {
    check_alpha(alpha)?;
    check_n(n)?;
    let k = floor_snapped(alpha * n as f64) as usize;
    if k == 0 {
        return Err(RiskError::LevelSize { alpha, n, reason: "floor(alpha n) = 0".into() });
    }
    Ok(k)
}

/// #1: average of the `floor(alpha n)` worst outcomes.
pub fn build_es1(alpha: f64, n: usize) -> Result<LEstimatorSpec> {
    let k = tail_count(alpha, n)?;
    let mut w = vec![0.0; n];
    w[..k].fill(1.0 / k as f64);
    LEstimatorSpec::from_weights(EstimatorId::Es1, alpha, w)
}

/// #2: empirical-distribution plug-in, with a fractional weight on
/// `x_{(floor(alpha n)+1):n}` when `alpha n` is not an integer.
pub fn build_es2(alpha: f64, n: usize) -> Result<LEstimatorSpec> {
    let k = tail_count(alpha, n)?;
    let an = alpha * n as f64;
    let mut w = vec![0.0; n];
    w[..k].fill(1.0 / an);
    let frac = an - k as f64;
    if frac > 0.0 && k < n {
        w[k] = frac / an;
    }
    LEstimatorSpec::from_weights(EstimatorId::Es2, alpha, w)
}

/// `(M, R)` with `M = floor(alpha (n+1))` and `R` the fractional part.
fn type6_split(alpha: f64, n: usize) -> Result<(usize, f64, f64)> {
    check_alpha(alpha)?;
    check_n(n)?;
    let a = alpha * (n as f64 + 1.0);
    let m = floor_snapped(a);
    let r = (a - m).max(0.0);
    let m = m as usize;
    if m < 2 {
        return Err(RiskError::LevelSize {
            alpha,
            n,
            reason: format!("floor(alpha (n+1)) = {m} < 2"),
        });
    }
    if m > n || (m == n && r > 0.0) {
        return Err(RiskError::LevelSize {
            alpha,
            n,
            reason: "tail extends beyond the last order statistic".into(),
        });
    }
    Ok((m, r, a))
}

fn pareto_head(xi: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&xi) {
        return Err(RiskError::InvalidParameter(format!("xi must lie in [0,1), got {xi}")));
    }
    Ok(0.5 + 1.0 / (1.0 - xi))
}

fn type6_integral_weights(alpha: f64, n: usize, head: f64) -> Result<Vec<f64>> {
    let (m, r, a) = type6_split(alpha, n)?;
    let mut w = vec![0.0; n];
    w[0] = head;
    for wi in w.iter_mut().take(m - 1).skip(1) {
        *wi = 1.0;
    }
    w[m - 1] = (1.0 + 2.0 * r - r * r) / 2.0;
    if r > 0.0 {
        w[m] = r * r / 2.0;
    }
    for wi in &mut w {
        *wi /= a;
    }
    Ok(w)
}

fn truncated_weights(alpha: f64, n: usize, head: f64) -> Result<Vec<f64>> {
    let (m, _, _) = type6_split(alpha, n)?;
    let mut w = vec![0.0; n];
    w[0] = head / m as f64;
    w[1..m].fill(1.0 / m as f64);
    Ok(w)
}

/// #3: Type-6 quantile integral with flat extrapolation.
pub fn build_es3(alpha: f64, n: usize) -> Result<LEstimatorSpec> {
    let w = type6_integral_weights(alpha, n, 1.5)?;
    LEstimatorSpec::from_weights(EstimatorId::Es3, alpha, w)
}

/// #4: as #3 with a Pareto-tail head weight `1/2 + 1/(1 - xi)`.
pub fn build_es4(alpha: f64, n: usize, xi: f64) -> Result<LEstimatorSpec> {
    let w = type6_integral_weights(alpha, n, pareto_head(xi)?)?;
    LEstimatorSpec::from_weights(EstimatorId::Es4, alpha, w)
}

/// #5: conservative truncation of #3 to the first `M` order statistics.
pub fn build_es5(alpha: f64, n: usize) -> Result<LEstimatorSpec> {
    let w = truncated_weights(alpha, n, 1.5)?;
    LEstimatorSpec::from_weights(EstimatorId::Es5, alpha, w)
}

/// #6: conservative truncation of #4.
pub fn build_es6(alpha: f64, n: usize, xi: f64) -> Result<LEstimatorSpec> {
    let w = truncated_weights(alpha, n, pareto_head(xi)?)?;
    LEstimatorSpec::from_weights(EstimatorId::Es6, alpha, w)
}
