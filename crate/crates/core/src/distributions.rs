//! Reference P&L distributions, their samplers and true risk values.
//!
//! Normal and Student-t risk values are closed form; NIG values (and any
//! multi-day sum without a closed-form law) come from a Monte Carlo oracle
//! using antithetic pairs and batch-means standard errors.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal, StudentsT};

use crate::error::{Result, RiskError};
use crate::sampling::{label_id, Purpose, StreamFactory};

/// Default Monte Carlo oracle size.
pub const DEFAULT_ORACLE_K: usize = 10_000_000;
/// Number of batches used for oracle standard errors.
pub const ORACLE_BATCHES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DistributionSpec {
    Normal { mu: f64, sigma: f64 },
    /// Standard Student-t with `nu > 2` degrees of freedom.
    StudentT { nu: f64 },
    /// Normal inverse Gaussian with tail `a`, skew `b`, location `mu`, scale `delta`.
    Nig { a: f64, b: f64, mu: f64, delta: f64 },
}

impl DistributionSpec {
    pub fn normal(mu: f64, sigma: f64) -> Result<Self> {
        Self::Normal { mu, sigma }.validated()
    }

    pub fn student_t(nu: f64) -> Result<Self> {
        Self::StudentT { nu }.validated()
    }

    pub fn nig(a: f64, b: f64, mu: f64, delta: f64) -> Result<Self> {
        Self::Nig { a, b, mu, delta }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let bad = |m: String| Err(RiskError::InvalidParameter(m));
        match self {
            Self::Normal { mu, sigma } => {
                if !mu.is_finite() || !(sigma > 0.0 && sigma.is_finite()) {
                    return bad(format!("normal needs finite mu and sigma > 0, got ({mu}, {sigma})"));
                }
            }
            Self::StudentT { nu } => {
                if !(nu > 2.0 && nu.is_finite()) {
                    return bad(format!("student-t needs nu > 2, got {nu}"));
                }
            }
            Self::Nig { a, b, mu, delta } => {
                if !(a > 0.0 && a.is_finite()) || !(b.abs() < a) || !mu.is_finite() || !(delta > 0.0 && delta.is_finite()) {
                    return bad(format!(
                        "nig needs a > 0, |b| < a, delta > 0, got ({a}, {b}, {mu}, {delta})"
                    ));
                }
            }
        }
        Ok(self)
    }

    /// The eight distributions of the reference study.
    pub fn reference_set() -> Vec<DistributionSpec> {
        let mut v = vec![Self::Normal { mu: 0.0, sigma: 1.0 }, Self::StudentT { nu: 5.0 }];
        for (a, b) in [(0.4, 0.14), (0.4, -0.14), (0.55, 0.3025), (0.55, -0.3025), (0.4, 0.22), (0.4, -0.22)] {
            v.push(Self::Nig { a, b, mu: 0.0, delta: 1.0 });
        }
        v
    }

    /// Short human-readable name used in tables.
    pub fn label(&self) -> String {
        match *self {
            Self::Normal { mu, sigma } if mu == 0.0 && sigma == 1.0 => "Normal".into(),
            Self::Normal { mu, sigma } => format!("Normal({mu},{sigma})"),
            Self::StudentT { nu } => format!("Student-t({nu})"),
            Self::Nig { a, b, mu, delta } if mu == 0.0 && delta == 1.0 => format!("NIG({a},{b})"),
            Self::Nig { a, b, mu, delta } => format!("NIG({a},{b},{mu},{delta})"),
        }
    }

    pub fn is_nig(&self) -> bool {
        matches!(self, Self::Nig { .. })
    }

    /// One draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample_antithetic(rng).0
    }

    /// A pair of draws sharing everything but the sign of the Gaussian driver.
    pub fn sample_antithetic<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        match *self {
            Self::Normal { mu, sigma } => {
                let z: f64 = rng.sample(StandardNormal);
                (mu + sigma * z, mu - sigma * z)
            }
            Self::StudentT { nu } => {
                let z: f64 = rng.sample(StandardNormal);
                let w: f64 = ChiSquared::new(nu).expect("validated nu").sample(rng);
                let s = (nu / w).sqrt();
                (z * s, -z * s)
            }
            Self::Nig { a, b, mu, delta } => {
                let gamma = (a * a - b * b).sqrt();
                let v = inverse_gaussian(delta / gamma, delta * delta, rng);
                let z: f64 = rng.sample(StandardNormal);
                let centre = mu + b * v;
                let spread = v.sqrt() * z;
                (centre + spread, centre - spread)
            }
        }
    }

    /// Closed-form law of the sum of `h` i.i.d. copies, when one exists.
    pub fn horizon_sum(&self, h: usize) -> Option<DistributionSpec> {
        match *self {
            Self::Normal { mu, sigma } => Some(Self::Normal {
                mu: h as f64 * mu,
                sigma: sigma * (h as f64).sqrt(),
            }),
            Self::Nig { .. } => horizon_convolve(self, h).ok(),
            Self::StudentT { .. } => None,
        }
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Normal { mu, sigma } => write!(f, "normal:{mu}:{sigma}"),
            Self::StudentT { nu } => write!(f, "t:{nu}"),
            Self::Nig { a, b, mu, delta } => write!(f, "nig:{a}:{b}:{mu}:{delta}"),
        }
    }
}

impl FromStr for DistributionSpec {
    type Err = RiskError;

    /// Accepts `normal[:mu:sigma]`, `t:nu` and `nig:a:b[:mu:delta]`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |i: usize| -> Result<f64> {
            parts
                .get(i)
                .ok_or_else(|| RiskError::Parse(format!("'{s}': missing parameter {i}")))?
                .trim()
                .parse::<f64>()
                .map_err(|e| RiskError::Parse(format!("'{s}': {e}")))
        };
        let spec = match parts[0].trim().to_ascii_lowercase().as_str() {
            "normal" | "gaussian" if parts.len() == 1 => Self::Normal { mu: 0.0, sigma: 1.0 },
            "normal" | "gaussian" if parts.len() == 3 => Self::Normal { mu: num(1)?, sigma: num(2)? },
            "t" | "student" | "student-t" if parts.len() == 2 => Self::StudentT { nu: num(1)? },
            "nig" if parts.len() == 3 => Self::Nig { a: num(1)?, b: num(2)?, mu: 0.0, delta: 1.0 },
            "nig" if parts.len() == 5 => Self::Nig { a: num(1)?, b: num(2)?, mu: num(3)?, delta: num(4)? },
            _ => return Err(RiskError::Parse(format!("unrecognised distribution '{s}'"))),
        };
        spec.validated()
    }
}

impl TryFrom<String> for DistributionSpec {
    type Error = RiskError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<DistributionSpec> for String {
    fn from(d: DistributionSpec) -> Self {
        d.to_string()
    }
}

/// Michael–Schucany–Haas sampler for the inverse Gaussian law with the
/// given mean and shape.
pub fn inverse_gaussian<R: Rng + ?Sized>(mean: f64, shape: f64, rng: &mut R) -> f64 {
    let nu: f64 = rng.sample(StandardNormal);
    let y = nu * nu;
    let m2y = mean * mean * y;
    let x = mean + m2y / (2.0 * shape)
        - mean / (2.0 * shape) * (4.0 * mean * shape * y + m2y * y).sqrt();
    let u: f64 = rng.random();
    if u <= mean / (mean + x) {
        x
    } else {
        mean * mean / x
    }
}

/// `count` NIG draws from `stream`.
pub fn nig_sample<R: Rng + ?Sized>(spec: &DistributionSpec, count: usize, stream: &mut R) -> Result<Vec<f64>> {
    if !spec.is_nig() {
        return Err(RiskError::InvalidParameter(format!("{spec} is not an NIG law")));
    }
    Ok((0..count).map(|_| spec.sample(stream)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NigMoments {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

pub fn nig_moments(spec: &DistributionSpec) -> Result<NigMoments> {
    let DistributionSpec::Nig { a, b, mu, delta } = *spec else {
        return Err(RiskError::InvalidParameter(format!("{spec} is not an NIG law")));
    };
    let gamma = (a * a - b * b).sqrt();
    Ok(NigMoments {
        mean: mu + delta * b / gamma,
        variance: delta * a * a / gamma.powi(3),
        skewness: 3.0 * b / (a * (delta * gamma).sqrt()),
        excess_kurtosis: 3.0 * (1.0 + 4.0 * b * b / (a * a)) / (delta * gamma),
    })
}

/// Law of the sum of `h` i.i.d. NIG variables: `NIG(a, b, h mu, h delta)`.
pub fn horizon_convolve(spec: &DistributionSpec, h: usize) -> Result<DistributionSpec> {
    if h == 0 {
        return Err(RiskError::InvalidParameter("horizon must be at least 1".into()));
    }
    match *spec {
        DistributionSpec::Nig { a, b, mu, delta } => Ok(DistributionSpec::Nig {
            a,
            b,
            mu: h as f64 * mu,
            delta: h as f64 * delta,
        }),
        _ => Err(RiskError::InvalidParameter(format!("{spec} is not an NIG law"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RiskMethod {
    ClosedForm,
    McOracle { k: usize, seed: u64 },
}

/// Population VaR and ES of a P&L variable at level `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrueRisk {
    pub alpha: f64,
    pub var_alpha: f64,
    pub es_alpha: f64,
    pub method: RiskMethod,
    /// Batch-means standard error of `es_alpha`; zero for closed forms.
    pub standard_error: f64,
    pub var_standard_error: f64,
}

impl TrueRisk {
    pub fn value(&self, target: crate::estimators::RiskTarget) -> f64 {
        match target {
            crate::estimators::RiskTarget::ValueAtRisk(_) => self.var_alpha,
            crate::estimators::RiskTarget::ExpectedShortfall(_) => self.es_alpha,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub k: usize,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { k: DEFAULT_ORACLE_K, seed: 7 }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(RiskError::InvalidParameter(format!("alpha must lie in (0,1), got {alpha}")));
    }
    Ok(())
}

/// Closed-form VaR/ES where available (Normal, Student-t), `None` otherwise.
pub fn closed_form_risk(dist: &DistributionSpec, alpha: f64) -> Result<Option<TrueRisk>> {
    check_alpha(alpha)?;
    let (var, es) = match *dist {
        DistributionSpec::Normal { mu, sigma } => {
            let z = Normal::standard();
            let q = z.inverse_cdf(alpha);
            (-mu - sigma * q, -mu + sigma * z.pdf(q) / alpha)
        }
        DistributionSpec::StudentT { nu } => {
            let t = StudentsT::new(0.0, 1.0, nu)
                .map_err(|e| RiskError::InvalidParameter(e.to_string()))?;
            let q = t.inverse_cdf(alpha);
            (-q, t.pdf(q) * (nu + q * q) / ((nu - 1.0) * alpha))
        }
        DistributionSpec::Nig { .. } => return Ok(None),
    };
    Ok(Some(TrueRisk {
        alpha,
        var_alpha: var,
        es_alpha: es,
        method: RiskMethod::ClosedForm,
        standard_error: 0.0,
        var_standard_error: 0.0,
    }))
}

/// True risk of one draw of `dist`; Monte Carlo oracle for NIG.
pub fn true_risk(dist: &DistributionSpec, alpha: f64, oracle: &OracleConfig) -> Result<TrueRisk> {
    horizon_true_risk(dist, 1, alpha, oracle)
}

/// True risk of the sum of `h` i.i.d. draws of `dist`.
pub fn horizon_true_risk(
    dist: &DistributionSpec,
    h: usize,
    alpha: f64,
    oracle: &OracleConfig,
) -> Result<TrueRisk> {
    check_alpha(alpha)?;
    if h == 0 {
        return Err(RiskError::InvalidParameter("horizon must be at least 1".into()));
    }
    let target = if h == 1 { Some(*dist) } else { dist.horizon_sum(h) };
    if let Some(t) = target {
        if let Some(r) = closed_form_risk(&t, alpha)? {
            return Ok(r);
        }
        return mc_true_risk(&t, 1, alpha, oracle);
    }
    mc_true_risk(dist, h, alpha, oracle)
}

/// Monte Carlo oracle for VaR (empirical quantile) and ES (estimator #2)
/// of the `h`-fold sum, from `oracle.k` antithetic draws split into batches.
pub fn mc_true_risk(
    dist: &DistributionSpec,
    h: usize,
    alpha: f64,
    oracle: &OracleConfig,
) -> Result<TrueRisk> {
    check_alpha(alpha)?;
    let batch_len = oracle.k / ORACLE_BATCHES;
    if batch_len < 2 || (alpha * batch_len as f64) < 1.0 {
        return Err(RiskError::InvalidParameter(format!(
            "oracle size {} too small for alpha = {alpha}",
            oracle.k
        )));
    }
    let factory = StreamFactory::new(oracle.seed);
    let cell = label_id(&format!("{dist}|h={h}"));
    let mut batches: Vec<Vec<f64>> = (0..ORACLE_BATCHES)
        .into_par_iter()
        .map(|b| {
            let mut rng = factory.stream(Purpose::Oracle, cell, b as u64);
            let mut out = Vec::with_capacity(batch_len);
            while out.len() < batch_len {
                let (mut p, mut q) = (0.0, 0.0);
                for _ in 0..h {
                    let (x, y) = dist.sample_antithetic(&mut rng);
                    p += x;
                    q += y;
                }
                out.push(p);
                if out.len() < batch_len {
                    out.push(q);
                }
            }
            out
        })
        .collect();

    let per_batch: Vec<(f64, f64)> = batches.iter_mut().map(|b| tail_risk(b, alpha)).collect();
    let mut pooled: Vec<f64> = batches.into_iter().flatten().collect();
    let (var, es) = tail_risk(&mut pooled, alpha);

    let se = |vals: Vec<f64>| {
        let m = vals.iter().sum::<f64>() / vals.len() as f64;
        let v = vals.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (vals.len() - 1) as f64;
        (v / vals.len() as f64).sqrt()
    };
    Ok(TrueRisk {
        alpha,
        var_alpha: var,
        es_alpha: es,
        method: RiskMethod::McOracle { k: pooled.len(), seed: oracle.seed },
        standard_error: se(per_batch.iter().map(|p| p.1).collect()),
        var_standard_error: se(per_batch.iter().map(|p| p.0).collect()),
    })
}

/// Empirical-quantile VaR and plug-in ES (#2) of a large sample, using
/// selection instead of a full sort. Reorders `x`.
pub(crate) fn tail_risk(x: &mut [f64], alpha: f64) -> (f64, f64) {
    let n = x.len();
    let an = alpha * n as f64;
    let k = crate::estimators::floor_snapped(an) as usize;
    let k = k.min(n - 1);
    let (below, pivot, _) = x.select_nth_unstable_by(k, f64::total_cmp);
    let pivot = *pivot;
    let tail: f64 = below.iter().sum();
    let frac = an - k as f64;
    (-pivot, -(tail + frac * pivot) / an)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;
    use rand_chacha::ChaCha8Rng;
    use rand::SeedableRng;

    #[test]
    fn normal_closed_forms() {
        let r = closed_form_risk(&DistributionSpec::normal(0.0, 1.0).unwrap(), 0.01).unwrap().unwrap();
        assert!((r.var_alpha - 2.326).abs() < 5e-4);
        let r = closed_form_risk(&DistributionSpec::normal(0.0, 1.0).unwrap(), 0.025).unwrap().unwrap();
        assert!((r.es_alpha - 2.337_802_792_2).abs() < 1e-9);
        assert!(r.es_alpha >= r.var_alpha);
    }

    #[test]
    fn normal_scaling_is_exact() {
        let a = closed_form_risk(&DistributionSpec::normal(0.0, 1.0).unwrap(), 0.025).unwrap().unwrap();
        let b = closed_form_risk(&DistributionSpec::normal(0.0, 3.0).unwrap(), 0.025).unwrap().unwrap();
        assert!((b.es_alpha - 3.0 * a.es_alpha).abs() < 1e-12);
        assert!((b.var_alpha - 3.0 * a.var_alpha).abs() < 1e-12);
    }

    #[test]
    fn student_t_quantile_and_es_against_quadrature() {
        let d = DistributionSpec::student_t(5.0).unwrap();
        let r = closed_form_risk(&d, 0.025).unwrap().unwrap();
        assert!((r.var_alpha - 2.570_581_835_636_314).abs() < 1e-8);
        // ES = (1/alpha) int_0^alpha VaR_t dt with t = alpha u^4.
        let t = StudentsT::new(0.0, 1.0, 5.0).unwrap();
        let f = |u: f64| {
            if u <= 0.0 {
                return 0.0;
            }
            -t.inverse_cdf(0.025 * u.powi(4)) * 4.0 * u.powi(3)
        };
        let es = integrate(f, 0.0, 1.0, 1e-9);
        assert!((es - r.es_alpha).abs() < 1e-6, "{es} vs {}", r.es_alpha);
    }

    #[test]
    fn parse_and_display() {
        let d: DistributionSpec = "nig:0.4:0.14:0:1".parse().unwrap();
        assert_eq!(d, DistributionSpec::Nig { a: 0.4, b: 0.14, mu: 0.0, delta: 1.0 });
        assert_eq!(d.to_string().parse::<DistributionSpec>().unwrap(), d);
        assert_eq!("nig:0.4:0.14".parse::<DistributionSpec>().unwrap(), d);
        assert_eq!("t:5".parse::<DistributionSpec>().unwrap(), DistributionSpec::StudentT { nu: 5.0 });
        assert_eq!("normal".parse::<DistributionSpec>().unwrap(), DistributionSpec::Normal { mu: 0.0, sigma: 1.0 });
        assert!("nig:0.1:0.2".parse::<DistributionSpec>().is_err());
        assert!("t:2".parse::<DistributionSpec>().is_err());
        assert!("cauchy".parse::<DistributionSpec>().is_err());
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(json, "\"nig:0.4:0.14:0:1\"");
    }

    #[test]
    fn moments_formulas() {
        let d = DistributionSpec::nig(0.4, 0.14, 0.0, 1.0).unwrap();
        let m = nig_moments(&d).unwrap();
        assert!((m.mean - 0.373_632_358_9).abs() < 1e-9);
        assert!((m.skewness - 1.715_329_363_8).abs() < 1e-9);
        let sym = nig_moments(&DistributionSpec::nig(0.4, 0.0, 0.0, 1.0).unwrap()).unwrap();
        assert_eq!(sym.skewness, 0.0);
        let m10 = nig_moments(&horizon_convolve(&d, 10).unwrap()).unwrap();
        assert!((m10.skewness - m.skewness / 10f64.sqrt()).abs() < 1e-12);
        assert!(nig_moments(&DistributionSpec::student_t(5.0).unwrap()).is_err());
    }

    #[test]
    fn convolution_arithmetic() {
        let d = DistributionSpec::nig(0.4, 0.14, 0.1, 1.0).unwrap();
        assert_eq!(horizon_convolve(&d, 1).unwrap(), d);
        assert_eq!(
            horizon_convolve(&d, 10).unwrap(),
            DistributionSpec::Nig { a: 0.4, b: 0.14, mu: 1.0, delta: 10.0 }
        );
        assert!(horizon_convolve(&d, 0).is_err());
    }

    #[test]
    fn inverse_gaussian_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (mean, shape) = (2.0, 3.0);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| inverse_gaussian(mean, shape, &mut rng)).collect();
        let m = xs.iter().sum::<f64>() / n as f64;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n as f64;
        let true_var = mean.powi(3) / shape;
        assert!((m - mean).abs() < 4.0 * (true_var / n as f64).sqrt());
        assert!((v / true_var - 1.0).abs() < 0.05);
    }

    #[test]
    fn tail_risk_small_case() {
        let mut x: Vec<f64> = (1..=8).map(|i| i as f64).collect();
        // alpha n = 2.5: VaR = -x_{3:8}, ES = -(1 + 2 + 0.5 * 3) / 2.5
        let (var, es) = tail_risk(&mut x, 0.3125);
        assert_eq!(var, -3.0);
        assert!((es + 4.5 / 2.5).abs() < 1e-15);
    }
}
