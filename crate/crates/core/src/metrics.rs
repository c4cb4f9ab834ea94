//! Monte Carlo accuracy and capitalization metrics of risk estimators.
//!
//! For replications `k = 1..K` with estimates `r_k`, true risk `T` and an
//! independent out-of-sample companion `c_k` (secured value `c_k + r_k`):
//!
//! - `AE = mean |r_k - T| / T`
//! - `SE = sqrt(mean (r_k - T)^2) / T`
//! - `SB = mean r_k / T - 1`
//! - `RB = -ES1_{alpha,K}(secured) / T`
//! - `CT = m* / K`, `m*` the smallest `m` for which the `m` smallest secured
//!   values sum to a non-negative number (`CT = 1`, flagged, if none does).
//!
//! For a VaR target, RB uses the empirical quantile `-s_{(floor(alpha K)+1)}` and
//! CT the fraction of negative secured values.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::DistributionSpec;
use crate::error::{Result, RiskError};
use crate::estimators::{floor_snapped, RiskEstimator, RiskTarget};
use crate::sample::sort_values;
use crate::sampling::{draw_sample_into, draw_secured_companion, label_id, Purpose, SamplingScheme, StreamFactory};

/// Smallest admissible replication count.
pub const MIN_REPLICATIONS: usize = 20;

const CHUNK: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Metric {
    Ae,
    Se,
    Sb,
    Rb,
    Ct,
}

impl Metric {
    pub const ALL: [Metric; 5] = [Metric::Ae, Metric::Se, Metric::Sb, Metric::Rb, Metric::Ct];

    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::Ae => "AE",
            Metric::Se => "SE",
            Metric::Sb => "SB",
            Metric::Rb => "RB",
            Metric::Ct => "CT",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = RiskError;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| RiskError::Parse(format!("unknown metric '{s}'")))
    }
}

/// Metrics as fractions (not percent).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub ae: f64,
    pub se: f64,
    pub sb: f64,
    pub rb: f64,
    pub ct: f64,
    /// False when the secured positions never turn safe and `ct` was set to 1.
    pub ct_crossed: bool,
    pub ae_stderr: f64,
    pub se_stderr: f64,
    pub sb_stderr: f64,
    pub k: usize,
    pub true_value: f64,
}

impl MetricReport {
    pub fn value(&self, m: Metric) -> f64 {
        match m {
            Metric::Ae => self.ae,
            Metric::Se => self.se,
            Metric::Sb => self.sb,
            Metric::Rb => self.rb,
            Metric::Ct => self.ct,
        }
    }

    pub fn stderr(&self, m: Metric) -> Option<f64> {
        match m {
            Metric::Ae => Some(self.ae_stderr),
            Metric::Se => Some(self.se_stderr),
            Metric::Sb => Some(self.sb_stderr),
            Metric::Rb | Metric::Ct => None,
        }
    }
}

/// One estimator evaluated in a cell, with the population value it targets.
#[derive(Clone, Copy)]
pub struct CellEstimator<'a> {
    pub estimator: &'a dyn RiskEstimator,
    pub target: RiskTarget,
    pub true_value: f64,
}

/// A single (distribution, scheme, estimator) benchmark cell.
#[derive(Clone, Copy)]
pub struct BenchCell<'a> {
    pub distribution: DistributionSpec,
    pub scheme: SamplingScheme,
    pub estimator: &'a dyn RiskEstimator,
    pub target: RiskTarget,
    pub k: usize,
    pub seed: u64,
}

pub fn run_cell(cell: &BenchCell<'_>, true_risk: &crate::distributions::TrueRisk) -> Result<MetricReport> {
    let est = CellEstimator {
        estimator: cell.estimator,
        target: cell.target,
        true_value: true_risk.value(cell.target),
    };
    Ok(run_shared(&cell.distribution, &cell.scheme, &[est], cell.k, cell.seed)?.remove(0))
}

/// Stream cell for a distribution and scheme. Only the distribution family
/// enters, so rescaled laws of one family reuse the same base randomness.
pub fn cell_stream_id(dist: &DistributionSpec, scheme: &SamplingScheme) -> u64 {
    let family = match dist {
        DistributionSpec::Normal { .. } => "normal",
        DistributionSpec::StudentT { .. } => "t",
        DistributionSpec::Nig { .. } => "nig",
    };
    label_id(&format!("{family}|{}|n={}", scheme, scheme.n()))
}

/// Raw per-replication output: one row of estimates per replication.
pub struct Replications {
    pub estimates: Vec<Vec<f64>>,
    pub companions: Vec<f64>,
}

/// Draws `k` replications and evaluates every estimator on each sample
/// (common random numbers).
pub fn simulate(
    dist: &DistributionSpec,
    scheme: &SamplingScheme,
    estimators: &[&dyn RiskEstimator],
    k: usize,
    seed: u64,
) -> Result<Replications> {
    let factory = StreamFactory::new(seed);
    let cell = cell_stream_id(dist, scheme);
    let n_chunks = k.div_ceil(CHUNK);
    let chunks: Vec<Result<Vec<(Vec<f64>, f64)>>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut base = Vec::new();
            let mut x = Vec::with_capacity(scheme.n());
            let mut sorted = Vec::with_capacity(scheme.n());
            let mut out = Vec::with_capacity(CHUNK);
            for rep in c * CHUNK..((c + 1) * CHUNK).min(k) {
                let mut s = factory.stream(Purpose::Sample, cell, rep as u64);
                draw_sample_into(dist, scheme, &mut s, &mut base, &mut x);
                sorted.clear();
                sorted.extend_from_slice(&x);
                sort_values(&mut sorted);
                let row = estimators
                    .iter()
                    .map(|e| {
                        e.estimate_presorted(&x, &sorted).map_err(|err| RiskError::EstimatorFailure {
                            input: x.clone(),
                            reason: format!("replication {rep}: {err}"),
                        })
                    })
                    .collect::<Result<Vec<f64>>>()?;
                let mut cs = factory.stream(Purpose::Companion, cell, rep as u64);
                out.push((row, draw_secured_companion(dist, scheme, &mut cs)));
            }
            Ok(out)
        })
        .collect();
    let mut estimates = vec![Vec::with_capacity(k); estimators.len()];
    let mut companions = Vec::with_capacity(k);
    for chunk in chunks {
        for (row, c) in chunk? {
            for (j, v) in row.into_iter().enumerate() {
                estimates[j].push(v);
            }
            companions.push(c);
        }
    }
    Ok(Replications { estimates, companions })
}

/// Runs several estimators on shared replications.
pub fn run_shared(
    dist: &DistributionSpec,
    scheme: &SamplingScheme,
    estimators: &[CellEstimator<'_>],
    k: usize,
    seed: u64,
) -> Result<Vec<MetricReport>> {
    if k < MIN_REPLICATIONS {
        return Err(RiskError::InvalidParameter(format!(
            "at least {MIN_REPLICATIONS} replications are required, got {k}"
        )));
    }
    for e in estimators {
        let t = e.true_value;
        if !(t > 0.0 && t.is_finite()) {
            return Err(RiskError::InvalidParameter(format!(
                "true risk must be positive, got {t} for {}",
                e.estimator.label()
            )));
        }
        if floor_snapped(e.target.alpha() * k as f64) < 1.0 {
            return Err(RiskError::InvalidParameter(format!(
                "alpha K must be at least 1 (alpha = {}, K = {k})",
                e.target.alpha()
            )));
        }
    }
    let boxes: Vec<&dyn RiskEstimator> = estimators.iter().map(|e| e.estimator).collect();
    let reps = simulate(dist, scheme, &boxes, k, seed)?;
    Ok(estimators
        .iter()
        .zip(&reps.estimates)
        .map(|(e, est)| metrics_from_replications(est, &reps.companions, e.target, e.true_value))
        .collect())
}

/// Pairwise summation; fixed association order for a given length.
pub fn pairwise_sum(x: &[f64]) -> f64 {
    if x.len() <= 32 {
        return x.iter().sum();
    }
    let mid = x.len() / 2;
    pairwise_sum(&x[..mid]) + pairwise_sum(&x[mid..])
}

fn mean_sd(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = pairwise_sum(x) / n;
    let dev: Vec<f64> = x.iter().map(|v| (v - m) * (v - m)).collect();
    let var = if x.len() > 1 { pairwise_sum(&dev) / (n - 1.0) } else { 0.0 };
    (m, var.sqrt())
}

/// The five metrics from per-replication estimates and companions.
pub fn metrics_from_replications(estimates: &[f64], companions: &[f64], target: RiskTarget, t: f64) -> MetricReport {
    let k = estimates.len();
    let kf = k as f64;
    let root_k = kf.sqrt();
    let abs_err: Vec<f64> = estimates.iter().map(|r| (r - t).abs()).collect();
    let sq_err: Vec<f64> = abs_err.iter().map(|e| e * e).collect();
    let (mae, sd_ae) = mean_sd(&abs_err);
    let (mse, sd_sq) = mean_sd(&sq_err);
    let (mean_r, sd_r) = mean_sd(estimates);
    let rmse = mse.sqrt();

    let mut secured: Vec<f64> = companions.iter().zip(estimates).map(|(c, r)| c + r).collect();
    sort_values(&mut secured);
    let alpha = target.alpha();
    let m = (floor_snapped(alpha * kf) as usize).clamp(1, k);
    let (rb, ct, crossed) = match target {
        RiskTarget::ExpectedShortfall(_) => {
            let es1 = -pairwise_sum(&secured[..m]) / m as f64;
            let mut acc = 0.0;
            let mut star = None;
            for (i, s) in secured.iter().enumerate() {
                acc += s;
                if acc >= 0.0 {
                    star = Some(i + 1);
                    break;
                }
            }
            match star {
                Some(s) => (-es1 / t, s as f64 / kf, true),
                None => (-es1 / t, 1.0, false),
            }
        }
        RiskTarget::ValueAtRisk(_) => {
            let idx = m.min(k - 1);
            let var = -secured[idx];
            let negative = secured.partition_point(|&s| s < 0.0);
            (-var / t, negative as f64 / kf, true)
        }
    };

    MetricReport {
        ae: mae / t,
        se: rmse / t,
        sb: mean_r / t - 1.0,
        rb,
        ct,
        ct_crossed: crossed,
        ae_stderr: sd_ae / t / root_k,
        se_stderr: if rmse > 0.0 { sd_sq / (2.0 * rmse * t * root_k) } else { 0.0 },
        sb_stderr: sd_r / t / root_k,
        k,
        true_value: t,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderStatMean {
    pub position: usize,
    pub mean: f64,
    pub stderr: f64,
}

/// Monte Carlo means of the order statistics `X_{i:n}` at 1-based `positions`,
/// with batch-means standard errors over 20 batches.
pub fn order_statistic_means(
    dist: &DistributionSpec,
    n: usize,
    positions: &[usize],
    k_oracle: usize,
    seed: u64,
) -> Result<Vec<OrderStatMean>> {
    if let Some(&p) = positions.iter().find(|&&p| p == 0 || p > n) {
        return Err(RiskError::InvalidParameter(format!("position {p} outside 1..={n}")));
    }
    const BATCHES: usize = 20;
    let per_batch = k_oracle / BATCHES;
    if per_batch == 0 {
        return Err(RiskError::InvalidParameter(format!("oracle size {k_oracle} is below {BATCHES}")));
    }
    let factory = StreamFactory::new(seed);
    let cell = label_id(&format!("{dist}|order|n={n}"));
    let scheme = SamplingScheme::iid(n)?;
    let batch_means: Vec<Vec<f64>> = (0..BATCHES)
        .into_par_iter()
        .map(|b| {
            let mut rng = factory.stream(Purpose::OrderStatistics, cell, b as u64);
            let mut base = Vec::new();
            let mut x = Vec::with_capacity(n);
            let mut acc = vec![0.0; positions.len()];
            for _ in 0..per_batch {
                draw_sample_into(dist, &scheme, &mut rng, &mut base, &mut x);
                sort_values(&mut x);
                for (a, &p) in acc.iter_mut().zip(positions) {
                    *a += x[p - 1];
                }
            }
            acc.into_iter().map(|a| a / per_batch as f64).collect()
        })
        .collect();
    Ok(positions
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            let col: Vec<f64> = batch_means.iter().map(|b| b[j]).collect();
            let (m, sd) = mean_sd(&col);
            OrderStatMean { position: p, mean: m, stderr: sd / (BATCHES as f64).sqrt() }
        })
        .collect())
}

/// `SB = (-sum a_i m_{i:n}) / T - 1` from order-statistic means at positions `1..=len(a)`.
pub fn semi_analytic_sb(weights: &[f64], means: &[OrderStatMean], true_value: f64) -> f64 {
    let e: f64 = weights
        .iter()
        .zip(means)
        .map(|(w, m)| w * m.mean)
        .sum();
    -e / true_value - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::closed_form_risk;
    use crate::estimators::{build_es1, FnEstimator};

    #[test]
    fn hand_computed_metrics() {
        let est = [1.0, 2.0, 3.0, 2.0];
        let comp = [-2.0, -1.0, 0.5, -3.0];
        // secured: -1, 1, 3.5, -1 -> sorted -1, -1, 1, 3.5
        let r = metrics_from_replications(&est, &comp, RiskTarget::ExpectedShortfall(0.5), 2.0);
        assert!((r.ae - 0.25).abs() < 1e-15);
        assert!((r.se - (0.5f64).sqrt() / 2.0).abs() < 1e-15);
        assert!(r.sb.abs() < 1e-15);
        // ES1 at 0.5 over 4: -(-1 - 1) / 2 = 1 -> RB = -1/2
        assert!((r.rb + 0.5).abs() < 1e-15);
        // cumulative: -1, -2, -1, 2.5 -> m* = 4
        assert_eq!(r.ct, 1.0);
        assert!(r.ct_crossed);
        let v = metrics_from_replications(&est, &comp, RiskTarget::ValueAtRisk(0.5), 2.0);
        assert_eq!(v.rb, 0.5);
        assert_eq!(v.ct, 0.5);
    }

    #[test]
    fn never_crossing_is_flagged() {
        let r = metrics_from_replications(&[0.0; 20], &[-1.0; 20], RiskTarget::ExpectedShortfall(0.05), 1.0);
        assert_eq!(r.ct, 1.0);
        assert!(!r.ct_crossed);
    }

    #[test]
    fn perfect_estimator() {
        let d = DistributionSpec::normal(0.0, 1.0).unwrap();
        let t = closed_form_risk(&d, 0.025).unwrap().unwrap();
        let es = t.es_alpha;
        let perfect = FnEstimator::new("oracle", move |_: &[f64]| es);
        let scheme = SamplingScheme::iid(10).unwrap();
        let cell = BenchCell {
            distribution: d,
            scheme,
            estimator: &perfect,
            target: RiskTarget::ExpectedShortfall(0.025),
            k: 4000,
            seed: 3,
        };
        let r = run_cell(&cell, &t).unwrap();
        assert_eq!((r.ae, r.se), (0.0, 0.0));
        assert!(r.sb.abs() < 1e-14);
        // RB = -ES(X + ES)/ES = (ES - ES(X))/ES, with ES(X) estimated from the companions.
        let reps = simulate(&d, &scheme, &[&perfect], 4000, 3).unwrap();
        let mut c = reps.companions.clone();
        sort_values(&mut c);
        let es_hat = -c[..100].iter().sum::<f64>() / 100.0;
        assert!((r.rb - (es - es_hat) / es).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_cells() {
        let d = DistributionSpec::normal(0.0, 1.0).unwrap();
        let e = build_es1(0.025, 50).unwrap();
        let scheme = SamplingScheme::iid(50).unwrap();
        let ce = |v| CellEstimator { estimator: &e, target: RiskTarget::ExpectedShortfall(0.025), true_value: v };
        assert!(run_shared(&d, &scheme, &[ce(2.3)], 10, 1).is_err());
        assert!(run_shared(&d, &scheme, &[ce(0.0)], 100, 1).is_err());
    }

    #[test]
    fn min_of_two_normals() {
        let d = DistributionSpec::normal(0.0, 1.0).unwrap();
        let m = order_statistic_means(&d, 2, &[1, 2], 400_000, 5).unwrap();
        let expected = -1.0 / std::f64::consts::PI.sqrt();
        assert!((m[0].mean - expected).abs() < 4.0 * m[0].stderr + 1e-4, "{m:?}");
        // min + max = X1 + X2, mean zero with sd sqrt(2 / K)
        assert!((m[0].mean + m[1].mean).abs() < 0.01);
    }

    #[test]
    fn pairwise_sum_matches() {
        let x: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&x), 499_500.0);
    }
}
