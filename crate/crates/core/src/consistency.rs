//! Checks that a family of spectral weight vectors approximates its
//! spectrum, and empirical convergence of the resulting estimators.
//!
//! Weights `a_{i,n}` induce the step function
//! `phi_n(t) = n a_{i,n}` on `((i-1)/n, i/n]`; consistency of the plug-in
//! estimators is tied to a uniform bound on `phi_n` and convergence of
//! `int_0^t phi_n` to `int_0^t phi`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{true_risk, DistributionSpec, OracleConfig};
use crate::error::{Result, RiskError};
use crate::estimators::{build_spectral_weights, build_spectral_weights_alt, Spectrum};
use crate::sample::sort_values;
use crate::sampling::{draw_sample_into, label_id, Purpose, SamplingScheme, StreamFactory};
use crate::weights::{l_estimate_sorted, WeightVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builder {
    /// Cell integrals of the spectrum.
    Integral,
    /// Normalised point values `phi(i/n)`.
    Alternative,
}

impl fmt::Display for Builder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Builder::Integral => "integral",
            Builder::Alternative => "alternative",
        })
    }
}

impl FromStr for Builder {
    type Err = RiskError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "integral" => Ok(Builder::Integral),
            "alternative" | "alt" | "pointwise" => Ok(Builder::Alternative),
            other => Err(RiskError::Parse(format!("unknown builder '{other}'"))),
        }
    }
}

/// A spectrum together with the rule that discretises it for each `n`.
#[derive(Clone, Copy)]
pub struct SpectrumApproximation<'a> {
    pub spectrum: &'a dyn Spectrum,
    pub builder: Builder,
}

impl<'a> SpectrumApproximation<'a> {
    pub fn new(spectrum: &'a dyn Spectrum, builder: Builder) -> Self {
        Self { spectrum, builder }
    }

    pub fn weights(&self, n: usize) -> Result<WeightVector> {
        match self.builder {
            Builder::Integral => build_spectral_weights(self.spectrum, n),
            Builder::Alternative => build_spectral_weights_alt(self.spectrum, n),
        }
    }
}

/// `int_0^t phi_n` for the step function induced by `w`.
pub fn step_cumulative(w: &[f64], t: f64) -> f64 {
    let n = w.len();
    let nt = t.clamp(0.0, 1.0) * n as f64;
    let full = (nt.floor() as usize).min(n);
    let head: f64 = w[..full].iter().sum();
    if full < n {
        head + (nt - full as f64) * w[full]
    } else {
        head
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformBound {
    pub bound: f64,
    pub spectrum_bound: f64,
    pub pass: bool,
}

/// `max_n max_i n a_{i,n}` against `sup phi`.
pub fn check_uniform_bound(approx: &SpectrumApproximation<'_>, n_list: &[usize]) -> Result<UniformBound> {
    if n_list.is_empty() {
        return Err(RiskError::InvalidParameter("n_list must not be empty".into()));
    }
    let mut bound = 0.0f64;
    for &n in n_list {
        let w = approx.weights(n)?;
        let top = w.as_slice().iter().fold(0.0f64, |m, &v| m.max(v));
        bound = bound.max(n as f64 * top);
    }
    let spectrum_bound = approx.spectrum.sup_norm();
    Ok(UniformBound { bound, spectrum_bound, pass: bound <= spectrum_bound + 1e-8 })
}

/// The 99 points `0.01, 0.02, ..., 0.99`.
pub fn default_t_grid() -> Vec<f64> {
    (1..=99).map(|i| i as f64 / 100.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialIntegralDeviation {
    pub n: usize,
    pub deviation: f64,
}

/// For each `n`, `max_t |int_0^t phi_n - int_0^t phi|` over `t_grid`.
pub fn check_partial_integrals(
    approx: &SpectrumApproximation<'_>,
    t_grid: &[f64],
    n_list: &[usize],
) -> Result<Vec<PartialIntegralDeviation>> {
    if let Some(t) = t_grid.iter().find(|&&t| !(t > 0.0 && t < 1.0)) {
        return Err(RiskError::InvalidParameter(format!("grid point {t} outside (0,1)")));
    }
    let exact: Vec<f64> = t_grid.iter().map(|&t| approx.spectrum.integral(0.0, t)).collect();
    n_list
        .iter()
        .map(|&n| {
            let w = approx.weights(n)?;
            let deviation = t_grid
                .iter()
                .zip(&exact)
                .map(|(&t, e)| (step_cumulative(w.as_slice(), t) - e).abs())
                .fold(0.0f64, f64::max);
            Ok(PartialIntegralDeviation { n, deviation })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyRow {
    pub n: usize,
    pub reps: usize,
    pub median_abs_error: f64,
    pub q1: f64,
    pub q3: f64,
    pub true_value: f64,
}

impl ConsistencyRow {
    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }
}

pub const CONSISTENCY_CSV_HEADER: &str = "n,reps,true_value,median_abs_error,q1,q3";

impl ConsistencyRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.n, self.reps, self.true_value, self.median_abs_error, self.q1, self.q3
        )
    }
}

/// Median and quartiles of `|ES_hat_n - ES_alpha|` over `reps` i.i.d.
/// samples per `n`, for an approximation of the ES spectrum at `alpha`.
pub fn empirical_consistency(
    dist: &DistributionSpec,
    approx: &SpectrumApproximation<'_>,
    alpha: f64,
    n_list: &[usize],
    reps: usize,
    seed: u64,
) -> Result<Vec<ConsistencyRow>> {
    let truth = true_risk(dist, alpha, &OracleConfig { seed, ..OracleConfig::default() })?.es_alpha;
    empirical_consistency_against(dist, approx, truth, n_list, reps, seed)
}

/// As [`empirical_consistency`], against a given population value.
pub fn empirical_consistency_against(
    dist: &DistributionSpec,
    approx: &SpectrumApproximation<'_>,
    truth: f64,
    n_list: &[usize],
    reps: usize,
    seed: u64,
) -> Result<Vec<ConsistencyRow>> {
    if reps < 10 {
        return Err(RiskError::InvalidParameter(format!("at least 10 repetitions are required, got {reps}")));
    }
    let factory = StreamFactory::new(seed);
    n_list
        .iter()
        .map(|&n| {
            let w = approx.weights(n)?;
            let scheme = SamplingScheme::iid(n)?;
            let cell = label_id(&format!("{dist}|consistency|n={n}"));
            let mut errors: Vec<f64> = (0..reps)
                .into_par_iter()
                .map(|k| {
                    let mut rng = factory.stream(Purpose::Consistency, cell, k as u64);
                    let (mut base, mut x) = (Vec::new(), Vec::with_capacity(n));
                    draw_sample_into(dist, &scheme, &mut rng, &mut base, &mut x);
                    sort_values(&mut x);
                    (l_estimate_sorted(w.as_slice(), &x) - truth).abs()
                })
                .collect();
            sort_values(&mut errors);
            Ok(ConsistencyRow {
                n,
                reps,
                median_abs_error: quantile_sorted(&errors, 0.5),
                q1: quantile_sorted(&errors, 0.25),
                q3: quantile_sorted(&errors, 0.75),
                true_value: truth,
            })
        })
        .collect()
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(x: &[f64], p: f64) -> f64 {
    let h = (x.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    x[lo] + (h - lo as f64) * (x[hi] - x[lo])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{EsSpectrum, LinearSpectrum, UniformSpectrum};

    #[test]
    fn es_bound_is_inverse_alpha() {
        let es = EsSpectrum::new(0.025).unwrap();
        let a = SpectrumApproximation::new(&es, Builder::Integral);
        let b = check_uniform_bound(&a, &[40, 100, 1000, 10_000]).unwrap();
        assert!((b.bound - 40.0).abs() < 1e-9);
        assert!(b.pass);
        let u = check_uniform_bound(&SpectrumApproximation::new(&UniformSpectrum, Builder::Integral), &[3, 17]).unwrap();
        assert!((u.bound - 1.0).abs() < 1e-12);
        let l = check_uniform_bound(&SpectrumApproximation::new(&LinearSpectrum, Builder::Integral), &[5, 50]).unwrap();
        assert!(l.bound <= 2.0 && l.pass);
        assert!(check_uniform_bound(&a, &[]).is_err());
    }

    #[test]
    fn one_cell_bound() {
        let es = EsSpectrum::new(0.025).unwrap();
        let a = SpectrumApproximation::new(&es, Builder::Integral);
        let ns = [37, 100, 333, 1000];
        for d in check_partial_integrals(&a, &default_t_grid(), &ns).unwrap() {
            assert!(d.deviation <= 40.0 / d.n as f64 + 1e-12, "{d:?}");
        }
        let u = SpectrumApproximation::new(&UniformSpectrum, Builder::Alternative);
        for d in check_partial_integrals(&u, &default_t_grid(), &ns).unwrap() {
            assert!(d.deviation < 1e-14);
        }
    }

    #[test]
    fn step_cumulative_values() {
        let w = [0.5, 0.3, 0.2];
        assert_eq!(step_cumulative(&w, 0.0), 0.0);
        assert!((step_cumulative(&w, 0.5) - 0.65).abs() < 1e-15);
        assert!((step_cumulative(&w, 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_distribution_has_no_error() {
        let es = EsSpectrum::new(0.025).unwrap();
        let a = SpectrumApproximation::new(&es, Builder::Integral);
        let d = DistributionSpec::normal(0.0, 1e-12).unwrap();
        let rows = empirical_consistency(&d, &a, 0.025, &[100, 1000], 10, 1).unwrap();
        assert!(rows.iter().all(|r| r.median_abs_error < 1e-10));
        assert!(empirical_consistency(&d, &a, 0.025, &[100], 5, 1).is_err());
    }
}
