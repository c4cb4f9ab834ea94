//! Coherent risk estimators built from weighted order statistics.
//!
//! The crate covers four layers:
//!
//! - **Representation** ([`sample`], [`weights`], [`supremum`]): samples,
//!   simplex weight vectors, L-estimators `x -> -<a, s(x)>` and finite
//!   suprema of them.
//! - **Estimators** ([`estimators`]): empirical and interpolated VaR, the
//!   six L-statistic expected-shortfall estimators, spectral plug-ins, the
//!   Gaussian plug-in and the empirical expectile.
//! - **Diagnostics** ([`coherence`], [`consistency`]): randomized axiom
//!   checks with replayable witnesses, extraction of comonotonic weights,
//!   and spectral consistency checks.
//! - **Benchmark** ([`distributions`], [`sampling`], [`metrics`], [`bench`]):
//!   reference distributions with true risk values, reproducible i.i.d. and
//!   overlapping samples, and the AE/SE/SB/RB/CT study.
//!
//! ```
//! use riskbench::estimators::build_es2;
//! use riskbench::RiskEstimator;
//!
//! let es = build_es2(0.025, 250).unwrap();
//! let x: Vec<f64> = (0..250).map(|i| i as f64 - 10.0).collect();
//! // -(0.16 * (-10 - 9 - 8 - 7 - 6 - 5) + 0.04 * (-4))
//! assert!((es.estimate(&x).unwrap() - 7.36).abs() < 1e-12);
//! ```

pub mod bench;
pub mod coherence;
pub mod consistency;
pub mod distributions;
pub mod error;
pub mod estimators;
pub mod metrics;
pub mod quad;
pub mod sample;
pub mod sampling;
pub mod supremum;
pub mod weights;

pub use error::{Result, RiskError};
pub use estimators::{LEstimatorSpec, RiskEstimator};
pub use sample::{sort_sample, Sample, SortedSample};
pub use supremum::{apply_supremum, permutation_closure_oracle, SupremumCre};
pub use weights::{apply_l_estimator, GeneralWeightScheme, WeightVector};
