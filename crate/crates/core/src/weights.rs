//! Weight vectors on order statistics and the L-estimator evaluation
//! `x -> -sum_i w_i x_{i:n}`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, RiskError};
use crate::sample::{sort_values, Sample, SortedSample};

/// Absolute tolerance on `sum w_i = 1` for members of the simplex.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Anything that carries one weight per order statistic.
pub trait OrderWeights {
    fn weights(&self) -> &[f64];

    fn len(&self) -> usize {
        self.weights().len()
    }

    fn is_empty(&self) -> bool {
        self.weights().is_empty()
    }

    fn weight_sum(&self) -> f64 {
        self.weights().iter().sum()
    }
}

/// An element of the simplex `M_n`: non-negative weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector {
    weights: Vec<f64>,
    monotone: bool,
}

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(RiskError::InvalidWeights("empty weight vector".into()));
        }
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(RiskError::InvalidWeights(format!("weight {i} is not finite")));
            }
            if w < 0.0 {
                return Err(RiskError::InvalidWeights(format!("weight {i} is negative ({w})")));
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(RiskError::InvalidWeights(format!(
                "weights sum to {sum}, expected 1"
            )));
        }
        let monotone = is_non_increasing(&weights);
        Ok(Self { weights, monotone })
    }

    /// Like [`WeightVector::new`] but additionally requires `w_1 >= w_2 >= ... >= w_n`.
    pub fn monotone(weights: Vec<f64>) -> Result<Self> {
        let w = Self::new(weights)?;
        if !w.monotone {
            return Err(RiskError::InvalidWeights("weights are not non-increasing".into()));
        }
        Ok(w)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(RiskError::InvalidWeights("empty weight vector".into()));
        }
        Self::new(vec![1.0 / n as f64; n])
    }

    /// Unit mass on the 1-based order statistic `position`.
    pub fn point_mass(n: usize, position: usize) -> Result<Self> {
        if position == 0 || position > n {
            return Err(RiskError::InvalidWeights(format!(
                "position {position} outside 1..={n}"
            )));
        }
        let mut w = vec![0.0; n];
        w[position - 1] = 1.0;
        Self::new(w)
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.weights
    }
}

impl OrderWeights for WeightVector {
    fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = RiskError;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        WeightVector::new(v)
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(w: WeightVector) -> Self {
        w.weights
    }
}

/// Unconstrained weights, used for estimators whose weights leave the simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralWeightScheme {
    pub name: String,
    weights: Vec<f64>,
}

impl GeneralWeightScheme {
    pub fn new(name: impl Into<String>, weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(RiskError::InvalidWeights("empty weight vector".into()));
        }
        if let Some(i) = weights.iter().position(|w| !w.is_finite()) {
            return Err(RiskError::InvalidWeights(format!("weight {i} is not finite")));
        }
        Ok(Self { name: name.into(), weights })
    }

    /// Whether the weights lie in `M_n` and are non-increasing.
    pub fn is_cre(&self) -> bool {
        self.weights.iter().all(|&w| w >= 0.0)
            && (self.weight_sum() - 1.0).abs() <= WEIGHT_SUM_TOL
            && is_non_increasing(&self.weights)
    }

    /// Converts to a simplex member, failing when the weights leave `M_n`.
    pub fn to_weight_vector(&self) -> Result<WeightVector> {
        WeightVector::new(self.weights.clone())
    }
}

impl OrderWeights for GeneralWeightScheme {
    fn weights(&self) -> &[f64] {
        &self.weights
    }
}

pub(crate) fn is_non_increasing(w: &[f64]) -> bool {
    w.windows(2).all(|p| p[0] >= p[1])
}

/// `-sum_i w_i x_{i:n}` for any weight carrier.
pub fn apply_l_estimator<W: OrderWeights + ?Sized>(w: &W, x: &Sample) -> Result<f64> {
    check_len(w.len(), x.len())?;
    let mut sorted = x.values().to_vec();
    sort_values(&mut sorted);
    Ok(l_estimate_sorted(w.weights(), &sorted))
}

pub fn apply_l_estimator_sorted<W: OrderWeights + ?Sized>(w: &W, s: &SortedSample) -> Result<f64> {
    check_len(w.len(), s.len())?;
    Ok(l_estimate_sorted(w.weights(), s.values()))
}

/// Evaluates the L-estimator on an already sorted slice; zero weights are skipped.
#[inline]
pub fn l_estimate_sorted(weights: &[f64], sorted: &[f64]) -> f64 {
    debug_assert_eq!(weights.len(), sorted.len());
    let mut acc = 0.0;
    for (&w, &v) in weights.iter().zip(sorted) {
        if w != 0.0 {
            acc += w * v;
        }
    }
    -acc
}

pub(crate) fn check_len(weights: usize, sample: usize) -> Result<()> {
    if weights != sample {
        return Err(RiskError::DimensionMismatch { weights, sample });
    }
    Ok(())
}
