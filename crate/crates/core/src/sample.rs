//! P&L samples and their ordered versions.
//!
//! Values are profit-positive: a loss is a negative number, so the worst
//! outcome is the first order statistic.

use crate::error::{Result, RiskError};

/// A finite, non-empty vector of P&L values.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        validate_values(&values)?;
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.values
    }
}

impl TryFrom<Vec<f64>> for Sample {
    type Error = RiskError;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Sample::new(values)
    }
}

impl TryFrom<&[f64]> for Sample {
    type Error = RiskError;

    fn try_from(values: &[f64]) -> Result<Self> {
        Sample::new(values.to_vec())
    }
}

/// A sample rearranged in non-decreasing order, `s(x) = (x_{1:n}, ..., x_{n:n})`.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedSample {
    values: Vec<f64>,
}

impl SortedSample {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The `i`-th smallest value, 1-based.
    pub fn order_statistic(&self, i: usize) -> Option<f64> {
        i.checked_sub(1).and_then(|j| self.values.get(j).copied())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.values
    }
}

pub fn sort_sample(x: &Sample) -> SortedSample {
    let mut values = x.values.clone();
    sort_values(&mut values);
    SortedSample { values }
}

/// Sorts finite values in place in non-decreasing order.
pub(crate) fn sort_values(values: &mut [f64]) {
    values.sort_unstable_by(f64::total_cmp);
}

pub(crate) fn validate_values(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(RiskError::EmptySample);
    }
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(RiskError::NonFinite { index });
    }
    Ok(())
}
