//! Suprema of finitely many L-estimators with non-increasing weights.

use itertools::Itertools;

use crate::error::{Result, RiskError};
use crate::sample::{sort_values, Sample};
use crate::weights::{check_len, l_estimate_sorted, OrderWeights, WeightVector};

/// Largest dimension accepted by [`permutation_closure_oracle`].
pub const PERMUTATION_ORACLE_MAX_N: usize = 8;

/// A finite representing set of monotone weight vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SupremumCre {
    candidates: Vec<WeightVector>,
}

/// Value of a supremum estimator together with the winning candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupremumValue {
    pub value: f64,
    /// Index of the maximizing candidate; the lowest index wins ties.
    pub argmax: usize,
}

impl SupremumCre {
    pub fn new(candidates: Vec<WeightVector>) -> Result<Self> {
        let first = candidates.first().ok_or(RiskError::EmptyCandidates)?;
        let n = first.len();
        for (i, c) in candidates.iter().enumerate() {
            if !c.is_monotone() {
                return Err(RiskError::InvalidWeights(format!(
                    "candidate {i} is not non-increasing"
                )));
            }
            check_len(c.len(), n)?;
        }
        Ok(Self { candidates })
    }

    pub fn candidates(&self) -> &[WeightVector] {
        &self.candidates
    }

    pub fn dim(&self) -> usize {
        self.candidates[0].len()
    }
}

pub fn apply_supremum(m: &SupremumCre, x: &Sample) -> Result<SupremumValue> {
    check_len(m.dim(), x.len())?;
    let mut sorted = x.values().to_vec();
    sort_values(&mut sorted);
    Ok(supremum_sorted(m, &sorted))
}

pub(crate) fn supremum_sorted(m: &SupremumCre, sorted: &[f64]) -> SupremumValue {
    let mut best = SupremumValue { value: f64::NEG_INFINITY, argmax: 0 };
    for (i, c) in m.candidates.iter().enumerate() {
        let v = l_estimate_sorted(c.weights(), sorted);
        if v > best.value {
            best = SupremumValue { value: v, argmax: i };
        }
    }
    best
}

/// Brute-force value `max_{sigma, a} <sigma(a), -x>` over all permutations of
/// every candidate, evaluated on the unsorted sample.
pub fn permutation_closure_oracle(m: &SupremumCre, x: &Sample) -> Result<f64> {
    let n = x.len();
    if n > PERMUTATION_ORACLE_MAX_N {
        return Err(RiskError::TooLarge { n, max: PERMUTATION_ORACLE_MAX_N });
    }
    check_len(m.dim(), n)?;
    let xs = x.values();
    let mut best = f64::NEG_INFINITY;
    for c in &m.candidates {
        let w = c.weights();
        for perm in (0..n).permutations(n) {
            let v: f64 = -perm.iter().zip(xs).map(|(&j, &xi)| w[j] * xi).sum::<f64>();
            best = best.max(v);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wv(v: &[f64]) -> WeightVector {
        WeightVector::new(v.to_vec()).unwrap()
    }

    fn sample(v: &[f64]) -> Sample {
        Sample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn singleton_set() {
        let m = SupremumCre::new(vec![wv(&[1.0, 0.0, 0.0])]).unwrap();
        let r = apply_supremum(&m, &sample(&[5.0, 1.0, 3.0])).unwrap();
        assert_eq!(r, SupremumValue { value: -1.0, argmax: 0 });
    }

    #[test]
    fn constants_tie_to_lowest_index() {
        let third = 1.0 / 3.0;
        let m = SupremumCre::new(vec![wv(&[1.0, 0.0, 0.0]), wv(&[third, third, third])]).unwrap();
        let r = apply_supremum(&m, &sample(&[0.0, 0.0, 0.0])).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.argmax, 0);
    }

    #[test]
    fn worst_case_candidate_wins_on_spike() {
        let third = 1.0 / 3.0;
        let m = SupremumCre::new(vec![wv(&[1.0, 0.0, 0.0]), wv(&[third, third, third])]).unwrap();
        let r = apply_supremum(&m, &sample(&[-3.0, 3.0, 3.0])).unwrap();
        assert_eq!(r.value, 3.0);
        assert_eq!(r.argmax, 0);
    }

    #[test]
    fn oracle_two_permutations() {
        let m = SupremumCre::new(vec![wv(&[1.0, 0.0])]).unwrap();
        let x = sample(&[2.0, 1.0]);
        assert_eq!(permutation_closure_oracle(&m, &x).unwrap(), -1.0);
        assert_eq!(apply_supremum(&m, &x).unwrap().value, -1.0);
    }

    #[test]
    fn oracle_uniform_is_negative_mean() {
        let m = SupremumCre::new(vec![WeightVector::uniform(4).unwrap()]).unwrap();
        let v = permutation_closure_oracle(&m, &sample(&[4.0, -1.0, 2.0, 3.0])).unwrap();
        assert!((v + 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_sets() {
        assert_eq!(SupremumCre::new(vec![]), Err(RiskError::EmptyCandidates));
        assert!(SupremumCre::new(vec![wv(&[0.2, 0.8])]).is_err());
        assert!(SupremumCre::new(vec![wv(&[1.0]), wv(&[0.5, 0.5])]).is_err());
        let m = SupremumCre::new(vec![WeightVector::uniform(9).unwrap()]).unwrap();
        assert_eq!(
            permutation_closure_oracle(&m, &sample(&[0.0; 9])),
            Err(RiskError::TooLarge { n: 9, max: 8 })
        );
    }
}
