//! Randomized checks of the coherence axioms, law invariance and
//! comonotonic additivity for black-box estimators, plus recovery of the
//! comonotonic representation weights.
//!
//! Every check first runs a fixed adversarial deck (constants, unit
//! vectors, sparse `±100` spikes, ramps) and then `trials` random probes,
//! each on its own stream so results do not depend on the thread count.
//! A violation is flagged when its defect exceeds `1e-9 * (1 + scale)`,
//! where `scale` is the largest magnitude among the inputs and both sides.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{StandardNormal, StudentT};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RiskError};
use crate::estimators::RiskEstimator;
use crate::sampling::{label_id, Purpose, Stream, StreamFactory};
use crate::weights::{l_estimate_sorted, WeightVector, WEIGHT_SUM_TOL};

pub const REL_TOL: f64 = 1e-9;

pub fn tolerance(scale: f64) -> f64 {
    REL_TOL * (1.0 + scale)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Monotonicity,
    CashAdditivity,
    PositiveHomogeneity,
    Subadditivity,
    LawInvariance,
    ComonotonicAdditivity,
}

impl Axiom {
    pub const ALL: [Axiom; 6] = [
        Axiom::Monotonicity,
        Axiom::CashAdditivity,
        Axiom::PositiveHomogeneity,
        Axiom::Subadditivity,
        Axiom::LawInvariance,
        Axiom::ComonotonicAdditivity,
    ];

    /// The four axioms that make an estimator coherent.
    pub const COHERENCE: [Axiom; 4] = [
        Axiom::Monotonicity,
        Axiom::CashAdditivity,
        Axiom::PositiveHomogeneity,
        Axiom::Subadditivity,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Axiom::Monotonicity => "monotonicity",
            Axiom::CashAdditivity => "cash_additivity",
            Axiom::PositiveHomogeneity => "positive_homogeneity",
            Axiom::Subadditivity => "subadditivity",
            Axiom::LawInvariance => "law_invariance",
            Axiom::ComonotonicAdditivity => "comonotonic_additivity",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Axiom {
    type Err = RiskError;

    fn from_str(s: &str) -> Result<Self> {
        Axiom::ALL
            .into_iter()
            .find(|a| a.as_str() == s.trim())
            .ok_or_else(|| RiskError::Parse(format!("unknown axiom '{s}'")))
    }
}

/// A concrete probe of one axiom.
///
/// The sides compared are, per axiom (`x = inputs[0]`, `y = inputs[1]`):
///
/// | axiom | `lhs` | `rhs` | violated when |
/// |---|---|---|---|
/// | monotonicity (`x >= y`) | `rho(x)` | `rho(y)` | `lhs > rhs` |
/// | cash additivity | `rho(x + m)` | `rho(x) - m` | `lhs != rhs` |
/// | positive homogeneity | `rho(lambda x)` | `lambda rho(x)` | `lhs != rhs` |
/// | subadditivity | `rho(x + y)` | `rho(x) + rho(y)` | `lhs > rhs` |
/// | law invariance (`y` a permutation of `x`) | `rho(y)` | `rho(x)` | `lhs != rhs` |
/// | comonotonic additivity | `rho(x + y)` | `rho(x) + rho(y)` | `lhs != rhs` |
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub axiom: Axiom,
    pub inputs: Vec<Vec<f64>>,
    /// `m` for cash additivity, `lambda` for homogeneity.
    pub parameter: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub defect: f64,
}

impl Witness {
    fn evaluate(
        estimator: &dyn RiskEstimator,
        axiom: Axiom,
        inputs: Vec<Vec<f64>>,
        parameter: Option<f64>,
    ) -> Result<Self> {
        let rho = |v: &[f64]| {
            estimator.estimate(v).map_err(|e| RiskError::EstimatorFailure {
                input: v.to_vec(),
                reason: e.to_string(),
            })
        };
        let x = &inputs[0];
        let (lhs, rhs) = match axiom {
            Axiom::Monotonicity | Axiom::LawInvariance => {
                let (a, b) = (rho(&inputs[0])?, rho(&inputs[1])?);
                if axiom == Axiom::LawInvariance {
                    (b, a)
                } else {
                    (a, b)
                }
            }
            Axiom::CashAdditivity => {
                let m = parameter.expect("cash shift");
                let shifted: Vec<f64> = x.iter().map(|v| v + m).collect();
                (rho(&shifted)?, rho(x)? - m)
            }
            Axiom::PositiveHomogeneity => {
                let l = parameter.expect("scale factor");
                let scaled: Vec<f64> = x.iter().map(|v| l * v).collect();
                (rho(&scaled)?, l * rho(x)?)
            }
            Axiom::Subadditivity | Axiom::ComonotonicAdditivity => {
                let y = &inputs[1];
                let sum: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
                (rho(&sum)?, rho(x)? + rho(y)?)
            }
        };
        let defect = match axiom {
            Axiom::Monotonicity | Axiom::Subadditivity => lhs - rhs,
            _ => (lhs - rhs).abs(),
        };
        Ok(Self { axiom, inputs, parameter, lhs, rhs, defect })
    }

    pub fn scale(&self) -> f64 {
        let inputs = self
            .inputs
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        inputs.max(self.lhs.abs()).max(self.rhs.abs())
    }

    pub fn is_violation(&self) -> bool {
        !(self.defect <= tolerance(self.scale()))
    }

    /// Re-evaluates the probe on `estimator`.
    pub fn replay(&self, estimator: &dyn RiskEstimator) -> Result<Witness> {
        Witness::evaluate(estimator, self.axiom, self.inputs.clone(), self.parameter)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict<W> {
    Pass { trials: usize },
    Fail { witness: W },
}

impl<W> Verdict<W> {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass { .. })
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Fail { witness } => Some(witness),
            Verdict::Pass { .. } => None,
        }
    }
}

pub type AxiomOutcome = Verdict<Witness>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomEntry {
    pub axiom: Axiom,
    #[serde(flatten)]
    pub outcome: AxiomOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub estimator: String,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub axioms: Vec<AxiomEntry>,
}

impl CoherenceReport {
    pub fn outcome(&self, axiom: Axiom) -> Option<&AxiomOutcome> {
        self.axioms.iter().find(|e| e.axiom == axiom).map(|e| &e.outcome)
    }

    pub fn all_pass(&self) -> bool {
        self.axioms.iter().all(|e| e.outcome.is_pass())
    }

    /// Monotonicity, cash additivity, homogeneity and subadditivity all pass.
    pub fn is_coherent(&self) -> bool {
        Axiom::COHERENCE
            .iter()
            .all(|a| self.outcome(*a).is_some_and(|o| o.is_pass()))
    }
}

impl fmt::Display for CoherenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} (n = {}, trials = {}, seed = {})", self.estimator, self.n, self.trials, self.seed)?;
        for e in &self.axioms {
            match &e.outcome {
                Verdict::Pass { trials } => writeln!(f, "  {:<24} PASS ({trials} probes)", e.axiom)?,
                Verdict::Fail { witness } => writeln!(
                    f,
                    "  {:<24} FAIL lhs = {:.6} rhs = {:.6} defect = {:.3e}",
                    e.axiom, witness.lhs + 0.0, witness.rhs + 0.0, witness.defect
                )?,
            }
        }
        Ok(())
    }
}

/// Runs all six checks.
pub fn check_all(estimator: &dyn RiskEstimator, n: usize, trials: usize, seed: u64) -> Result<CoherenceReport> {
    let axioms = Axiom::ALL
        .iter()
        .map(|&axiom| Ok(AxiomEntry { axiom, outcome: check_axiom(estimator, axiom, n, trials, seed)? }))
        .collect::<Result<Vec<_>>>()?;
    Ok(CoherenceReport { estimator: estimator.label(), n, trials, seed, axioms })
}

/// Probes one axiom with the adversarial deck and `trials` random probes.
/// Returns the first violating probe in deck-then-trial order.
pub fn check_axiom(
    estimator: &dyn RiskEstimator,
    axiom: Axiom,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<AxiomOutcome> {
    if n == 0 {
        return Err(RiskError::InvalidParameter("dimension must be at least 1".into()));
    }
    if trials == 0 {
        return Err(RiskError::InvalidParameter("at least one trial is required".into()));
    }
    let deck = adversarial_deck(axiom, n);
    for (inputs, p) in &deck {
        let w = Witness::evaluate(estimator, axiom, inputs.clone(), *p)?;
        if w.is_violation() {
            return Ok(Verdict::Fail { witness: w });
        }
    }
    let factory = StreamFactory::new(seed);
    let cell = label_id(axiom.as_str()) ^ n as u64;
    let found = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = factory.stream(Purpose::Coherence, cell, t as u64);
            let (inputs, p) = random_probe(axiom, n, t, &mut rng);
            Witness::evaluate(estimator, axiom, inputs, p)
        })
        .find_map_first(|r| match r {
            Ok(w) if !w.is_violation() => None,
            other => Some(other),
        });
    match found {
        None => Ok(Verdict::Pass { trials: deck.len() + trials }),
        Some(Ok(w)) => Ok(Verdict::Fail { witness: w }),
        Some(Err(e)) => Err(e),
    }
}

type Probe = (Vec<Vec<f64>>, Option<f64>);

fn unit(n: usize, i: usize, v: f64) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = v;
    e
}

fn deck_vectors(n: usize) -> Vec<Vec<f64>> {
    let mut v = vec![vec![0.0; n], vec![1.0; n], vec![-2.5; n]];
    for i in [0, 1, 2, n / 2, n - 1] {
        if i < n {
            v.push(unit(n, i, 1.0));
            v.push(unit(n, i, -100.0));
            v.push(unit(n, i, 100.0));
        }
    }
    let ramp: Vec<f64> = (0..n).map(|i| i as f64 - (n / 2) as f64).collect();
    let mut reversed = ramp.clone();
    reversed.reverse();
    v.push(ramp);
    v.push(reversed);
    let alternating: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { -1.0 } else { 3.0 }).collect();
    v.push(alternating);
    v.dedup();
    v
}

fn adversarial_deck(axiom: Axiom, n: usize) -> Vec<Probe> {
    let vs = deck_vectors(n);
    let mut deck = Vec::new();
    match axiom {
        Axiom::Monotonicity => {
            // Bumping any single coordinate up must not raise the capital.
            for base in &vs {
                for i in [0, 1, n / 2, n - 1] {
                    if i < n {
                        let mut up = base.clone();
                        up[i] += 1.0;
                        deck.push((vec![up, base.clone()], None));
                    }
                }
                let up: Vec<f64> = base.iter().map(|v| v + 1.0).collect();
                deck.push((vec![up, base.clone()], None));
            }
        }
        Axiom::CashAdditivity => {
            for base in &vs {
                for m in [1.0, -1.0, 0.5, -0.5, 100.0] {
                    deck.push((vec![base.clone()], Some(m)));
                }
            }
        }
        Axiom::PositiveHomogeneity => {
            for base in &vs {
                for l in [0.0, 0.5, 2.0, 10.0] {
                    deck.push((vec![base.clone()], Some(l)));
                }
            }
        }
        Axiom::Subadditivity => {
            // Disjoint loss spikes: each is invisible alone, jointly they are not.
            for i in 0..n.min(4) {
                for j in i + 1..n.min(6) {
                    deck.push((vec![unit(n, i, -100.0), unit(n, j, -100.0)], None));
                }
            }
            for a in &vs {
                for b in &vs {
                    deck.push((vec![a.clone(), b.clone()], None));
                }
            }
        }
        Axiom::LawInvariance => {
            for base in &vs {
                let mut rev = base.clone();
                rev.reverse();
                let mut rot = base.clone();
                rot.rotate_left(1.min(n));
                deck.push((vec![base.clone(), rev], None));
                deck.push((vec![base.clone(), rot], None));
            }
        }
        Axiom::ComonotonicAdditivity => {
            for base in &vs {
                deck.push((vec![base.clone(), base.clone()], None));
                let affine: Vec<f64> = base.iter().map(|v| 2.0 * v + 1.0).collect();
                deck.push((vec![base.clone(), affine], None));
                let clipped: Vec<f64> = base.iter().map(|v| v.min(0.0)).collect();
                deck.push((vec![base.clone(), clipped], None));
            }
        }
    }
    deck
}

fn random_vector(n: usize, rng: &mut Stream) -> Vec<f64> {
    let scale = rng.random_range(0.1..100.0);
    let heavy = rng.random_bool(0.2);
    let t2 = StudentT::new(2.0).expect("valid degrees of freedom");
    let mut v: Vec<f64> = (0..n)
        .map(|_| {
            let z: f64 = if heavy { rng.sample(t2) } else { rng.sample(StandardNormal) };
            scale * z
        })
        .collect();
    // Ties matter for order-statistic estimators.
    if rng.random_bool(0.1) {
        for x in &mut v {
            *x = x.round();
        }
    }
    v
}

fn nondecreasing_transform(u: &[f64], rng: &mut Stream) -> Vec<f64> {
    let kind = rng.random_range(0..5);
    let a = rng.random_range(0.1..5.0);
    let c = rng.random_range(-10.0..10.0);
    u.iter()
        .map(|&v| match kind {
            0 => a * v + c,
            1 => v.max(c),
            2 => v.min(c),
            3 => (v / (1.0 + v.abs())) * a,
            _ => v * v.abs() / (1.0 + v.abs()) + c,
        })
        .collect()
}

fn random_probe(axiom: Axiom, n: usize, t: usize, rng: &mut Stream) -> Probe {
    let x = random_vector(n, rng);
    match axiom {
        Axiom::Monotonicity => {
            let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
            let sparse = rng.random_bool(0.5);
            let up: Vec<f64> = x
                .iter()
                .map(|&v| {
                    if sparse && !rng.random_bool(0.1) {
                        v
                    } else {
                        let z: f64 = rng.sample(StandardNormal);
                        v + z.abs() * scale * rng.random::<f64>()
                    }
                })
                .collect();
            (vec![up, x], None)
        }
        Axiom::CashAdditivity => {
            let m = match t % 5 {
                0 => 1.0,
                1 => -1.0,
                2 => 0.5,
                3 => -0.5,
                _ => rng.random_range(-100.0..100.0),
            };
            (vec![x], Some(m))
        }
        Axiom::PositiveHomogeneity => {
            let l = match t % 4 {
                0 => 0.0,
                1 => 0.5,
                2 => 2.0,
                _ => rng.random_range(0.0..10.0),
            };
            (vec![x], Some(l))
        }
        Axiom::Subadditivity => {
            let y = if t % 2 == 0 {
                random_vector(n, rng)
            } else {
                let r = rng.random_range(-1.0..1.0);
                let noise = random_vector(n, rng);
                x.iter().zip(&noise).map(|(a, b)| r * a + 0.1 * b).collect()
            };
            (vec![x, y], None)
        }
        Axiom::LawInvariance => {
            let mut y = x.clone();
            y.shuffle(rng);
            (vec![x, y], None)
        }
        Axiom::ComonotonicAdditivity => {
            let a = nondecreasing_transform(&x, rng);
            let b = nondecreasing_transform(&x, rng);
            (vec![a, b], None)
        }
    }
}

/// Fits `s` in `rho(x + m) = rho(x) - s m` over a grid of shifts and bases.
/// For an L-estimator `s` is the sum of its weights.
pub fn check_cash_additivity_slope(estimator: &dyn RiskEstimator, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(RiskError::InvalidParameter("dimension must be at least 1".into()));
    }
    let rho = |v: &[f64]| {
        estimator.estimate(v).map_err(|e| RiskError::EstimatorFailure {
            input: v.to_vec(),
            reason: e.to_string(),
        })
    };
    let bases: Vec<Vec<f64>> = vec![
        vec![0.0; n],
        (0..n).map(|i| i as f64 - (n / 2) as f64).collect(),
        unit(n, 0, -100.0),
    ];
    let grid = [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0];
    let mut points = Vec::new();
    for x in &bases {
        let r0 = rho(x)?;
        for &m in &grid {
            let shifted: Vec<f64> = x.iter().map(|v| v + m).collect();
            points.push((r0, m, rho(&shifted)?));
        }
    }
    // Least squares through the origin on (m, r0 - r(m)).
    let num: f64 = points.iter().map(|(r0, m, r)| m * (r0 - r)).sum();
    let den: f64 = points.iter().map(|(_, m, _)| m * m).sum();
    let s = num / den;
    let mut defect = 0.0f64;
    let mut scale = 0.0f64;
    for (r0, m, r) in &points {
        defect = defect.max((r - (r0 - s * m)).abs());
        scale = scale.max(r.abs()).max(r0.abs());
    }
    if defect > tolerance(scale.max(100.0)) {
        return Err(RiskError::NotAffine { defect });
    }
    Ok(s)
}

/// Recovers `a` with `rho(x) = <a, -s(x)>` by probing the sorted vectors
/// `v_k = (-1, ..., -1, 0, ..., 0)` (`k` leading `-1`s): `a_k = rho(v_k) - rho(v_{k-1})`.
///
/// The probes alone cannot tell a comonotonic estimator from one whose
/// weights depend on the sample, so the extracted weights are then checked
/// against the estimator on further inputs.
pub fn extract_comonotonic_weights(estimator: &dyn RiskEstimator, n: usize) -> Result<WeightVector> {
    if n == 0 {
        return Err(RiskError::InvalidParameter("dimension must be at least 1".into()));
    }
    let rho = |v: &[f64]| {
        estimator.estimate(v).map_err(|e| RiskError::EstimatorFailure {
            input: v.to_vec(),
            reason: e.to_string(),
        })
    };
    let mut prev = rho(&vec![0.0; n])?;
    let mut v = vec![0.0; n];
    let mut a = Vec::with_capacity(n);
    for k in 0..n {
        v[k] = -1.0;
        let r = rho(&v)?;
        a.push(r - prev);
        prev = r;
    }

    let not = |m: String| Err(RiskError::NotComonotonic(m));
    if let Some((i, w)) = a.iter().enumerate().find(|(_, &w)| w < -REL_TOL) {
        return not(format!("extracted weight a_{} = {w} is negative", i + 1));
    }
    for i in 1..n {
        if a[i] > a[i - 1] + REL_TOL {
            return not(format!("extracted weights increase at position {}", i + 1));
        }
    }
    let sum: f64 = a.iter().sum();
    if (sum - 1.0).abs() > REL_TOL {
        return not(format!("extracted weights sum to {sum}"));
    }

    // Clean float noise so the result is an exact simplex member.
    for w in a.iter_mut() {
        *w = w.max(0.0);
    }
    for i in 1..n {
        if a[i] > a[i - 1] {
            a[i] = a[i - 1];
        }
    }
    let sum: f64 = a.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        for w in a.iter_mut() {
            *w /= sum;
        }
    }
    let w = WeightVector::monotone(a)?;

    match verify_representation(estimator, &w, 64, 0x5eed)? {
        Verdict::Pass { .. } => Ok(w),
        Verdict::Fail { witness } => not(format!(
            "weights from the probes do not reproduce the estimator on {:?} ({} vs {})",
            witness.input, witness.estimator_value, witness.representation_value
        )),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentationWitness {
    pub input: Vec<f64>,
    pub estimator_value: f64,
    pub representation_value: f64,
    pub defect: f64,
}

/// Checks `rho(x) = <w, -s(x)>` on adversarial and `trials` random inputs.
pub fn verify_representation(
    estimator: &dyn RiskEstimator,
    w: &WeightVector,
    trials: usize,
    seed: u64,
) -> Result<Verdict<RepresentationWitness>> {
    let n = w.as_slice().len();
    let probe = |x: Vec<f64>| -> Result<Option<RepresentationWitness>> {
        let e = estimator.estimate(&x).map_err(|err| RiskError::EstimatorFailure {
            input: x.clone(),
            reason: err.to_string(),
        })?;
        let mut s = x.clone();
        s.sort_by(f64::total_cmp);
        let r = l_estimate_sorted(w.as_slice(), &s);
        let scale = x.iter().fold(e.abs().max(r.abs()), |m, v| m.max(v.abs()));
        let defect = (e - r).abs();
        Ok((!(defect <= tolerance(scale))).then_some(RepresentationWitness {
            input: x,
            estimator_value: e,
            representation_value: r,
            defect,
        }))
    };
    let deck = deck_vectors(n);
    let deck_len = deck.len();
    for x in deck {
        if let Some(wit) = probe(x)? {
            return Ok(Verdict::Fail { witness: wit });
        }
    }
    let factory = StreamFactory::new(seed);
    let cell = label_id("representation") ^ n as u64;
    let found = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = factory.stream(Purpose::Coherence, cell, t as u64);
            probe(random_vector(n, &mut rng))
        })
        .find_map_first(|r| match r {
            Ok(None) => None,
            Ok(Some(w)) => Some(Ok(w)),
            Err(e) => Some(Err(e)),
        });
    match found {
        None => Ok(Verdict::Pass { trials: deck_len + trials }),
        Some(Ok(witness)) => Ok(Verdict::Fail { witness }),
        Some(Err(e)) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{build_es1, build_es2, build_es3, build_es4, build_es6, build_var_weights, ExpVarEstimator, FnEstimator, GaussianPluginEs, DEFAULT_XI};

    #[test]
    fn gaussian_plugin_monotonicity_witness() {
        let g = GaussianPluginEs::new(0.01).unwrap();
        let out = check_axiom(&g, Axiom::Monotonicity, 2, 50, 1).unwrap();
        let w = out.witness().expect("must fail");
        assert_eq!(w.inputs, vec![vec![1.0, 0.0], vec![0.0, 0.0]]);
        assert!((w.lhs - 1.38).abs() < 0.01);
        assert_eq!(w.rhs, 0.0);
        assert!(w.replay(&g).unwrap().is_violation());
    }

    #[test]
    fn var_subadditivity_witness() {
        let v = build_var_weights(0.01, 100).unwrap();
        let out = check_axiom(&v, Axiom::Subadditivity, 100, 50, 1).unwrap();
        let w = out.witness().expect("must fail");
        assert_eq!(w.lhs, 100.0);
        assert_eq!(w.rhs, 0.0);
        assert!(w.replay(&v).unwrap().is_violation());
    }

    #[test]
    fn es1_passes_everything() {
        let e = build_es1(0.025, 250).unwrap();
        let r = check_all(&e, 250, 300, 7).unwrap();
        assert!(r.all_pass(), "{r}");
    }

    #[test]
    fn es4_fails_cash_additivity_only_among_e1_to_e4() {
        let e = build_es4(0.025, 250, DEFAULT_XI).unwrap();
        let r = check_all(&e, 250, 100, 7).unwrap();
        assert!(!r.outcome(Axiom::CashAdditivity).unwrap().is_pass());
        for a in [Axiom::Monotonicity, Axiom::PositiveHomogeneity, Axiom::Subadditivity, Axiom::LawInvariance] {
            assert!(r.outcome(a).unwrap().is_pass(), "{a}");
        }
    }

    #[test]
    fn slopes_match_weight_sums() {
        for (spec, sum) in [
            (build_es1(0.025, 250).unwrap(), 1.0),
            (build_es4(0.025, 250, DEFAULT_XI).unwrap(), 1.080),
            (build_es6(0.025, 250, DEFAULT_XI).unwrap(), 1.167),
        ] {
            let s = check_cash_additivity_slope(&spec, 250).unwrap();
            assert!((s - spec.weight_sum()).abs() < 1e-12);
            assert!((s - sum).abs() < 5e-4);
        }
        let sq = FnEstimator::new("square", |x: &[f64]| x[0] * x[0]);
        assert!(matches!(check_cash_additivity_slope(&sq, 3), Err(RiskError::NotAffine { .. })));
    }

    #[test]
    fn extraction_round_trip_and_rejection() {
        let es3 = build_es3(0.025, 250).unwrap();
        let w = extract_comonotonic_weights(&es3, 250).unwrap();
        for (a, b) in w.as_slice().iter().zip(es3.weights()) {
            assert!((a - b).abs() < 1e-12);
        }
        let worst = FnEstimator::new("-min", |x: &[f64]| -x.iter().cloned().fold(f64::INFINITY, f64::min));
        let w = extract_comonotonic_weights(&worst, 5).unwrap();
        assert_eq!(w.as_slice(), &[1.0, 0.0, 0.0, 0.0, 0.0]);
        let ev = ExpVarEstimator::new(0.25).unwrap();
        assert!(matches!(extract_comonotonic_weights(&ev, 3), Err(RiskError::NotComonotonic(_))));
    }

    #[test]
    fn representation_checks() {
        let es1 = build_es1(0.025, 250).unwrap();
        let es2 = build_es2(0.025, 250).unwrap();
        let own = es1.to_weight_vector().unwrap();
        assert!(verify_representation(&es1, &own, 50, 3).unwrap().is_pass());
        let other = es2.to_weight_vector().unwrap();
        assert!(!verify_representation(&es1, &other, 50, 3).unwrap().is_pass());
        let mean = FnEstimator::new("-mean", |x: &[f64]| -x.iter().sum::<f64>() / x.len() as f64);
        assert!(verify_representation(&mean, &WeightVector::uniform(9).unwrap(), 50, 3).unwrap().is_pass());
    }

    #[test]
    fn report_serializes() {
        let g = GaussianPluginEs::new(0.01).unwrap();
        let r = check_all(&g, 2, 20, 1).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"status\":\"FAIL\""));
        let back: CoherenceReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}
