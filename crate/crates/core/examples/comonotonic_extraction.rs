//! Recovers the weight vector of a black-box comonotonic estimator from
//! probes, and rejects a supremum of two of them.

use riskbench::coherence::extract_comonotonic_weights;
use riskbench::estimators::{build_es3, FnEstimator};
use riskbench::{SupremumCre, WeightVector};

fn main() -> riskbench::Result<()> {
    let es3 = build_es3(0.025, 250)?;
    let hidden = es3.clone();
    let black_box = FnEstimator::new("hidden", move |x: &[f64]| {
        let mut s = x.to_vec();
        s.sort_by(f64::total_cmp);
        hidden.evaluate_sorted(&s)
    });
    let w = extract_comonotonic_weights(&black_box, 250)?;
    let max_err = w.as_slice().iter().zip(es3.weights()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("recovered {} weights, max error {max_err:.2e}", w.as_slice().len());

    // Partial sums cross, so neither candidate dominates the other.
    let sup = SupremumCre::new(vec![
        WeightVector::monotone(vec![0.4, 0.4, 0.2, 0.0, 0.0])?,
        WeightVector::monotone(vec![0.6, 0.1, 0.1, 0.1, 0.1])?,
    ])?;
    match extract_comonotonic_weights(&sup, 5) {
        Ok(_) => println!("supremum looked comonotonic"),
        Err(e) => println!("supremum: {e}"),
    }
    Ok(())
}
