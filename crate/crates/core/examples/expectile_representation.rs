//! The empirical expectile as a sample-dependent L-estimator, and why the
//! probe-based weight extraction rejects it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use riskbench::coherence::extract_comonotonic_weights;
use riskbench::distributions::DistributionSpec;
use riskbench::estimators::{expectile_estimate, ExpVarEstimator};
use riskbench::weights::OrderWeights;

fn main() -> riskbench::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let t5 = DistributionSpec::student_t(5.0)?;
    let x: Vec<f64> = (0..250).map(|_| t5.sample(&mut rng)).collect();

    let alpha = 0.00145;
    let s = expectile_estimate(alpha, &x)?;
    println!("expectile {:.6}, ExpVaR {:.6}, n* = {}", s.expectile, s.exp_var, s.n_star);
    println!("residual {:.3e}", s.residual(alpha, &x));
    let w = s.realized_weights.weights();
    println!("realized weights: a_1 = {:.5}, a_n* = {:.5}, a_n = {:.5}", w[0], w[s.n_star - 1], w[w.len() - 1]);

    match extract_comonotonic_weights(&ExpVarEstimator::new(alpha)?, 250) {
        Ok(_) => println!("extraction unexpectedly succeeded"),
        Err(e) => println!("extraction: {e}"),
    }
    Ok(())
}
