//! Axiom checks on a coherent estimator, an inflated one and the Gaussian
//! plug-in, with a replay of the first witness found.

use riskbench::coherence::check_all;
use riskbench::estimators::{build_es2, build_es4, GaussianPluginEs, DEFAULT_XI};
use riskbench::RiskEstimator;

fn main() -> riskbench::Result<()> {
    let es2 = build_es2(0.025, 250)?;
    let es4 = build_es4(0.025, 250, DEFAULT_XI)?;
    let gaussian = GaussianPluginEs::new(0.025)?;
    let estimators: [&dyn RiskEstimator; 3] = [&es2, &es4, &gaussian];
    for est in estimators {
        let report = check_all(est, 250, 2000, 42)?;
        print!("{report}");
        if let Some(w) = report.axioms.iter().find_map(|e| e.outcome.witness()) {
            let again = w.replay(est)?;
            println!("  replayed {}: defect {:.3e}, still a violation: {}", w.axiom, again.defect, again.is_violation());
        }
        println!();
    }
    Ok(())
}
