//! Non-zero weights of the interpolated VaR and the six ES estimators at
//! `alpha = 2.5%`, `n = 250`.

use riskbench::estimators::{build_var_interp_1pct, EstimatorId};
use riskbench::LEstimatorSpec;

fn main() -> riskbench::Result<()> {
    let mut specs = vec![build_var_interp_1pct(250)?];
    for id in EstimatorId::ES_ALL {
        specs.push(LEstimatorSpec::build(id, 0.025, 250)?);
    }
    for s in &specs {
        let support = s.weights().iter().rposition(|&w| w > 0.0).map_or(0, |i| i + 1);
        let shown: Vec<String> = s.weights()[..support].iter().map(|w| format!("{w:.4}")).collect();
        println!("{:<6} sum = {:.4}  cre = {:<5}  [{}]", s.label(), s.weight_sum(), s.is_cre, shown.join(", "));
    }
    Ok(())
}
