//! VaR and ES at 2.5% of the reference distributions, one day and ten days.

use riskbench::distributions::{horizon_true_risk, DistributionSpec, OracleConfig};

fn main() -> riskbench::Result<()> {
    let oracle = OracleConfig { k: 2_000_000, seed: 7 };
    for d in DistributionSpec::reference_set() {
        let one = horizon_true_risk(&d, 1, 0.025, &oracle)?;
        let ten = horizon_true_risk(&d, 10, 0.025, &oracle)?;
        println!(
            "{:<16} VaR {:>7.4}  ES {:>7.4} (se {:.4})   10-day VaR {:>7.4}  ES {:>7.4} (se {:.4})",
            d.label(),
            one.var_alpha,
            one.es_alpha,
            one.standard_error,
            ten.var_alpha,
            ten.es_alpha,
            ten.standard_error
        );
    }
    Ok(())
}
