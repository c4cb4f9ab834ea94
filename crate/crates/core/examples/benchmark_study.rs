//! A reduced benchmark: Normal and one NIG law, 5000 replications.

use riskbench::bench::{format_percent_table, run_study, BenchConfig};
use riskbench::distributions::DistributionSpec;

fn main() -> riskbench::Result<()> {
    let config = BenchConfig {
        k: 5000,
        oracle_k: 2_000_000,
        distributions: vec![DistributionSpec::normal(0.0, 1.0)?, DistributionSpec::nig(0.4, -0.22, 0.0, 1.0)?],
        ..BenchConfig::default()
    };
    let table = run_study(&config)?;
    print!("{}", format_percent_table(&table)?);
    Ok(())
}
