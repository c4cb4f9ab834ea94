//! Uniform bound, partial-integral deviations and empirical convergence of
//! the integral and pointwise discretisations of the ES spectrum.

use riskbench::consistency::{
    check_partial_integrals, check_uniform_bound, default_t_grid, empirical_consistency, Builder,
    SpectrumApproximation,
};
use riskbench::distributions::DistributionSpec;
use riskbench::estimators::EsSpectrum;

fn main() -> riskbench::Result<()> {
    let es = EsSpectrum::new(0.025)?;
    let ns = [100, 1000, 10_000, 100_000];
    let normal = DistributionSpec::normal(0.0, 1.0)?;
    for builder in [Builder::Integral, Builder::Alternative] {
        let approx = SpectrumApproximation::new(&es, builder);
        let bound = check_uniform_bound(&approx, &ns)?;
        println!("{builder}: max n a_i = {:.3} (sup phi = {})", bound.bound, bound.spectrum_bound);
        for d in check_partial_integrals(&approx, &default_t_grid(), &ns)? {
            println!("  n = {:>6}  partial-integral deviation {:.2e}", d.n, d.deviation);
        }
        for r in empirical_consistency(&normal, &approx, 0.025, &ns, 100, 11)? {
            println!("  n = {:>6}  median |error| {:.4}  IQR {:.4}", r.n, r.median_abs_error, r.iqr());
        }
    }
    Ok(())
}
