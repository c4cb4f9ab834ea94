//! A supremum of L-estimators, checked against the brute-force permutation
//! oracle on a small sample.

use riskbench::{apply_supremum, permutation_closure_oracle, Sample, SupremumCre, WeightVector};

fn main() -> riskbench::Result<()> {
    let sup = SupremumCre::new(vec![
        WeightVector::monotone(vec![0.4, 0.4, 0.2, 0.0, 0.0])?,
        WeightVector::monotone(vec![0.6, 0.1, 0.1, 0.1, 0.1])?,
        WeightVector::uniform(5)?,
    ])?;
    for x in [vec![1.0, -2.0, 0.5, 3.0, -0.5], vec![-10.0, 0.0, 1.0, 1.0, 1.0], vec![-1.0; 5], vec![2.0, 4.0, 6.0, 8.0, 10.0]] {
        let s = Sample::new(x.clone())?;
        let v = apply_supremum(&sup, &s)?;
        let oracle = permutation_closure_oracle(&sup, &s)?;
        println!("{x:?}: value {:.4} (candidate {}), oracle {oracle:.4}", v.value, v.argmax);
    }
    Ok(())
}
