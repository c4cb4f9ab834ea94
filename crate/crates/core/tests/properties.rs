use proptest::prelude::*;

use riskbench::coherence::{check_cash_additivity_slope, extract_comonotonic_weights};
use riskbench::estimators::{
    build_es1, build_es2, build_es3, build_es4, build_es5, build_es6, build_spectral_weights,
    build_spectral_weights_alt, expectile_estimate, EsSpectrum, LinearSpectrum, RiskEstimator, DEFAULT_XI,
};
use riskbench::weights::OrderWeights;
use riskbench::{apply_l_estimator, apply_supremum, permutation_closure_oracle, Sample, SupremumCre, WeightVector};

fn monotone_weights(n: usize) -> impl Strategy<Value = WeightVector> {
    prop::collection::vec(0.0f64..1.0, n).prop_filter_map("all zero", |mut raw| {
        raw.sort_by(|a, b| b.total_cmp(a));
        let s: f64 = raw.iter().sum();
        if s <= 0.0 {
            return None;
        }
        WeightVector::monotone(raw.iter().map(|v| v / s).collect()).ok()
    })
}

fn vector(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3f64..1e3, n)
}

fn rho(w: &WeightVector, x: &[f64]) -> f64 {
    w.estimate(x).unwrap()
}

fn tol(scale: f64) -> f64 {
    1e-9 * (1.0 + scale)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn monotone_l_estimators_are_coherent(
        (w, x, y, bump) in (1usize..30).prop_flat_map(|n| (monotone_weights(n), vector(n), vector(n), prop::collection::vec(0.0f64..50.0, n))),
        m in -100.0f64..100.0,
        lambda in 0.0f64..20.0,
    ) {
        let s = max_abs(&x).max(max_abs(&y));
        let up: Vec<f64> = x.iter().zip(&bump).map(|(a, b)| a + b).collect();
        prop_assert!(rho(&w, &up) <= rho(&w, &x) + tol(s + 50.0));
        let shifted: Vec<f64> = x.iter().map(|v| v + m).collect();
        prop_assert!((rho(&w, &shifted) - (rho(&w, &x) - m)).abs() <= tol(s + 100.0));
        let scaled: Vec<f64> = x.iter().map(|v| lambda * v).collect();
        prop_assert!((rho(&w, &scaled) - lambda * rho(&w, &x)).abs() <= tol(20.0 * s));
        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        prop_assert!(rho(&w, &sum) <= rho(&w, &x) + rho(&w, &y) + tol(2.0 * s));
    }

    #[test]
    fn law_invariance_and_comonotonic_additivity(
        (w, x) in (1usize..30).prop_flat_map(|n| (monotone_weights(n), vector(n))),
        a in 0.1f64..5.0,
        c in -10.0f64..10.0,
        seed in any::<u64>(),
    ) {
        let mut perm = x.clone();
        let n = perm.len();
        let mut state = seed;
        for i in (1..n).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (state >> 33) as usize % (i + 1));
        }
        prop_assert_eq!(rho(&w, &x), rho(&w, &perm));
        let y: Vec<f64> = x.iter().map(|v| (a * v).max(c)).collect();
        let sum: Vec<f64> = x.iter().zip(&y).map(|(p, q)| p + q).collect();
        let s = max_abs(&x) * (1.0 + a);
        prop_assert!((rho(&w, &sum) - rho(&w, &x) - rho(&w, &y)).abs() <= tol(s));
    }

    #[test]
    fn supremum_dominates_candidates_and_matches_oracle(
        (cands, x) in (1usize..=6).prop_flat_map(|n| (prop::collection::vec(monotone_weights(n), 1..5), vector(n))),
    ) {
        let sup = SupremumCre::new(cands.clone()).unwrap();
        let s = Sample::new(x).unwrap();
        let v = apply_supremum(&sup, &s).unwrap();
        for c in &cands {
            prop_assert!(apply_l_estimator(c, &s).unwrap() <= v.value);
        }
        prop_assert_eq!(apply_l_estimator(&cands[v.argmax], &s).unwrap(), v.value);
        let o = permutation_closure_oracle(&sup, &s).unwrap();
        prop_assert!((o - v.value).abs() <= 1e-12 * (1.0 + o.abs()));
    }

    #[test]
    fn extraction_inverts_representation(w in (1usize..60).prop_flat_map(monotone_weights)) {
        let n = w.len();
        let back = extract_comonotonic_weights(&w, n).unwrap();
        for (a, b) in back.as_slice().iter().zip(w.as_slice()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn expectile_solves_its_equation(
        x in prop::collection::vec(-100.0f64..100.0, 1..40),
        alpha in 0.01f64..0.49,
        shift in -50.0f64..50.0,
    ) {
        let s = expectile_estimate(alpha, &x).unwrap();
        let scale = max_abs(&x);
        prop_assert!(s.residual(alpha, &x).abs() <= 1e-9 * (1.0 + scale));
        let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(s.expectile >= lo - 1e-9 && s.expectile <= hi + 1e-9);
        let shifted: Vec<f64> = x.iter().map(|v| v + shift).collect();
        let t = expectile_estimate(alpha, &shifted).unwrap();
        prop_assert!((t.expectile - s.expectile - shift).abs() <= 1e-9 * (1.0 + scale + shift.abs()));
        let via_weights = apply_l_estimator(&s.realized_weights, &Sample::new(x.clone()).unwrap()).unwrap();
        prop_assert!((via_weights - s.exp_var).abs() <= 1e-9 * (1.0 + scale));
    }

    #[test]
    fn expectile_is_monotone_in_the_sample(
        (x, bump) in (1usize..30).prop_flat_map(|n| (prop::collection::vec(-100.0f64..100.0, n), prop::collection::vec(0.0f64..10.0, n))),
        alpha in 0.01f64..0.49,
    ) {
        let up: Vec<f64> = x.iter().zip(&bump).map(|(a, b)| a + b).collect();
        let e0 = expectile_estimate(alpha, &x).unwrap().expectile;
        let e1 = expectile_estimate(alpha, &up).unwrap().expectile;
        prop_assert!(e1 >= e0 - 1e-9 * (1.0 + max_abs(&up)));
    }

    #[test]
    fn es_builders_are_well_formed(alpha in 0.01f64..0.2, n in 60usize..600) {
        let specs = [
            build_es1(alpha, n),
            build_es2(alpha, n),
            build_es3(alpha, n),
            build_es4(alpha, n, DEFAULT_XI),
            build_es5(alpha, n),
            build_es6(alpha, n, DEFAULT_XI),
        ];
        for (k, spec) in specs.into_iter().enumerate() {
            let Ok(spec) = spec else { continue };
            let w = spec.weights();
            prop_assert!(w.iter().all(|v| *v >= 0.0));
            prop_assert!(w.windows(2).all(|p| p[0] >= p[1]));
            if k < 3 {
                prop_assert!((spec.weight_sum() - 1.0).abs() <= 1e-12);
                prop_assert!(spec.is_cre);
            } else {
                prop_assert!(spec.weight_sum() > 1.0);
            }
            let slope = check_cash_additivity_slope(&spec, n).unwrap();
            prop_assert!((slope - spec.weight_sum()).abs() <= 1e-12);
        }
    }

    #[test]
    fn spectral_builders_stay_in_the_simplex(alpha in 0.005f64..1.0, n in 1usize..400) {
        let es = EsSpectrum::new(alpha).unwrap();
        let mut built = vec![build_spectral_weights(&es, n).unwrap(), build_spectral_weights(&LinearSpectrum, n).unwrap()];
        // The pointwise rule needs a grid point inside the tail.
        if alpha * n as f64 >= 1.0 {
            built.push(build_spectral_weights_alt(&es, n).unwrap());
        } else {
            prop_assert!(build_spectral_weights_alt(&es, n).is_err());
        }
        for w in built {
            prop_assert!((w.weight_sum() - 1.0).abs() <= 1e-12);
            prop_assert!(w.is_monotone());
        }
    }
}
