use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use toric_bloch::bloch::{toric_angles, BlochAngles};
use toric_bloch::precision::{ldexp, to_f64, Hp, PrecisionPolicy};
use toric_bloch::purity::BlockEvaluator;
use toric_bloch::topo::{approx_large_k, approx_large_l, extract_sgamma, FitMode};

#[test]
fn exact_value_stays_inside_asymptotic_envelope() {
    let policy = PrecisionPolicy::default();
    let (k, l) = (30usize, 6usize);
    let evaluator = BlockEvaluator::new(k, l, &policy).unwrap();
    let hp = Hp::new(&policy);
    let envelope = ldexp(1.0, -((k * k) as i64) + (l * l + 4 * l + 8) as i64)
        + ldexp(1.0, -((l * l) as i64) + 2);
    for i in 0..32 {
        let a = BlochAngles::new(PI * i as f64 / 31.0, 0.0).unwrap();
        let exact = evaluator.evaluate(&a).unwrap();
        let approx = approx_large_l(l, &a, &policy);
        let rel = hp.div(&hp.sub(exact.purity(), approx.purity()), exact.purity());
        assert!(to_f64(&rel).abs() <= envelope, "theta index {i}: {}", to_f64(&rel));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dropped_middle_term_bounds_the_gap(l in 1usize..=12, theta in 0.0..=PI, phi in 0.0..TAU) {
        let policy = PrecisionPolicy::default();
        let a = BlochAngles::new(theta, phi).unwrap();
        let hp = Hp::new(&policy);
        let gap = hp.sub(
            approx_large_k(l, &a, &policy).purity(),
            approx_large_l(l, &a, &policy).purity(),
        );
        let bound = ldexp(1.0, -((l * l + 4 * l) as i64) + 2);
        prop_assert!(to_f64(&gap).abs() <= bound);
    }

    #[test]
    fn toric_fit_is_exact(
        (k, ls) in (5usize..=14).prop_flat_map(|k| {
            (Just(k), prop::collection::btree_set(1..=k - 2, 2..=(k - 2).min(5)))
        })
    ) {
        let ls: Vec<usize> = ls.into_iter().collect();
        let fit = extract_sgamma(
            k,
            &toric_angles((k * k - 1) as u64),
            &ls,
            FitMode::TwoTerm,
            &PrecisionPolicy::default(),
        )
        .unwrap();
        prop_assert!(fit.residual <= 1e-9);
        prop_assert!((fit.alpha - 4.0).abs() <= 1e-9 && (fit.s_gamma + 1.0).abs() <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sgamma_moves_continuously(phi in 0.0..TAU) {
        let policy = PrecisionPolicy::default();
        let e1 = BlockEvaluator::new(4, 1, &policy).unwrap();
        let e2 = BlockEvaluator::new(4, 2, &policy).unwrap();
        let theta0 = toric_angles(15).theta();
        let s_gamma = |t: f64| {
            let a = BlochAngles::new(t, phi).unwrap();
            2.0 * e1.evaluate(&a).unwrap().renyi2_f64() - e2.evaluate(&a).unwrap().renyi2_f64()
        };
        let grid: Vec<f64> = (-40..=1).map(|j| theta0 + 0.01 * j as f64).collect();
        let values: Vec<f64> = grid.iter().map(|&t| s_gamma(t)).collect();
        for w in values.windows(2) {
            prop_assert!((w[1] - w[0]).abs() < 0.1);
        }
    }
}
