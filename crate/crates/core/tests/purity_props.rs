use std::collections::BTreeSet;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use proptest::prelude::*;
use toric_bloch::bloch::{coefficients, toric_angles, two_level_amplitudes, BlochAngles};
use toric_bloch::lattice::{
    block_sigma, subset_combinatorics, Link, RegionCombinatorics, TorusLattice,
};
use toric_bloch::oracle::oracle_purity;
use toric_bloch::precision::{ldexp, to_f64, Hp, PrecisionPolicy};
use toric_bloch::purity::{purity_block, purity_general};

fn angles() -> impl Strategy<Value = BlochAngles> {
    (0.0..=PI, 0.0..TAU).prop_map(|(t, p)| BlochAngles::new(t, p).unwrap())
}

fn valid_block() -> impl Strategy<Value = (usize, usize)> {
    (3usize..=12).prop_flat_map(|k| (Just(k), 1..=k - 2))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn block_form_specializes_general_form((k, l) in valid_block(), a in angles()) {
        let policy = PrecisionPolicy::default();
        let comb = RegionCombinatorics::from_sigma(&block_sigma(k, l).unwrap()).unwrap();
        let block = purity_block(k, l, &a, &policy).unwrap();
        let general = purity_general(&comb, &a, &policy).unwrap();
        let hp = Hp::new(&policy);
        let gap = to_f64(&hp.sub(block.purity(), general.purity())).abs();
        prop_assert!(gap <= ldexp(1.0, -(policy.bits() as i64 - 16)), "gap {gap:e}");
    }

    #[test]
    fn purity_is_a_probability((k, l) in valid_block(), a in angles()) {
        let v = purity_block(k, l, &a, &PrecisionPolicy::default()).unwrap();
        prop_assert!(v.purity_f64() > 0.0 && v.purity_f64() <= 1.0);
        prop_assert!(v.renyi2_f64() >= 0.0);
    }

    #[test]
    fn azimuth_enters_through_cos_phi((k, l) in valid_block(), a in angles()) {
        let policy = PrecisionPolicy::default();
        let mirrored = a.with_phi(TAU - a.phi()).unwrap();
        let s = purity_block(k, l, &a, &policy).unwrap().renyi2_f64();
        let m = purity_block(k, l, &mirrored, &policy).unwrap().renyi2_f64();
        // 2π − φ is itself rounded, so equality holds to input resolution.
        prop_assert!((s - m).abs() <= 1e-14 * s.max(1.0));
    }

    #[test]
    fn toric_point_is_area_law_minus_one((k, l) in valid_block()) {
        let policy = PrecisionPolicy::default();
        let v = purity_block(k, l, &toric_angles((k * k - 1) as u64), &policy).unwrap();
        let expected = (4 * l) as f64 - 1.0;
        prop_assert!((v.renyi2_f64() - expected).abs() <= 1e-12, "{} vs {expected}", v.renyi2_f64());
    }

    #[test]
    fn coefficient_reconstruction(log2_g in 2u64..=40, a in angles()) {
        let g = (log2_g as f64).exp2();
        let c = coefficients(&a, log2_g).unwrap();
        let (t0, t1) = two_level_amplitudes(&a);
        let r0: Complex64 = c.a + c.b / g.sqrt();
        let r1: Complex64 = c.b * (1.0 - 1.0 / g).sqrt();
        prop_assert!((r0 - t0).norm() <= 1e-12 && (r1 - t1).norm() <= 1e-12);
    }

    #[test]
    fn toric_coefficients_are_pure_b(log2_g in 2u64..=60) {
        let c = coefficients(&toric_angles(log2_g), log2_g).unwrap();
        prop_assert!(c.a.norm() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closed_form_matches_brute_force(
        (k, idx) in (2usize..=3).prop_flat_map(|k| {
            (Just(k), prop::collection::btree_set(0..2 * k * k, 1..=8usize.min(2 * k * k)))
        }),
        a in angles(),
    ) {
        let subset: BTreeSet<Link> = idx.into_iter().map(|i| Link::from_index(i, k)).collect();
        let comb = subset_combinatorics(&TorusLattice::new(k).unwrap(), &subset).unwrap();
        let closed = purity_general(&comb, &a, &PrecisionPolicy::default()).unwrap().purity_f64();
        let brute = oracle_purity(k, &subset, &a).unwrap();
        prop_assert!((closed - brute).abs() <= 1e-10, "{closed} vs {brute}");
    }
}
