use std::collections::BTreeSet;

use proptest::prelude::*;
use toric_bloch::lattice::{
    block_sigma, enumerate_block_links, subset_combinatorics, Link, LinkMask,
    RegionCombinatorics, TorusLattice,
};
use toric_bloch::oracle::enumerated_combinatorics;

fn valid_block() -> impl Strategy<Value = (usize, usize)> {
    (3usize..=14).prop_flat_map(|k| (Just(k), 1..=k - 2))
}

fn subset_of(k: usize) -> impl Strategy<Value = BTreeSet<Link>> {
    prop::collection::btree_set(0..2 * k * k, 0..=2 * k * k)
        .prop_map(move |idx| idx.into_iter().map(|i| Link::from_index(i, k)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn block_rank_matches_star_counts((k, l) in valid_block()) {
        let lattice = TorusLattice::new(k).unwrap();
        let region = enumerate_block_links(k, l).unwrap();
        prop_assert_eq!(region.links.len(), 2 * l * l + 2 * l);
        let by_rank = subset_combinatorics(&lattice, &region.links).unwrap();
        let by_count = RegionCombinatorics::from_sigma(&block_sigma(k, l).unwrap()).unwrap();
        prop_assert_eq!(by_rank, by_count);
    }

    #[test]
    fn stars_multiply_to_identity(k in 2usize..=16) {
        let lattice = TorusLattice::new(k).unwrap();
        let mut acc = LinkMask::zeros(lattice.n_links());
        for s in 0..lattice.n_stars() {
            let (x, y) = lattice.vertex(s);
            acc.xor_assign(&lattice.star_mask(x, y));
        }
        prop_assert!(acc.is_zero());
    }

    #[test]
    fn normalization_exponent_is_consistent(
        (k, subset) in (2usize..=7).prop_flat_map(|k| (Just(k), subset_of(k)))
    ) {
        let comb = subset_combinatorics(&TorusLattice::new(k).unwrap(), &subset).unwrap();
        prop_assert_eq!(comb.log2_g, (k * k - 1) as u64);
        prop_assert_eq!(comb.log2_f, comb.log2_g - comb.log2_db);
        prop_assert!(comb.log2_da <= comb.log2_g && comb.log2_db <= comb.log2_g);
    }

    #[test]
    fn rank_exponents_match_enumeration(
        (k, subset) in (2usize..=3).prop_flat_map(|k| (Just(k), subset_of(k)))
    ) {
        let comb = subset_combinatorics(&TorusLattice::new(k).unwrap(), &subset).unwrap();
        prop_assert_eq!(comb, enumerated_combinatorics(k, &subset).unwrap());
    }
}
