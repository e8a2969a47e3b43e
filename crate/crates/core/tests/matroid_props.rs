mod common;

use common::*;
use polymat::{helgason_expand, BlockCounts, Polymatroid, RankVector};
use proptest::prelude::*;
use rand::Rng;

/// Integer polymatroid on `n` elements with all ranks at most `cap`.
fn small_base(seed: u64, n: usize, cap: i64) -> Polymatroid<i64> {
    let mut r = rng(seed);
    let p = random_int_polymatroid(&mut r, n);
    Polymatroid::validate(p.rank_vector().map(|v| v.min(cap)), 0.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn circuit_relation_is_an_equivalence(seed in any::<u64>(), n in 1usize..=8) {
        let m = random_matroid(&mut rng(seed), n);
        prop_assert_eq!(check_circuit_relation(&m), Ok(()));
    }

    #[test]
    fn helgason_matches_iterated_splitting(seed in any::<u64>(), n in 1usize..=3) {
        let base = small_base(seed, n, 3);
        prop_assert_eq!(check_helgason_against_splits(&base), Ok(()));
    }

    #[test]
    fn expansion_has_base_as_factor(seed in any::<u64>(), n in 1usize..=5) {
        let base = random_int_polymatroid(&mut rng(seed), n);
        prop_assert_eq!(check_expansion_factor(&base), Ok(()));
        prop_assert_eq!(check_expansion_factor(&base.tighten()), Ok(()));
    }

    #[test]
    fn dense_expansion_is_a_matroid(seed in any::<u64>(), n in 1usize..=3) {
        let base = small_base(seed, n, 3);
        if let Ok(dense) = helgason_expand(&base).unwrap().to_dense() {
            prop_assert!(polymat::is_matroid(&dense).unwrap());
            prop_assert!(Polymatroid::validate(dense.rank_vector().clone(), 0.0).is_ok());
        }
    }

    #[test]
    fn named_and_counted_selections_agree(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let base = random_int_polymatroid(&mut r, n);
        let e = helgason_expand(&base).unwrap();
        let mut named = Vec::new();
        let mut counted = Vec::new();
        for (b, &size) in e.block_sizes().iter().enumerate() {
            let k = r.gen_range(0..=size);
            counted.push(format!("{}:{k}", e.blocks().label(b)));
            // Any k distinct elements of the block.
            let start = r.gen_range(0..=(size - k));
            named.extend((1..=k).map(|j| e.element_label(b, start + j)));
        }
        let a = e.parse_selection(&named.join(",")).unwrap();
        let c = e.parse_selection(&counted.join(",")).unwrap();
        prop_assert_eq!(&a, &c);
        prop_assert_eq!(e.rank(&a).unwrap(), e.rank(&c).unwrap());
    }
}

#[test]
fn matroid_rank_from_counts_is_symmetric_within_blocks() {
    // Exhaustive over a fixed base with block sizes 2, 1, 2.
    let g = letters(3);
    let rank = RankVector::from_fn(g, |s| match s.bits() {
        0 => 0,
        0b001 | 0b100 => 2,
        0b010 => 1,
        0b011 | 0b110 => 2,
        _ => 3,
    });
    let base = Polymatroid::validate(rank, 0.0).unwrap();
    assert_eq!(check_helgason_against_splits(&base), Ok(()));
    let e = helgason_expand(&base).unwrap();
    assert_eq!(e.rank(&BlockCounts(vec![2, 1, 2])).unwrap(), 3);
}
