mod common;

use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn successors_match_brute_force(seed in any::<u64>()) {
        if let Err(e) = common::transition_oracle(seed) {
            prop_assert!(false, "{}", e);
        }
    }

    #[test]
    fn tiny_histories_match_exhaustive_search(seed in any::<u64>()) {
        if let Err(e) = common::tiny_oracle(seed) {
            prop_assert!(false, "{}", e);
        }
    }
}

#[test]
fn brute_mappings_agree_with_lazy_enumeration() {
    use storyreader::reader::enumerate_mappings;
    for len in 1..=3 {
        for horizon in 0..=6 {
            for next in [vec![], vec![(0, 1)], vec![(1, 2)], vec![(0, 1), (1, 2)]] {
                if next.iter().any(|&(_, s1)| s1 >= len) {
                    continue;
                }
                let lazy: Vec<_> = enumerate_mappings(len, &next, horizon).collect();
                assert_eq!(lazy, common::brute_mappings(len, &next, horizon), "len {len} horizon {horizon} next {next:?}");
            }
        }
    }
}
