use std::collections::HashSet;

use hawk_core::{multi_subsample, CoreError};
use proptest::prelude::*;

fn labels(honest: usize, cheaters: usize) -> Vec<bool> {
    let mut v = vec![false; honest];
    v.extend(vec![true; cheaters]);
    v
}

#[test]
fn nine_to_one_gives_nine_disjoint_balanced_sets() {
    let y = labels(900, 100);
    let sets = multi_subsample(&y, 3).unwrap();
    assert_eq!(sets.len(), 9);
    let mut seen = HashSet::new();
    for s in &sets {
        assert_eq!(s.cheaters.len(), 100);
        assert_eq!(s.honest.len(), 100);
        assert!(s.cheaters.iter().all(|&i| y[i]));
        assert!(s.honest.iter().all(|&i| !y[i]));
        for &i in &s.honest {
            assert!(seen.insert(i), "honest sample {i} reused");
        }
    }
    assert_eq!(seen.len(), 900);
}

#[test]
fn one_class_is_rejected() {
    assert!(matches!(multi_subsample(&labels(10, 0), 0), Err(CoreError::DegenerateClass(_))));
}

#[test]
fn deterministic_per_seed() {
    let y = labels(300, 40);
    assert_eq!(multi_subsample(&y, 8).unwrap(), multi_subsample(&y, 8).unwrap());
    assert_ne!(multi_subsample(&y, 8).unwrap(), multi_subsample(&y, 9).unwrap());
}

proptest! {
    #[test]
    fn sets_are_balanced_and_valid(honest in 1usize..400, cheaters in 1usize..60, seed in any::<u64>()) {
        let y = labels(honest, cheaters);
        let sets = multi_subsample(&y, seed).unwrap();
        prop_assert!((1..=15).contains(&sets.len()));
        let minor = honest.min(cheaters);
        for s in &sets {
            prop_assert_eq!(s.honest.len(), minor);
            prop_assert_eq!(s.cheaters.len(), minor);
            let uniq: HashSet<_> = s.indices().into_iter().collect();
            prop_assert_eq!(uniq.len(), s.len());
        }
    }
}
