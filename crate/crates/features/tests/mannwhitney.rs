use hawk_features::mannwhitney::rank_columns;
use hawk_features::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Two-sided permutation p-value for |U - n0 n1 / 2|.
fn permutation_p(x0: &[f64], x1: &[f64], reps: usize, seed: u64) -> f64 {
    let u_of = |a: &[f64], b: &[f64]| {
        let mut u = 0.0;
        for y in b {
            for x in a {
                u += if y > x {
                    1.0
                } else if y == x {
                    0.5
                } else {
                    0.0
                };
            }
        }
        u
    };
    let centre = x0.len() as f64 * x1.len() as f64 / 2.0;
    let obs = (u_of(x0, x1) - centre).abs();
    let mut pool: Vec<f64> = x0.iter().chain(x1).copied().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0;
    for _ in 0..reps {
        pool.shuffle(&mut rng);
        let (a, b) = pool.split_at(x0.len());
        if (u_of(a, b) - centre).abs() >= obs - 1e-9 {
            hits += 1;
        }
    }
    hits as f64 / reps as f64
}

#[test]
fn identical_samples_give_p_near_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x: Vec<f64> = (0..50).map(|_| rng.random_range(0.0..1.0)).collect();
    let t = mann_whitney(&x, &x).unwrap();
    assert!(t.p >= 0.9, "{}", t.p);
    assert_eq!(t.u, 1250.0);
}

#[test]
fn same_distribution_agrees_with_permutation_test() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..4 {
        let shift = case as f64 * 0.15;
        let x0: Vec<f64> = (0..50).map(|_| rng.random_range(0.0..1.0)).collect();
        let x1: Vec<f64> = (0..50).map(|_| (rng.random_range(0.0..1.0f64) + shift).floor_to(0.1)).collect();
        let t = mann_whitney(&x0, &x1).unwrap();
        let perm = permutation_p(&x0, &x1, 4000, case);
        assert!((t.p - perm).abs() < 0.03, "case {case}: normal {} vs permutation {perm}", t.p);
    }
}

trait FloorTo {
    fn floor_to(self, step: f64) -> f64;
}

impl FloorTo for f64 {
    fn floor_to(self, step: f64) -> f64 {
        (self / step).floor() * step
    }
}

#[test]
fn disjoint_supports_are_highly_significant() {
    let x0: Vec<f64> = (0..20).map(|i| i as f64 * 0.01).collect();
    let x1: Vec<f64> = (0..20).map(|i| 5.0 + i as f64).collect();
    let t = mann_whitney(&x1, &x0).unwrap();
    assert_eq!(t.u, 0.0);
    assert!(t.p < 1e-6);
}

fn dataset(seed: u64, n: usize) -> Vec<(StructuredVector, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let y = i % 2 == 0;
            let values: Vec<f64> = (0..NUM_FEATURES)
                .map(|j| rng.random_range(0.0..1.0) + if y { j as f64 * 0.02 } else { 0.0 })
                .collect();
            let mask: Vec<bool> = (0..NUM_FEATURES).map(|_| rng.random_bool(0.1)).collect();
            let values = values.iter().zip(&mask).map(|(v, m)| if *m { 0.0 } else { *v }).collect();
            (StructuredVector::new(values, mask).unwrap(), y)
        })
        .collect()
}

#[test]
fn ranking_is_ascending_and_swapping_labels_mirrors_u() {
    let data = dataset(5, 80);
    let r = rank_features_mannwhitney(&data).unwrap();
    assert_eq!(r.len(), 28);
    assert!(r.windows(2).all(|w| w[0].p <= w[1].p));
    // the strongly shifted late features lead the ranking
    for f in &r[..5] {
        assert!(structured::feature_index(&f.feature).unwrap() >= 14, "{}", f.feature);
    }
    let swapped: Vec<_> = data.iter().map(|(v, y)| (v.clone(), !y)).collect();
    let s = rank_features_mannwhitney(&swapped).unwrap();
    for a in &r {
        let b = s.iter().find(|b| b.feature == a.feature).unwrap();
        assert_eq!(a.p, b.p);
        assert_eq!(a.u, (a.n_honest * a.n_cheater) as f64 - b.u);
    }
}

#[test]
fn masked_entries_are_excluded() {
    let data = dataset(9, 40);
    let r = rank_features_mannwhitney(&data).unwrap();
    for f in &r {
        let j = FEATURE_NAMES.iter().position(|n| *n == f.feature).unwrap();
        let kept = data.iter().filter(|(v, _)| !v.mask[j]).count();
        assert_eq!(f.n_honest + f.n_cheater, kept);
    }
}

#[test]
fn empty_class_is_an_error() {
    let data: Vec<_> = dataset(1, 10).into_iter().map(|(v, _)| (v, false)).collect();
    assert!(matches!(rank_features_mannwhitney(&data), Err(FeatureError::DegenerateClass(_))));
}

proptest! {
    #[test]
    fn monotone_transforms_do_not_change_the_ranking(seed in any::<u64>(), a in 0.1f64..5.0, b in -3.0f64..3.0) {
        let data = dataset(seed, 30);
        let r = rank_features_mannwhitney(&data).unwrap();
        let names: Vec<&str> = FEATURE_NAMES.to_vec();
        let transformed: Vec<(Vec<f64>, Vec<bool>, bool)> = data
            .iter()
            .map(|(v, y)| (v.values.iter().enumerate().map(|(j, x)| if j % 2 == 0 { (a * x + b).exp() } else { x.powi(3) * a - b }).collect(), v.mask.clone(), *y))
            .collect();
        let rows: Vec<(&[f64], &[bool], bool)> = transformed.iter().map(|(v, m, y)| (v.as_slice(), m.as_slice(), *y)).collect();
        let t = rank_columns(&names, &rows).unwrap();
        prop_assert_eq!(r.len(), t.len());
        for (x, y) in r.iter().zip(&t) {
            prop_assert_eq!(&x.feature, &y.feature);
            prop_assert_eq!(x.u, y.u);
            prop_assert_eq!(x.p, y.p);
        }
    }
}
