use hawk_learn::{ClassicClassifier, ClassicConfig, ClassicKind, Checkpoint, LearnError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand::Rng;

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.random_range(f64::EPSILON..1.0);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Two unit-variance blobs in d=5, centres 3 sigma apart along every axis.
fn blobs(n: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<bool>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift = 3.0;
    let mut x = Vec::new();
    let mut y = Vec::new();
    for i in 0..n {
        let l = i % 2 == 1;
        x.push((0..5).map(|_| gauss(&mut rng) + if l { shift } else { 0.0 }).collect());
        y.push(l);
    }
    (x, y)
}

fn accuracy(c: &ClassicClassifier, x: &[Vec<f64>], y: &[bool]) -> f64 {
    x.iter().zip(y).filter(|(r, l)| c.decide(r) == **l).count() as f64 / y.len() as f64
}

#[test]
fn every_kind_separates_blobs() {
    let (x, y) = blobs(200, 1);
    let (xt, yt) = blobs(200, 2);
    let cfg = ClassicConfig::default();
    for kind in ClassicKind::ALL {
        let c = ClassicClassifier::fit(kind, &cfg, &x, &y).unwrap();
        let train = accuracy(&c, &x, &y);
        let test = accuracy(&c, &xt, &yt);
        assert!(train >= 0.95, "{kind} train {train}");
        assert!(test >= 0.95, "{kind} test {test}");
        for r in &xt {
            let s = c.score(r);
            assert!((0.0..=1.0).contains(&s));
        }
    }
}

#[test]
fn logreg_fits_separable_data_exactly() {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for i in 0..40 {
        let t = i as f64 / 4.0;
        x.push(vec![t, 1.0 + (i % 5) as f64 * 0.3]);
        y.push(false);
        x.push(vec![t, -1.0 - (i % 7) as f64 * 0.2]);
        y.push(true);
    }
    let c = ClassicClassifier::fit(ClassicKind::Logreg, &ClassicConfig::default(), &x, &y).unwrap();
    assert_eq!(accuracy(&c, &x, &y), 1.0);
}

#[test]
fn naive_bayes_is_undecided_on_identical_classes() {
    let (x, _) = blobs(100, 3);
    let mut xs = x.clone();
    xs.extend(x.iter().cloned());
    let y: Vec<bool> = (0..200).map(|i| i >= 100).collect();
    let c = ClassicClassifier::fit(ClassicKind::GaussianNb, &ClassicConfig::default(), &xs, &y).unwrap();
    for r in &x {
        assert!((c.score(r) - 0.5).abs() < 0.05);
    }
}

#[test]
fn regularized_qda_handles_rank_deficient_input() {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for i in 0..30 {
        let t = i as f64 / 10.0;
        x.push(vec![t, 2.0 * t, 0.0]);
        y.push(false);
        x.push(vec![t + 5.0, 2.0 * t + 5.0, 0.0]);
        y.push(true);
    }
    let c = ClassicClassifier::fit(ClassicKind::Qda, &ClassicConfig::default(), &x, &y).unwrap();
    assert!(c.score(&x[0]).is_finite());
}

#[test]
fn gaussian_kinds_need_two_samples_per_class() {
    let x = vec![vec![0.0], vec![1.0], vec![2.0]];
    let y = vec![false, false, true];
    for k in [ClassicKind::GaussianNb, ClassicKind::Qda] {
        assert!(matches!(ClassicClassifier::fit(k, &ClassicConfig::default(), &x, &y), Err(LearnError::DegenerateClass(_))));
    }
}

#[test]
fn fits_are_deterministic_and_round_trip() {
    let (x, y) = blobs(80, 5);
    let cfg = ClassicConfig::default();
    for kind in ClassicKind::ALL {
        let a = ClassicClassifier::fit(kind, &cfg, &x, &y).unwrap();
        let b = ClassicClassifier::fit(kind, &cfg, &x, &y).unwrap();
        assert_eq!(a, b, "{kind}");
        let json = Checkpoint::new(kind.name(), cfg.clone(), a.clone()).to_json().unwrap();
        let back: Checkpoint<ClassicConfig, ClassicClassifier> = Checkpoint::from_json(&json, Some(kind.name())).unwrap();
        assert_eq!(back.parameters, a);
        for r in &x {
            assert_eq!(back.parameters.score(r), a.score(r));
        }
    }
}

#[test]
fn checkpoint_rejects_wrong_kind_and_version() {
    let c = Checkpoint::new("forest", 1u8, vec![1.0f64]);
    let json = c.to_json().unwrap();
    assert!(Checkpoint::<u8, Vec<f64>>::from_json(&json, Some("encoder")).is_err());
    let bumped = json.replace("\"schemaVersion\":1", "\"schemaVersion\":99");
    assert!(Checkpoint::<u8, Vec<f64>>::from_json(&bumped, None).is_err());
}
