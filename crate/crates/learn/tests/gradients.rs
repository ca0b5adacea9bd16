use hawk_learn::gradcheck::{
    check_attention, check_dense, check_dense_sigmoid_bce, check_lstm, grad_check, max_relative_error, DEFAULT_EPS,
};
use hawk_learn::{Activation, BinaryNet, ClassWeights, EncoderConfig, SequenceEncoder};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn dense_sigmoid_bce_matches_finite_differences() {
    for seed in 0..20 {
        for y in [false, true] {
            let e = check_dense_sigmoid_bce(6, y, ClassWeights::default(), seed);
            assert!(e < 1e-6, "seed {seed} y {y}: {e}");
        }
    }
}

#[test]
fn dense_activations_match_finite_differences() {
    for act in [Activation::Elu, Activation::Sigmoid, Activation::Linear] {
        for seed in 0..10 {
            let e = check_dense(act, 5, 4, seed);
            assert!(e < 1e-4, "{act:?} seed {seed}: {e}");
        }
    }
}

#[test]
fn linear_dense_is_exact_to_roundoff() {
    assert!(check_dense(Activation::Linear, 7, 3, 9) < 1e-6);
}

#[test]
fn lstm_cell_three_steps() {
    for seed in 0..10 {
        let e = check_lstm(3, 4, 3, seed);
        assert!(e < 1e-4, "seed {seed}: {e}");
    }
}

#[test]
fn attention_matches_finite_differences() {
    for seed in 0..10 {
        let e = check_attention(4, 3, 6, seed);
        assert!(e < 1e-4, "seed {seed}: {e}");
    }
}

#[test]
fn mlp_with_fused_head_matches_finite_differences() {
    let net = BinaryNet::new(4, &[5, 3], Activation::Elu, 2);
    let x = vec![0.3, -0.7, 1.1, 0.05];
    for y in [false, true] {
        let e = grad_check(&net, &x, y, ClassWeights::default(), DEFAULT_EPS);
        assert!(e < 1e-4, "{e}");
    }
}

#[test]
fn whole_encoder_matches_finite_differences() {
    let enc = SequenceEncoder::new(
        EncoderConfig {
            input: 3,
            hidden: 4,
            layers: 2,
            dropout: 0.5,
            attention_dim: 3,
            output: 3,
            max_len: 16,
        },
        11,
    );
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let xs: Vec<Vec<f64>> = (0..5).map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    for y in [false, true] {
        let e = grad_check(&enc, &xs, y, ClassWeights::default(), DEFAULT_EPS);
        assert!(e < 1e-4, "{e}");
    }
}

#[test]
fn empty_parameter_vector_has_zero_error() {
    assert_eq!(max_relative_error(&[], &[]), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn attention_rows_sum_to_one(seed in 0u64..10_000, steps in 1usize..12, scale in 0.01f64..50.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let att = hawk_learn::Attention::new(5, 4, &mut rng);
        let hs: Vec<Vec<f64>> = (0..steps).map(|_| (0..5).map(|_| scale * rng.random_range(-1.0..1.0)).collect()).collect();
        let (_, cache) = att.forward(&hs);
        for row in &cache.weights {
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-6);
            prop_assert!(row.iter().all(|w| (0.0..=1.0).contains(w)));
        }
    }
}
