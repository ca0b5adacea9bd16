//! Central finite-difference checks of the analytic gradients.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::attention::Attention;
use crate::layers::{Activation, Dense};
use crate::loss::{bce, bce_grad, ClassWeights};
use crate::lstm::LstmLayer;
use crate::params::{zeros_like, Params};
use crate::train::BinaryModel;

pub const DEFAULT_EPS: f64 = 1e-5;
const REL_FLOOR: f64 = 1e-4;

pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(REL_FLOOR)
}

pub fn max_relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    analytic
        .iter()
        .zip(numeric)
        .map(|(a, n)| relative_error(*a, *n))
        .fold(0.0, f64::max)
}

pub fn numeric_gradient(mut f: impl FnMut(&[f64]) -> f64, x: &[f64], eps: f64) -> Vec<f64> {
    let mut p = x.to_vec();
    (0..x.len())
        .map(|i| {
            p[i] = x[i] + eps;
            let hi = f(&p);
            p[i] = x[i] - eps;
            let lo = f(&p);
            p[i] = x[i];
            (hi - lo) / (2.0 * eps)
        })
        .collect()
}

/// Max relative error over every parameter of a model on one sample, with
/// dropout off. A model without parameters scores 0.
pub fn grad_check<M: BinaryModel>(model: &M, x: &M::Input, y: bool, w: ClassWeights, eps: f64) -> f64 {
    let mut grad = zeros_like(model);
    model.accumulate(x, y, w, &mut grad, None);
    let analytic = grad.flat();
    let mut probe = model.clone();
    let mut scratch = zeros_like(model);
    let numeric = numeric_gradient(
        |p| {
            probe.set_flat(p);
            model_loss(&probe, x, y, w, &mut scratch)
        },
        &model.flat(),
        eps,
    );
    max_relative_error(&analytic, &numeric)
}

fn model_loss<M: BinaryModel>(m: &M, x: &M::Input, y: bool, w: ClassWeights, scratch: &mut M) -> f64 {
    m.accumulate(x, y, w, scratch, None)
}

fn random_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Dense layer with the given activation under the loss `Σ r_k y_k`, checked
/// for parameters and input.
pub fn check_dense(activation: Activation, inputs: usize, outputs: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layer = Dense::new(inputs, outputs, activation, &mut rng);
    let x = random_vec(inputs, &mut rng);
    let r = random_vec(outputs, &mut rng);
    let loss = |l: &Dense, x: &[f64]| l.output(x).iter().zip(&r).map(|(a, b)| a * b).sum::<f64>();
    let (z, y) = layer.forward(&x);
    let mut grad = zeros_like(&layer);
    let gx = layer.backward(&x, &z, &y, &r, &mut grad);
    let mut probe = layer.clone();
    let np = numeric_gradient(
        |p| {
            probe.set_flat(p);
            loss(&probe, &x)
        },
        &layer.flat(),
        DEFAULT_EPS,
    );
    let nx = numeric_gradient(|v| loss(&layer, v), &x, DEFAULT_EPS);
    max_relative_error(&grad.flat(), &np).max(max_relative_error(&gx, &nx))
}

/// Dense sigmoid unit followed by weighted BCE, using the probability-form
/// loss and its derivative rather than the fused logit path.
pub fn check_dense_sigmoid_bce(inputs: usize, y: bool, w: ClassWeights, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layer = Dense::new(inputs, 1, Activation::Sigmoid, &mut rng);
    let x = random_vec(inputs, &mut rng);
    let loss = |l: &Dense| bce(y, l.output(&x)[0], w);
    let (z, p) = layer.forward(&x);
    let mut grad = zeros_like(&layer);
    layer.backward(&x, &z, &p, &[bce_grad(y, p[0], w)], &mut grad);
    let mut probe = layer.clone();
    let np = numeric_gradient(
        |v| {
            probe.set_flat(v);
            loss(&probe)
        },
        &layer.flat(),
        DEFAULT_EPS,
    );
    max_relative_error(&grad.flat(), &np)
}

/// One LSTM layer over `steps` random inputs under the loss `Σ_t r_t · h_t`.
pub fn check_lstm(input: usize, hidden: usize, steps: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layer = LstmLayer::new(input, hidden, &mut rng);
    let xs: Vec<Vec<f64>> = (0..steps).map(|_| random_vec(input, &mut rng)).collect();
    let rs: Vec<Vec<f64>> = (0..steps).map(|_| random_vec(hidden, &mut rng)).collect();
    let loss = |l: &LstmLayer, xs: &[Vec<f64>]| {
        let (hs, _) = l.forward(xs);
        hs.iter().zip(&rs).map(|(h, r)| h.iter().zip(r).map(|(a, b)| a * b).sum::<f64>()).sum::<f64>()
    };
    let (_, cache) = layer.forward(&xs);
    let mut grad = zeros_like(&layer);
    let dxs = layer.backward(&cache, &rs, &mut grad);
    let mut probe = layer.clone();
    let np = numeric_gradient(
        |v| {
            probe.set_flat(v);
            loss(&probe, &xs)
        },
        &layer.flat(),
        DEFAULT_EPS,
    );
    let flat_x: Vec<f64> = xs.concat();
    let nx = numeric_gradient(
        |v| {
            let rows: Vec<Vec<f64>> = v.chunks(input).map(|c| c.to_vec()).collect();
            loss(&layer, &rows)
        },
        &flat_x,
        DEFAULT_EPS,
    );
    max_relative_error(&grad.flat(), &np).max(max_relative_error(&dxs.concat(), &nx))
}

/// Attention over `steps` random hidden states under the loss `Σ_i r_i · a_i`.
pub fn check_attention(hidden: usize, dim: usize, steps: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let att = Attention::new(hidden, dim, &mut rng);
    let hs: Vec<Vec<f64>> = (0..steps).map(|_| random_vec(hidden, &mut rng)).collect();
    let rs: Vec<Vec<f64>> = (0..steps).map(|_| random_vec(hidden, &mut rng)).collect();
    let loss = |a: &Attention, hs: &[Vec<f64>]| {
        let (ctx, _) = a.forward(hs);
        ctx.iter().zip(&rs).map(|(c, r)| c.iter().zip(r).map(|(x, y)| x * y).sum::<f64>()).sum::<f64>()
    };
    let (_, cache) = att.forward(&hs);
    let mut grad = zeros_like(&att);
    let dh = att.backward(&hs, &cache, &rs, &mut grad);
    let mut probe = att.clone();
    let np = numeric_gradient(
        |v| {
            probe.set_flat(v);
            loss(&probe, &hs)
        },
        &att.flat(),
        DEFAULT_EPS,
    );
    let nh = numeric_gradient(
        |v| {
            let rows: Vec<Vec<f64>> = v.chunks(hidden).map(|c| c.to_vec()).collect();
            loss(&att, &rows)
        },
        &hs.concat(),
        DEFAULT_EPS,
    );
    max_relative_error(&grad.flat(), &np).max(max_relative_error(&dh.concat(), &nh))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_error_floors_small_values() {
        assert_eq!(relative_error(0.0, 0.0), 0.0);
        assert!((relative_error(1e-9, 0.0) - 1e-5).abs() < 1e-18);
        assert!((relative_error(2.0, 1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn empty_parameter_vector_gives_zero() {
        assert_eq!(max_relative_error(&[], &[]), 0.0);
        assert!(numeric_gradient(|_| 1.0, &[], DEFAULT_EPS).is_empty());
    }
}
