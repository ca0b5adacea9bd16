//! Mini-batch training of binary classifiers with weighted BCE.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LearnError, Result};
use crate::layers::sigmoid;
use crate::loss::ClassWeights;
use crate::optim::{Optimizer, OptimizerConfig};
use crate::params::{zeros_like, Params};

/// A differentiable model with a scalar logit output.
pub trait BinaryModel: Params + Clone {
    type Input;

    fn logit(&self, x: &Self::Input) -> f64;

    /// Add the gradient of the weighted BCE for one sample into `grad` and
    /// return the sample loss. Dropout is active only when `rng` is given.
    fn accumulate(
        &self,
        x: &Self::Input,
        y: bool,
        weights: ClassWeights,
        grad: &mut Self,
        rng: Option<&mut ChaCha8Rng>,
    ) -> f64;

    fn predict(&self, x: &Self::Input) -> f64 {
        sigmoid(self.logit(x))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub optimizer: OptimizerConfig,
    pub class_weights: ClassWeights,
    pub seed: u64,
    /// Rescale the batch gradient when its L2 norm exceeds this.
    pub clip_norm: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 20,
            batch_size: 32,
            optimizer: OptimizerConfig::default(),
            class_weights: ClassWeights::default(),
            seed: 0,
            clip_norm: Some(5.0),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LossHistory {
    /// Mean weighted loss per epoch, measured while training.
    pub epoch_loss: Vec<f64>,
}

pub fn train_binary<M: BinaryModel>(
    model: &mut M,
    inputs: &[M::Input],
    labels: &[bool],
    cfg: &TrainConfig,
) -> Result<LossHistory> {
    train_binary_observed(model, inputs, labels, cfg, |_, _| {})
}

/// As [`train_binary`], calling `on_epoch(epoch, model)` after every epoch.
pub fn train_binary_observed<M: BinaryModel>(
    model: &mut M,
    inputs: &[M::Input],
    labels: &[bool],
    cfg: &TrainConfig,
    mut on_epoch: impl FnMut(usize, &M),
) -> Result<LossHistory> {
    if inputs.len() != labels.len() {
        return Err(LearnError::Shape(format!("{} inputs, {} labels", inputs.len(), labels.len())));
    }
    if cfg.batch_size == 0 {
        return Err(LearnError::Config("batch size must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut opt = Optimizer::new(cfg.optimizer.clone(), model.num_params());
    let mut order: Vec<usize> = (0..inputs.len()).collect();
    let mut history = LossHistory::default();
    let mut grad = zeros_like(model);
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            grad.zero();
            let mut loss = 0.0;
            for &i in batch {
                loss += model.accumulate(&inputs[i], labels[i], cfg.class_weights, &mut grad, Some(&mut rng));
            }
            if !loss.is_finite() {
                return Err(LearnError::NonFiniteLoss { epoch: epoch + 1 });
            }
            total += loss;
            let scale = 1.0 / batch.len() as f64;
            let mut g = grad.flat();
            g.iter_mut().for_each(|v| *v *= scale);
            if let Some(c) = cfg.clip_norm {
                let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm > c {
                    g.iter_mut().for_each(|v| *v *= c / norm);
                }
            }
            let mut p = model.flat();
            opt.step(&mut p, &g);
            model.set_flat(&p);
        }
        let mean = total / inputs.len().max(1) as f64;
        if !mean.is_finite() {
            return Err(LearnError::NonFiniteLoss { epoch: epoch + 1 });
        }
        history.epoch_loss.push(mean);
        on_epoch(epoch, model);
    }
    Ok(history)
}

/// Mean weighted loss without dropout.
pub fn evaluate_loss<M: BinaryModel>(model: &M, inputs: &[M::Input], labels: &[bool], w: ClassWeights) -> f64 {
    let mut scratch = zeros_like(model);
    let n = inputs.len().max(1) as f64;
    inputs
        .iter()
        .zip(labels)
        .map(|(x, y)| model.accumulate(x, *y, w, &mut scratch, None))
        .sum::<f64>()
        / n
}
