//! Sequence encoder: stacked LSTM, dot attention, two dense layers and mean
//! pooling, with a sigmoid head used during supervised pre-training.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::attention::Attention;
use crate::error::{LearnError, Result};
use crate::layers::{Activation, Dense};
use crate::loss::{bce_logit, ClassWeights};
use crate::lstm::Lstm;
use crate::normalize::ZScore;
use crate::params::Params;
use crate::train::BinaryModel;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct EncoderConfig {
    pub input: usize,
    pub hidden: usize,
    pub layers: usize,
    pub dropout: f64,
    pub attention_dim: usize,
    /// Width E of the per-step output.
    pub output: usize,
    /// Longer sequences keep their first `max_len` rows.
    pub max_len: usize,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        EncoderConfig {
            input: 1,
            hidden: 32,
            layers: 2,
            dropout: 0.2,
            attention_dim: 32,
            output: 16,
            max_len: 512,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceEncoder {
    pub config: EncoderConfig,
    pub norm: ZScore,
    pub lstm: Lstm,
    pub attention: Attention,
    pub dense1: Dense,
    pub dense2: Dense,
    pub head: Dense,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EncoderOutput {
    pub steps: Vec<Vec<f64>>,
    pub pooled: Vec<f64>,
    pub attention: Vec<Vec<f64>>,
}

impl SequenceEncoder {
    pub fn new(config: EncoderConfig, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = config.hidden;
        let lstm = Lstm::new(config.input, h, config.layers, config.dropout, &mut rng);
        let attention = Attention::new(h, config.attention_dim, &mut rng);
        let dense1 = Dense::new(2 * h, h, Activation::Elu, &mut rng);
        let dense2 = Dense::new(h, config.output, Activation::Linear, &mut rng);
        let head = Dense::new(config.output, 1, Activation::Sigmoid, &mut rng);
        SequenceEncoder {
            norm: ZScore::identity(config.input),
            config,
            lstm,
            attention,
            dense1,
            dense2,
            head,
        }
    }

    pub fn fit_normalizer(&mut self, sequences: &[Vec<Vec<f64>>]) {
        let max = self.config.max_len;
        let rows = sequences.iter().flat_map(|s| s.iter().take(max)).map(|r| r.as_slice());
        self.norm = ZScore::fit(rows, self.config.input);
    }

    /// Truncate and normalize raw rows.
    pub fn prepare(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        if rows.is_empty() {
            return Err(LearnError::EmptySequence);
        }
        rows.iter()
            .take(self.config.max_len)
            .map(|r| {
                if r.len() != self.config.input {
                    Err(LearnError::Shape(format!("row width {} != {}", r.len(), self.config.input)))
                } else {
                    Ok(self.norm.apply(r))
                }
            })
            .collect()
    }

    pub fn forward(&self, rows: &[Vec<f64>]) -> Result<EncoderOutput> {
        let xs = self.prepare(rows)?;
        Ok(self.forward_prepared(&xs))
    }

    pub fn forward_prepared(&self, xs: &[Vec<f64>]) -> EncoderOutput {
        let (hs, _) = self.lstm.forward::<ChaCha8Rng>(xs, None);
        let (ctx, cache) = self.attention.forward(&hs);
        let steps: Vec<Vec<f64>> = ctx
            .iter()
            .zip(&hs)
            .map(|(a, h)| {
                let u = [a.as_slice(), h.as_slice()].concat();
                self.dense2.output(&self.dense1.output(&u))
            })
            .collect();
        let pooled = mean_rows(&steps, self.config.output);
        EncoderOutput {
            steps,
            pooled,
            attention: cache.weights,
        }
    }

    /// Pooled embedding for a raw sequence.
    pub fn embed(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        Ok(self.forward(rows)?.pooled)
    }
}

fn mean_rows(rows: &[Vec<f64>], width: usize) -> Vec<f64> {
    let mut m = vec![0.0; width];
    for r in rows {
        for (a, b) in m.iter_mut().zip(r) {
            *a += b;
        }
    }
    let n = rows.len().max(1) as f64;
    m.iter_mut().for_each(|v| *v /= n);
    m
}

impl Params for SequenceEncoder {
    fn params(&self) -> Vec<&[f64]> {
        let mut p = self.lstm.params();
        p.extend(self.attention.params());
        p.extend(self.dense1.params());
        p.extend(self.dense2.params());
        p.extend(self.head.params());
        p
    }

    fn params_mut(&mut self) -> Vec<&mut [f64]> {
        let mut p = self.lstm.params_mut();
        p.extend(self.attention.params_mut());
        p.extend(self.dense1.params_mut());
        p.extend(self.dense2.params_mut());
        p.extend(self.head.params_mut());
        p
    }
}

/// Inputs are sequences already passed through [`SequenceEncoder::prepare`].
impl BinaryModel for SequenceEncoder {
    type Input = Vec<Vec<f64>>;

    fn logit(&self, xs: &Vec<Vec<f64>>) -> f64 {
        let out = self.forward_prepared(xs);
        self.head.preactivation(&out.pooled)[0]
    }

    fn accumulate(&self, xs: &Vec<Vec<f64>>, y: bool, w: ClassWeights, grad: &mut Self, rng: Option<&mut ChaCha8Rng>) -> f64 {
        let n = xs.len();
        let (hs, lcache) = self.lstm.forward(xs, rng);
        let (ctx, acache) = self.attention.forward(&hs);
        let mut us = Vec::with_capacity(n);
        let mut z1s = Vec::with_capacity(n);
        let mut y1s = Vec::with_capacity(n);
        let mut z2s = Vec::with_capacity(n);
        let mut y2s = Vec::with_capacity(n);
        for (a, h) in ctx.iter().zip(&hs) {
            let u = [a.as_slice(), h.as_slice()].concat();
            let (z1, y1) = self.dense1.forward(&u);
            let (z2, y2) = self.dense2.forward(&y1);
            us.push(u);
            z1s.push(z1);
            y1s.push(y1);
            z2s.push(z2);
            y2s.push(y2);
        }
        let pooled = mean_rows(&y2s, self.config.output);
        let logit = self.head.preactivation(&pooled)[0];
        let (loss, dz) = bce_logit(y, logit, w);
        let gpool = self.head.backward_pre(&pooled, &[dz], &mut grad.head);
        let gstep: Vec<f64> = gpool.iter().map(|g| g / n as f64).collect();
        let hd = self.config.hidden;
        let mut dctx = Vec::with_capacity(n);
        let mut dhs = Vec::with_capacity(n);
        for t in 0..n {
            let gy1 = self.dense2.backward(&y1s[t], &z2s[t], &y2s[t], &gstep, &mut grad.dense2);
            let gu = self.dense1.backward(&us[t], &z1s[t], &y1s[t], &gy1, &mut grad.dense1);
            dctx.push(gu[..hd].to_vec());
            dhs.push(gu[hd..].to_vec());
        }
        let datt = self.attention.backward(&hs, &acache, &dctx, &mut grad.attention);
        for (d, a) in dhs.iter_mut().zip(&datt) {
            for (x, y) in d.iter_mut().zip(a) {
                *x += y;
            }
        }
        self.lstm.backward(&lcache, &dhs, &mut grad.lstm);
        loss
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SequenceEncoder {
        SequenceEncoder::new(
            EncoderConfig {
                input: 3,
                hidden: 6,
                layers: 2,
                dropout: 0.2,
                attention_dim: 4,
                output: 5,
                max_len: 10,
            },
            3,
        )
    }

    #[test]
    fn empty_sequence_is_rejected() {
        assert!(matches!(small().forward(&[]), Err(LearnError::EmptySequence)));
    }

    #[test]
    fn single_step_pools_to_itself() {
        let out = small().forward(&[vec![0.1, 0.2, 0.3]]).unwrap();
        assert_eq!(out.steps.len(), 1);
        assert_eq!(out.pooled, out.steps[0]);
    }

    #[test]
    fn long_sequences_are_truncated() {
        let rows = vec![vec![1.0, 0.0, -1.0]; 25];
        assert_eq!(small().forward(&rows).unwrap().steps.len(), 10);
    }

    #[test]
    fn wrong_width_is_a_shape_error() {
        assert!(matches!(small().forward(&[vec![1.0]]), Err(LearnError::Shape(_))));
    }
}
