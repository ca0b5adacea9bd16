//! Point-of-view subsystem: per-stream sequence encoders, pooled embedding
//! and a majority vote over forests fitted on balanced subsamples.

use log::debug;
use serde::{Deserialize, Serialize};

use hawk_features::{StreamKind, TemporalStreams};
use hawk_learn::{train_binary, EncoderConfig, Forest, ForestConfig, SequenceEncoder, TrainConfig};

use crate::error::{CoreError, Result};
use crate::subsample::multi_subsample;
use crate::vote::{majority, vote_share};

pub const NUM_STREAMS: usize = 7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct RevPovConfig {
    /// Template for every stream; `input` is set from the stream width.
    pub encoder: EncoderConfig,
    pub train: TrainConfig,
    pub forest: ForestConfig,
    pub seed: u64,
}

impl Default for RevPovConfig {
    fn default() -> Self {
        RevPovConfig {
            encoder: EncoderConfig::default(),
            train: TrainConfig::default(),
            forest: ForestConfig::default(),
            seed: 0,
        }
    }
}

/// Per-step encoder outputs for each stream, in [`StreamKind::ALL`] order.
/// An empty stream has no steps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PovOutputs {
    pub steps: Vec<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PovEmbedding {
    /// Concatenated pooled outputs, width `7 E`.
    pub values: Vec<f64>,
    pub missing: [bool; NUM_STREAMS],
}

impl PovEmbedding {
    /// Forest input: embedding followed by the missing flags as 0/1.
    pub fn forest_input(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.extend(self.missing.iter().map(|&m| if m { 1.0 } else { 0.0 }));
        v
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PovDecision {
    pub decision: bool,
    pub score: f64,
    pub votes: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RevPovModel {
    pub config: RevPovConfig,
    pub encoders: Vec<SequenceEncoder>,
    pub forests: Vec<Forest>,
}

pub(crate) fn sub_seed(seed: u64, i: u64) -> u64 {
    hawk_replay::synth::mix_seed(seed, i)
}

fn stream_rows(t: &TemporalStreams, kind: StreamKind, max_len: usize) -> Vec<Vec<f64>> {
    t.get(kind).rows().take(max_len).map(|r| r.to_vec()).collect()
}

/// Majority over forest votes; the score is the share of positive votes.
pub fn combine_votes(votes: Vec<bool>) -> PovDecision {
    PovDecision {
        decision: majority(&votes),
        score: vote_share(&votes),
        votes,
    }
}

impl RevPovModel {
    pub fn embedding_width(&self) -> usize {
        NUM_STREAMS * self.config.encoder.output
    }

    pub fn step_outputs(&self, t: &TemporalStreams) -> Result<PovOutputs> {
        let steps = StreamKind::ALL
            .iter()
            .zip(&self.encoders)
            .map(|(&kind, enc)| {
                let rows = stream_rows(t, kind, enc.config.max_len);
                if rows.is_empty() {
                    Ok(Vec::new())
                } else {
                    Ok(enc.forward(&rows)?.steps)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PovOutputs { steps })
    }

    pub fn pool(&self, out: &PovOutputs) -> PovEmbedding {
        let e = self.config.encoder.output;
        let mut values = vec![0.0; NUM_STREAMS * e];
        let mut missing = [false; NUM_STREAMS];
        for (s, steps) in out.steps.iter().enumerate() {
            if steps.is_empty() {
                missing[s] = true;
                continue;
            }
            let slot = &mut values[s * e..(s + 1) * e];
            for row in steps {
                for (a, b) in slot.iter_mut().zip(row) {
                    *a += b;
                }
            }
            slot.iter_mut().for_each(|v| *v /= steps.len() as f64);
        }
        PovEmbedding { values, missing }
    }

    pub fn embed(&self, t: &TemporalStreams) -> Result<PovEmbedding> {
        Ok(self.pool(&self.step_outputs(t)?))
    }

    pub fn decide(&self, emb: &PovEmbedding) -> Result<PovDecision> {
        if self.forests.is_empty() {
            return Err(CoreError::UntrainedModel);
        }
        let x = emb.forest_input();
        let votes = self
            .forests
            .iter()
            .map(|f| f.decide(&x).map(|d| d.0))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(combine_votes(votes))
    }
}

/// Train the encoders with their classification heads, then fit one forest
/// per balanced subsample of the pooled embeddings.
pub fn train_revpov(train: &[TemporalStreams], labels: &[bool], cfg: &RevPovConfig) -> Result<RevPovModel> {
    if train.len() != labels.len() {
        return Err(CoreError::Config(format!("{} samples, {} labels", train.len(), labels.len())));
    }
    if !labels.iter().any(|l| *l) || labels.iter().all(|l| *l) {
        return Err(CoreError::DegenerateClass("revpov training needs both classes".into()));
    }
    let mut encoders = Vec::with_capacity(NUM_STREAMS);
    for (s, &kind) in StreamKind::ALL.iter().enumerate() {
        let ecfg = EncoderConfig {
            input: kind.width(),
            ..cfg.encoder.clone()
        };
        let mut enc = SequenceEncoder::new(ecfg, sub_seed(cfg.seed, s as u64));
        let mut seqs = Vec::new();
        let mut ys = Vec::new();
        for (t, &y) in train.iter().zip(labels) {
            let rows = stream_rows(t, kind, cfg.encoder.max_len);
            if !rows.is_empty() {
                seqs.push(rows);
                ys.push(y);
            }
        }
        if !seqs.is_empty() {
            enc.fit_normalizer(&seqs);
            let prepared = seqs.iter().map(|r| enc.prepare(r)).collect::<std::result::Result<Vec<_>, _>>()?;
            let tc = TrainConfig {
                seed: sub_seed(cfg.seed, 100 + s as u64),
                ..cfg.train.clone()
            };
            let h = train_binary(&mut enc, &prepared, &ys, &tc)?;
            debug!("encoder {} trained on {} sequences, loss {:?}", kind.short(), seqs.len(), h.epoch_loss.last());
        }
        encoders.push(enc);
    }
    let mut model = RevPovModel {
        config: cfg.clone(),
        encoders,
        forests: Vec::new(),
    };
    let x: Vec<Vec<f64>> = train
        .iter()
        .map(|t| model.embed(t).map(|e| e.forest_input()))
        .collect::<Result<_>>()?;
    let sets = multi_subsample(labels, sub_seed(cfg.seed, 200))?;
    let mut forests = Vec::with_capacity(sets.len());
    for set in &sets {
        let idx = set.indices();
        let xs: Vec<Vec<f64>> = idx.iter().map(|&i| x[i].clone()).collect();
        let ys: Vec<bool> = idx.iter().map(|&i| labels[i]).collect();
        let mut f = Forest::new(ForestConfig {
            seed: sub_seed(cfg.seed, 300 + set.index as u64),
            ..cfg.forest.clone()
        });
        f.fit(&xs, &ys)?;
        forests.push(f);
    }
    model.forests = forests;
    Ok(model)
}
