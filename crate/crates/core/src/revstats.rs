//! Statistics subsystem: a committee of classifier kinds, each fitted once per
//! balanced subsample, combined by nested majority vote.

use serde::{Deserialize, Serialize};

use hawk_features::{StructuredVector, NUM_FEATURES};
use hawk_learn::{ClassWeights, ClassicClassifier, ClassicConfig, ClassicKind, ZScore};

use crate::error::{CoreError, Result};
use crate::revpov::sub_seed;
use crate::subsample::multi_subsample;
use crate::vote::{nested_majority, vote_share};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct RevStatsConfig {
    pub kinds: Vec<ClassicKind>,
    pub classic: ClassicConfig,
    pub seed: u64,
}

impl Default for RevStatsConfig {
    fn default() -> Self {
        RevStatsConfig {
            kinds: ClassicKind::ALL.to_vec(),
            // subsample sets are balanced already
            classic: ClassicConfig {
                class_weights: ClassWeights::UNIFORM,
                ..ClassicConfig::default()
            },
            seed: 0,
        }
    }
}

impl RevStatsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.kinds.is_empty() || self.kinds.len() % 2 == 0 {
            return Err(CoreError::Config(format!(
                "committee needs an odd number of kinds, got {}",
                self.kinds.len()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StatsDecision {
    pub decision: bool,
    pub score: f64,
    pub kind_votes: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Committee {
    pub config: RevStatsConfig,
    pub norm: ZScore,
    /// `instances[k]` holds every fitted copy of `config.kinds[k]`.
    pub instances: Vec<Vec<ClassicClassifier>>,
}

/// Classifier input: values (z-scored for non-tree kinds) followed by the
/// missing mask as 0/1.
pub fn committee_input(norm: &ZScore, v: &StructuredVector, tree: bool) -> Vec<f64> {
    let mut x = if tree { v.values.clone() } else { norm.apply(&v.values) };
    x.extend(v.mask.iter().map(|&m| if m { 1.0 } else { 0.0 }));
    x
}

pub fn fit_normalizer(vs: &[StructuredVector]) -> ZScore {
    ZScore::fit(vs.iter().map(|v| v.values.as_slice()), NUM_FEATURES)
}

impl Committee {
    pub fn instance_count(&self) -> usize {
        self.instances.iter().map(|v| v.len()).sum()
    }

    /// Votes of every instance, grouped by kind.
    pub fn votes(&self, v: &StructuredVector) -> Result<Vec<Vec<bool>>> {
        if self.instances.is_empty() || self.instances.iter().any(|i| i.is_empty()) {
            return Err(CoreError::UntrainedModel);
        }
        let raw = committee_input(&self.norm, v, true);
        let z = committee_input(&self.norm, v, false);
        Ok(self
            .config
            .kinds
            .iter()
            .zip(&self.instances)
            .map(|(k, inst)| {
                let x = if k.is_tree() { &raw } else { &z };
                inst.iter().map(|c| c.decide(x)).collect()
            })
            .collect())
    }

    pub fn decide(&self, v: &StructuredVector) -> Result<StatsDecision> {
        Ok(combine_kind_votes(&self.votes(v)?))
    }
}

pub fn combine_kind_votes(votes: &[Vec<bool>]) -> StatsDecision {
    let (decision, kind_votes) = nested_majority(votes);
    StatsDecision {
        decision,
        score: vote_share(&kind_votes),
        kind_votes,
    }
}

pub fn train_revstats(train: &[StructuredVector], labels: &[bool], cfg: &RevStatsConfig) -> Result<Committee> {
    cfg.validate()?;
    if train.len() != labels.len() {
        return Err(CoreError::Config(format!("{} samples, {} labels", train.len(), labels.len())));
    }
    let sets = multi_subsample(labels, sub_seed(cfg.seed, 400))?;
    let norm = fit_normalizer(train);
    let raw: Vec<Vec<f64>> = train.iter().map(|v| committee_input(&norm, v, true)).collect();
    let z: Vec<Vec<f64>> = train.iter().map(|v| committee_input(&norm, v, false)).collect();
    let mut instances = Vec::with_capacity(cfg.kinds.len());
    for (ki, &kind) in cfg.kinds.iter().enumerate() {
        let x = if kind.is_tree() { &raw } else { &z };
        let mut fitted = Vec::with_capacity(sets.len());
        for set in &sets {
            let idx = set.indices();
            let xs: Vec<Vec<f64>> = idx.iter().map(|&i| x[i].clone()).collect();
            let ys: Vec<bool> = idx.iter().map(|&i| labels[i]).collect();
            let cc = ClassicConfig {
                seed: sub_seed(cfg.seed, 1000 + (ki * 100 + set.index) as u64),
                ..cfg.classic.clone()
            };
            fitted.push(ClassicClassifier::fit(kind, &cc, &xs, &ys)?);
        }
        instances.push(fitted);
    }
    Ok(Committee {
        config: cfg.clone(),
        norm,
        instances,
    })
}
