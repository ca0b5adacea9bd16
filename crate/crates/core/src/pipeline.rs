//! End-to-end training, detection, evaluation and persistence of the four
//! subsystems.

use std::collections::BTreeMap;
use std::path::Path;

use log::info;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use hawk_features::{FeatureConfig, SensePerfGrouping, StructuredVector, FEATURE_NAMES};
use hawk_learn::{Checkpoint, ClassWeights, EncoderConfig, ForestConfig, OptimizerConfig, TrainConfig};
use hawk_replay::{MatchRecord, SteamId};

use crate::dataset::{labels_of, match_samples, PlayerSample};
use crate::error::{CoreError, Result};
use crate::exspc::{layout_outputs, assemble_inputs, max_lengths, train_exspc, ExSpcConfig, ExSpcInput, ExSpcLayout, ExSpcModel, SpcDecision};
use crate::metrics::{auc_roc, ConfusionCounts, Metrics};
use crate::mvin::{optimize, FusionMode, MvinModel, Objective, OptimizeResult, Triple};
use crate::revpov::{train_revpov, PovDecision, RevPovConfig, RevPovModel};
use crate::revstats::{train_revstats, Committee, RevStatsConfig, StatsDecision};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct PipelineConfig {
    pub features: FeatureConfig,
    pub revpov: RevPovConfig,
    pub revstats: RevStatsConfig,
    pub exspc: ExSpcConfig,
    pub grouping: SensePerfGrouping,
    pub objective: Objective,
    pub fusion: FusionMode,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            features: FeatureConfig::default(),
            revpov: RevPovConfig::default(),
            revstats: RevStatsConfig::default(),
            exspc: ExSpcConfig::default(),
            grouping: SensePerfGrouping::default(),
            objective: Objective::AccuracySubjectToRecall { r: 0.7 },
            fusion: FusionMode::Binary,
            seed: 0,
        }
    }
}

impl PipelineConfig {
    /// Small networks and short training for laptop-sized corpora.
    pub fn desk() -> Self {
        let adam = |lr| OptimizerConfig {
            learning_rate: lr,
            ..OptimizerConfig::default()
        };
        PipelineConfig {
            revpov: RevPovConfig {
                encoder: EncoderConfig {
                    hidden: 12,
                    layers: 2,
                    dropout: 0.2,
                    attention_dim: 8,
                    output: 8,
                    max_len: 24,
                    ..EncoderConfig::default()
                },
                train: TrainConfig {
                    epochs: 3,
                    batch_size: 16,
                    optimizer: adam(5e-3),
                    class_weights: ClassWeights::default(),
                    ..TrainConfig::default()
                },
                forest: ForestConfig {
                    n_trees: 50,
                    ..ForestConfig::default()
                },
                seed: 0,
            },
            exspc: ExSpcConfig {
                train: TrainConfig {
                    epochs: 15,
                    batch_size: 16,
                    optimizer: adam(2e-3),
                    ..TrainConfig::default()
                },
                ..ExSpcConfig::default()
            },
            ..PipelineConfig::default()
        }
    }

    /// Propagate the top-level seed into every subsystem.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.revpov.seed = seed;
        self.revstats.seed = seed;
        self.exspc.seed = seed;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FeatureContribution {
    pub feature: String,
    pub value: f64,
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PlayerVerdict {
    pub steam_id: SteamId,
    pub pov: PovDecision,
    pub stats: StatsDecision,
    pub spc: SpcDecision,
    pub w: f64,
    pub epsilon: f64,
    pub d_hawk: bool,
    pub top_features: Vec<FeatureContribution>,
}

impl PlayerVerdict {
    pub fn triple(&self, label: bool) -> Triple {
        Triple {
            decisions: [self.pov.decision, self.stats.decision, self.spc.decision],
            scores: [self.pov.score, self.stats.score, self.spc.score],
            label,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SubsystemEval {
    pub counts: ConfusionCounts,
    pub metrics: Metrics,
    pub auc: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EvaluationReport {
    pub players: usize,
    pub cheaters: usize,
    /// Keyed by `revpov`, `revstats`, `exspc` and `hawk`.
    pub subsystems: BTreeMap<String, SubsystemEval>,
}

impl EvaluationReport {
    pub fn get(&self, name: &str) -> Option<&SubsystemEval> {
        self.subsystems.get(name)
    }
}

pub const SUBSYSTEMS: [&str; 4] = ["revpov", "revstats", "exspc", "hawk"];

fn subsystem_eval(pred: &[bool], scores: &[f64], labels: &[bool]) -> SubsystemEval {
    let counts = ConfusionCounts::from_predictions(pred, labels);
    SubsystemEval {
        counts,
        metrics: counts.metrics(),
        auc: auc_roc(scores, labels).ok(),
    }
}

/// Score-free evaluation of binary predictions.
pub fn evaluate_predictions(pred: &[bool], scores: &[f64], labels: &[bool]) -> SubsystemEval {
    subsystem_eval(pred, scores, labels)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub version: String,
    pub config: PipelineConfig,
    pub revpov: RevPovModel,
    pub revstats: Committee,
    pub exspc: ExSpcModel,
    pub mvin: MvinModel,
    /// Validation outputs the threshold optimizer runs on.
    pub validation: Vec<Triple>,
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn spc_inputs(pov: &RevPovModel, layout: &ExSpcLayout, samples: &[PlayerSample]) -> Result<Vec<ExSpcInput>> {
    samples
        .iter()
        .map(|s| assemble_inputs(layout, &layout_outputs(layout, pov, &s.streams)?, &s.v28))
        .collect()
}

pub fn train_pipeline(train: &[PlayerSample], validation: &[PlayerSample], cfg: &PipelineConfig) -> Result<ModelBundle> {
    let labels = labels_of(train);
    let streams: Vec<_> = train.iter().map(|s| s.streams.clone()).collect();
    info!("training revpov on {} players", train.len());
    let revpov = train_revpov(&streams, &labels, &cfg.revpov)?;
    info!("training revstats");
    let v28: Vec<StructuredVector> = train.iter().map(|s| s.v28.clone()).collect();
    let revstats = train_revstats(&v28, &labels, &cfg.revstats)?;
    info!("training exspc");
    let refs: Vec<_> = train.iter().map(|s| &s.streams).collect();
    let layout = ExSpcLayout {
        pad_lens: max_lengths(&refs, cfg.revpov.encoder.max_len),
        step_width: cfg.revpov.encoder.output,
        grouping: cfg.grouping.clone(),
        padding: cfg.exspc.padding,
        norm: revstats.norm.clone(),
    };
    let xs = spc_inputs(&revpov, &layout, train)?;
    let vxs = spc_inputs(&revpov, &layout, validation)?;
    let vlabels = labels_of(validation);
    let exspc = train_exspc(layout, &xs, &labels, Some((&vxs, &vlabels)), &cfg.exspc)?;
    let mut bundle = ModelBundle {
        version: String::new(),
        config: cfg.clone(),
        revpov,
        revstats,
        exspc,
        mvin: MvinModel::new([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 0.5, cfg.objective)?,
        validation: Vec::new(),
    };
    let triples = validation
        .iter()
        .map(|s| Ok(bundle.verdict(s)?.triple(s.label)))
        .collect::<Result<Vec<_>>>()?;
    info!("optimizing fusion on {} validation players", triples.len());
    let opt = optimize(&triples, cfg.objective, cfg.fusion)?;
    bundle.mvin = opt.model;
    bundle.validation = triples;
    bundle.version = bundle.fingerprint();
    Ok(bundle)
}

impl ModelBundle {
    /// Content hash of the trained parameters.
    pub fn fingerprint(&self) -> String {
        let mut h = 0u64;
        for part in [
            serde_json::to_vec(&self.revpov).unwrap_or_default(),
            serde_json::to_vec(&self.revstats).unwrap_or_default(),
            serde_json::to_vec(&self.exspc.net).unwrap_or_default(),
        ] {
            h = h.rotate_left(17) ^ fnv1a(&part);
        }
        format!("{h:016x}")
    }

    pub fn top_features(&self, v: &StructuredVector, n: usize) -> Vec<FeatureContribution> {
        let z = self.revstats.norm.apply(&v.values);
        let mut out: Vec<FeatureContribution> = (0..z.len())
            .filter(|&i| !v.mask[i])
            .map(|i| FeatureContribution {
                feature: FEATURE_NAMES[i].to_string(),
                value: v.values[i],
                z: z[i],
            })
            .collect();
        out.sort_by(|a, b| b.z.abs().total_cmp(&a.z.abs()).then_with(|| a.feature.cmp(&b.feature)));
        out.truncate(n);
        out
    }

    pub fn verdict(&self, s: &PlayerSample) -> Result<PlayerVerdict> {
        let outputs = self.revpov.step_outputs(&s.streams)?;
        let pov = self.revpov.decide(&self.revpov.pool(&outputs))?;
        let stats = self.revstats.decide(&s.v28)?;
        let spc_out = match self.exspc.layout.padding {
            crate::exspc::Padding::Masked => outputs,
            crate::exspc::Padding::Literal => layout_outputs(&self.exspc.layout, &self.revpov, &s.streams)?,
        };
        let spc = self.exspc.decide(&assemble_inputs(&self.exspc.layout, &spc_out, &s.v28)?)?;
        let mut v = PlayerVerdict {
            steam_id: s.steam_id,
            pov,
            stats,
            spc,
            w: 0.0,
            epsilon: self.mvin.epsilon,
            d_hawk: false,
            top_features: self.top_features(&s.v28, 5),
        };
        let (w, d) = self.mvin.decide(&v.triple(false));
        v.w = w;
        v.d_hawk = d;
        Ok(v)
    }

    pub fn detect_match(&self, m: &MatchRecord) -> Result<Vec<PlayerVerdict>> {
        match_samples(m, None, &self.config.features)?
            .iter()
            .map(|s| self.verdict(s))
            .collect()
    }

    /// Re-run the threshold optimizer on the cached validation outputs and
    /// install the result.
    pub fn reoptimize(&mut self, objective: Objective) -> Result<OptimizeResult> {
        let r = optimize(&self.validation, objective, self.mvin.mode)?;
        self.mvin = r.model.clone();
        Ok(r)
    }

    pub fn evaluate(&self, samples: &[PlayerSample]) -> Result<EvaluationReport> {
        let verdicts = samples.iter().map(|s| self.verdict(s)).collect::<Result<Vec<_>>>()?;
        Ok(evaluate_verdicts(&verdicts, &labels_of(samples)))
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        let sub = |name: &str| -> Result<std::path::PathBuf> {
            let d = dir.join(name);
            std::fs::create_dir_all(&d).map_err(|e| CoreError::io(&d, e))?;
            Ok(d)
        };
        let root = sub("")?;
        put(&root.join("manifest.json"), "hawk-bundle", &self.config, &BundleManifest {
            version: self.version.clone(),
            encoders: self.revpov.encoders.len(),
            forests: self.revpov.forests.len(),
        })?;
        let rp = sub("revpov")?;
        put(&rp.join("manifest.json"), "revpov", &self.revpov.config, &self.revpov.forests.len())?;
        for (k, enc) in hawk_features::StreamKind::ALL.iter().zip(&self.revpov.encoders) {
            put(&rp.join(format!("encoder-{}.json", k.short())), "encoder", &enc.config, enc)?;
        }
        for (i, f) in self.revpov.forests.iter().enumerate() {
            put(&rp.join(format!("forest-{i}.json")), "forest", &f.config, f)?;
        }
        let rs = sub("revstats")?;
        put(&rs.join("manifest.json"), "revstats", &self.revstats.config, &self.revstats.norm)?;
        for (kind, inst) in self.revstats.config.kinds.iter().zip(&self.revstats.instances) {
            for (i, c) in inst.iter().enumerate() {
                put(&rs.join(format!("{kind}-{i}.json")), kind.name(), &(), c)?;
            }
        }
        let sp = sub("exspc")?;
        put(&sp.join("manifest.json"), "exspc-layout", &self.exspc.config, &self.exspc.layout)?;
        put(&sp.join("model.json"), "exspc", &self.exspc.config, &self.exspc)?;
        put(&root.join("mvin.json"), "mvin", &self.mvin.objective, &self.mvin)?;
        put(&root.join("validation.json"), "validation", &(), &self.validation)?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let (config, manifest): (PipelineConfig, BundleManifest) = get(&dir.join("manifest.json"), "hawk-bundle")?;
        let rp = dir.join("revpov");
        let (rcfg, n_forests): (RevPovConfig, usize) = get(&rp.join("manifest.json"), "revpov")?;
        let encoders = hawk_features::StreamKind::ALL
            .iter()
            .map(|k| get::<EncoderConfig, _>(&rp.join(format!("encoder-{}.json", k.short())), "encoder").map(|c| c.1))
            .collect::<Result<Vec<_>>>()?;
        let forests = (0..n_forests)
            .map(|i| get::<ForestConfig, _>(&rp.join(format!("forest-{i}.json")), "forest").map(|c| c.1))
            .collect::<Result<Vec<_>>>()?;
        let rs = dir.join("revstats");
        let (scfg, norm): (RevStatsConfig, hawk_learn::ZScore) = get(&rs.join("manifest.json"), "revstats")?;
        let mut instances = Vec::new();
        for kind in &scfg.kinds {
            let mut v = Vec::new();
            let mut i = 0;
            loop {
                let p = rs.join(format!("{kind}-{i}.json"));
                if !p.exists() {
                    break;
                }
                v.push(get::<(), _>(&p, kind.name())?.1);
                i += 1;
            }
            instances.push(v);
        }
        let (_, exspc): (ExSpcConfig, ExSpcModel) = get(&dir.join("exspc").join("model.json"), "exspc")?;
        let (_, mvin): (Objective, MvinModel) = get(&dir.join("mvin.json"), "mvin")?;
        let (_, validation): ((), Vec<Triple>) = get(&dir.join("validation.json"), "validation")?;
        let bundle = ModelBundle {
            version: manifest.version,
            config,
            revpov: RevPovModel {
                config: rcfg,
                encoders,
                forests,
            },
            revstats: Committee {
                config: scfg,
                norm,
                instances,
            },
            exspc,
            mvin,
            validation,
        };
        if bundle.fingerprint() != bundle.version {
            return Err(CoreError::Config(format!("bundle at {} does not match its manifest version", dir.display())));
        }
        Ok(bundle)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct BundleManifest {
    version: String,
    encoders: usize,
    forests: usize,
}

fn put<C: Serialize + DeserializeOwned + Clone, P: Serialize + DeserializeOwned + Clone>(
    path: &Path,
    kind: &str,
    config: &C,
    parameters: &P,
) -> Result<()> {
    Checkpoint::new(kind, config.clone(), parameters.clone()).save(path)?;
    Ok(())
}

fn get<C: Serialize + DeserializeOwned, P: Serialize + DeserializeOwned>(path: &Path, kind: &str) -> Result<(C, P)> {
    let c = Checkpoint::<C, P>::load(path, Some(kind))?;
    Ok((c.config, c.parameters))
}

pub fn evaluate_verdicts(verdicts: &[PlayerVerdict], labels: &[bool]) -> EvaluationReport {
    let col = |f: &dyn Fn(&PlayerVerdict) -> (bool, f64)| -> SubsystemEval {
        let (p, s): (Vec<bool>, Vec<f64>) = verdicts.iter().map(f).unzip();
        subsystem_eval(&p, &s, labels)
    };
    let mut subsystems = BTreeMap::new();
    subsystems.insert("revpov".to_string(), col(&|v| (v.pov.decision, v.pov.score)));
    subsystems.insert("revstats".to_string(), col(&|v| (v.stats.decision, v.stats.score)));
    subsystems.insert("exspc".to_string(), col(&|v| (v.spc.decision, v.spc.score)));
    subsystems.insert("hawk".to_string(), col(&|v| (v.d_hawk, v.w)));
    EvaluationReport {
        players: labels.len(),
        cheaters: labels.iter().filter(|l| **l).count(),
        subsystems,
    }
}
