//! Sense/performance consistency network over the per-step point-of-view
//! outputs and the two halves of the structured vector.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use hawk_features::grouping::select;
use hawk_features::{SensePerfGrouping, StreamKind, StructuredVector, TemporalStreams};
use hawk_learn::loss::{bce_logit, ClassWeights};
use hawk_learn::train::evaluate_loss;
use hawk_learn::{train_binary_observed, Activation, BinaryModel, Dense, Params, TrainConfig, ZScore};

use crate::error::{CoreError, Result};
use crate::revpov::{sub_seed, PovOutputs, RevPovModel, NUM_STREAMS};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Padding {
    /// Absent steps are zero and excluded from the shrink heads.
    #[default]
    Masked,
    /// Input sequences are padded with zero rows before the encoder and every
    /// resulting step output is used.
    Literal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct ExSpcConfig {
    pub shrink: usize,
    pub reduction: Vec<usize>,
    pub deepening: Vec<usize>,
    pub final_width: usize,
    pub padding: Padding,
    pub train: TrainConfig,
    pub seed: u64,
}

impl Default for ExSpcConfig {
    fn default() -> Self {
        ExSpcConfig {
            shrink: 32,
            reduction: vec![64, 32],
            deepening: vec![32, 16],
            final_width: 16,
            padding: Padding::Masked,
            train: TrainConfig::default(),
            seed: 0,
        }
    }
}

/// One player's network input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExSpcInput {
    /// Flattened step outputs per stream, zero padded to `pad_len * E`.
    pub streams: Vec<Vec<f64>>,
    /// Leading entries of each stream that carry data.
    pub active: Vec<usize>,
    pub v28_sense: Vec<f64>,
    pub v28_perf: Vec<f64>,
}

/// Layout shared by assembly and the network.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExSpcLayout {
    pub pad_lens: Vec<usize>,
    pub step_width: usize,
    pub grouping: SensePerfGrouping,
    pub padding: Padding,
    /// Shared z-score statistics of the structured vector.
    pub norm: ZScore,
}

impl ExSpcLayout {
    pub fn sense_streams(&self) -> Vec<usize> {
        self.grouping.temporal_sense.iter().map(|k| k.index()).collect()
    }

    pub fn perf_streams(&self) -> Vec<usize> {
        self.grouping.temporal_perf.iter().map(|k| k.index()).collect()
    }
}

/// Longest truncated stream per kind across a dataset.
pub fn max_lengths(streams: &[&TemporalStreams], max_len: usize) -> Vec<usize> {
    StreamKind::ALL
        .iter()
        .map(|&k| streams.iter().map(|t| t.get(k).len().min(max_len)).max().unwrap_or(0).max(1))
        .collect()
}

/// Step outputs as the layout expects them: truncated to the padding length,
/// or recomputed over zero-padded inputs in literal mode.
pub fn layout_outputs(layout: &ExSpcLayout, pov: &RevPovModel, t: &TemporalStreams) -> Result<PovOutputs> {
    match layout.padding {
        Padding::Masked => pov.step_outputs(t),
        Padding::Literal => {
            let steps = StreamKind::ALL
                .iter()
                .zip(&pov.encoders)
                .zip(&layout.pad_lens)
                .map(|((&k, enc), &pad)| {
                    let seq = t.get(k);
                    let mut xs: Vec<Vec<f64>> = seq.rows().take(pad).map(|r| enc.norm.apply(r)).collect();
                    xs.resize(pad, vec![0.0; k.width()]);
                    enc.forward_prepared(&xs).steps
                })
                .collect();
            Ok(PovOutputs { steps })
        }
    }
}

pub fn assemble_inputs(layout: &ExSpcLayout, out: &PovOutputs, v: &StructuredVector) -> Result<ExSpcInput> {
    if out.steps.len() != NUM_STREAMS {
        return Err(CoreError::MissingEmbedding(format!("{} of {NUM_STREAMS} streams", out.steps.len())));
    }
    let e = layout.step_width;
    let mut streams = Vec::with_capacity(NUM_STREAMS);
    let mut active = Vec::with_capacity(NUM_STREAMS);
    for (s, steps) in out.steps.iter().enumerate() {
        let pad = layout.pad_lens[s];
        let mut flat = vec![0.0; pad * e];
        let n = steps.len().min(pad);
        for (t, row) in steps.iter().take(n).enumerate() {
            if row.len() != e {
                return Err(CoreError::MissingEmbedding(format!("stream {s} step width {} != {e}", row.len())));
            }
            flat[t * e..(t + 1) * e].copy_from_slice(row);
        }
        streams.push(flat);
        active.push(n * e);
    }
    let z = layout.norm.apply(&v.values);
    Ok(ExSpcInput {
        streams,
        active,
        v28_sense: select(&z, &layout.grouping.sense_indices()),
        v28_perf: select(&z, &layout.grouping.perf_indices()),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExSpcNet {
    pub sense_streams: Vec<usize>,
    pub perf_streams: Vec<usize>,
    pub heads: Vec<Dense>,
    pub pov_sense: Vec<Dense>,
    pub pov_perf: Vec<Dense>,
    pub stats_sense: Vec<Dense>,
    pub stats_perf: Vec<Dense>,
    pub deep_sense: Vec<Dense>,
    pub deep_perf: Vec<Dense>,
    pub reduce: Dense,
    pub out: Dense,
}

fn stack(inputs: usize, widths: &[usize], rng: &mut ChaCha8Rng) -> Vec<Dense> {
    let mut w = inputs;
    widths
        .iter()
        .map(|&o| {
            let d = Dense::new(w, o, Activation::Elu, rng);
            w = o;
            d
        })
        .collect()
}

fn width(layers: &[Dense], inputs: usize) -> usize {
    layers.last().map(|l| l.outputs).unwrap_or(inputs)
}

struct StackCache {
    xs: Vec<Vec<f64>>,
    zs: Vec<Vec<f64>>,
}

fn stack_forward(layers: &[Dense], x: Vec<f64>) -> StackCache {
    let mut c = StackCache {
        xs: vec![x],
        zs: Vec::new(),
    };
    for l in layers {
        let (z, y) = l.forward(c.xs.last().unwrap());
        c.zs.push(z);
        c.xs.push(y);
    }
    c
}

fn stack_backward(layers: &[Dense], c: &StackCache, gy: Vec<f64>, grads: &mut [Dense]) -> Vec<f64> {
    let mut g = gy;
    for k in (0..layers.len()).rev() {
        g = layers[k].backward(&c.xs[k], &c.zs[k], &c.xs[k + 1], &g, &mut grads[k]);
    }
    g
}

/// Dense ELU head over the first `active` inputs only.
fn head_forward(l: &Dense, x: &[f64], active: usize) -> (Vec<f64>, Vec<f64>) {
    let z: Vec<f64> = (0..l.outputs)
        .map(|o| {
            let row = &l.w[o * l.inputs..o * l.inputs + active];
            l.b[o] + row.iter().zip(&x[..active]).map(|(a, b)| a * b).sum::<f64>()
        })
        .collect();
    let y = z.iter().map(|&v| l.activation.apply(v)).collect();
    (z, y)
}

fn head_backward(l: &Dense, x: &[f64], active: usize, z: &[f64], y: &[f64], gy: &[f64], grad: &mut Dense) {
    for o in 0..l.outputs {
        let gz = gy[o] * l.activation.derivative(z[o], y[o]);
        if gz == 0.0 {
            continue;
        }
        grad.b[o] += gz;
        let row = &mut grad.w[o * l.inputs..o * l.inputs + active];
        for (g, xv) in row.iter_mut().zip(&x[..active]) {
            *g += gz * xv;
        }
    }
}

struct Forward {
    heads: Vec<(Vec<f64>, Vec<f64>)>,
    pov_s: StackCache,
    pov_p: StackCache,
    st_s: StackCache,
    st_p: StackCache,
    deep_s: StackCache,
    deep_p: StackCache,
    reduce_x: Vec<f64>,
    reduce_z: Vec<f64>,
    reduce_y: Vec<f64>,
    logit: f64,
}

fn split_at(v: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    (v[..n].to_vec(), v[n..].to_vec())
}

impl ExSpcNet {
    pub fn new(layout: &ExSpcLayout, cfg: &ExSpcConfig, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = layout.step_width;
        let heads: Vec<Dense> = layout
            .pad_lens
            .iter()
            .map(|p| Dense::new(p * e, cfg.shrink, Activation::Elu, &mut rng))
            .collect();
        let sense_streams = layout.sense_streams();
        let perf_streams = layout.perf_streams();
        let pov_sense = stack(cfg.shrink * sense_streams.len(), &cfg.reduction, &mut rng);
        let pov_perf = stack(cfg.shrink * perf_streams.len(), &cfg.reduction, &mut rng);
        let n_s = layout.grouping.sense_indices().len();
        let n_p = layout.grouping.perf_indices().len();
        let stats_sense = stack(n_s, &cfg.reduction, &mut rng);
        let stats_perf = stack(n_p, &cfg.reduction, &mut rng);
        let vs = width(&stats_sense, n_s) + width(&pov_sense, cfg.shrink * sense_streams.len());
        let vp = width(&stats_perf, n_p) + width(&pov_perf, cfg.shrink * perf_streams.len());
        let deep_sense = stack(vs, &cfg.deepening, &mut rng);
        let deep_perf = stack(vp, &cfg.deepening, &mut rng);
        let u = width(&deep_sense, vs) + width(&deep_perf, vp);
        let reduce = Dense::new(u, cfg.final_width, Activation::Elu, &mut rng);
        let out = Dense::new(cfg.final_width, 1, Activation::Sigmoid, &mut rng);
        ExSpcNet {
            sense_streams,
            perf_streams,
            heads,
            pov_sense,
            pov_perf,
            stats_sense,
            stats_perf,
            deep_sense,
            deep_perf,
            reduce,
            out,
        }
    }

    fn run(&self, x: &ExSpcInput) -> Forward {
        let heads: Vec<(Vec<f64>, Vec<f64>)> = self
            .heads
            .iter()
            .enumerate()
            .map(|(s, h)| head_forward(h, &x.streams[s], x.active[s]))
            .collect();
        let cat = |idx: &[usize]| idx.iter().flat_map(|&s| heads[s].1.iter().copied()).collect::<Vec<f64>>();
        let pov_s = stack_forward(&self.pov_sense, cat(&self.sense_streams));
        let pov_p = stack_forward(&self.pov_perf, cat(&self.perf_streams));
        let st_s = stack_forward(&self.stats_sense, x.v28_sense.clone());
        let st_p = stack_forward(&self.stats_perf, x.v28_perf.clone());
        let v_sense = [st_s.xs.last().unwrap().as_slice(), pov_s.xs.last().unwrap()].concat();
        let v_perf = [st_p.xs.last().unwrap().as_slice(), pov_p.xs.last().unwrap()].concat();
        let deep_s = stack_forward(&self.deep_sense, v_sense);
        let deep_p = stack_forward(&self.deep_perf, v_perf);
        let reduce_x = [deep_s.xs.last().unwrap().as_slice(), deep_p.xs.last().unwrap()].concat();
        let (reduce_z, reduce_y) = self.reduce.forward(&reduce_x);
        let logit = self.out.preactivation(&reduce_y)[0];
        Forward {
            heads,
            pov_s,
            pov_p,
            st_s,
            st_p,
            deep_s,
            deep_p,
            reduce_x,
            reduce_z,
            reduce_y,
            logit,
        }
    }
}

impl Params for ExSpcNet {
    fn params(&self) -> Vec<&[f64]> {
        let mut p: Vec<&[f64]> = Vec::new();
        for l in self
            .heads
            .iter()
            .chain(&self.pov_sense)
            .chain(&self.pov_perf)
            .chain(&self.stats_sense)
            .chain(&self.stats_perf)
            .chain(&self.deep_sense)
            .chain(&self.deep_perf)
            .chain([&self.reduce, &self.out])
        {
            p.extend(l.params());
        }
        p
    }

    fn params_mut(&mut self) -> Vec<&mut [f64]> {
        let mut p: Vec<&mut [f64]> = Vec::new();
        for l in self
            .heads
            .iter_mut()
            .chain(self.pov_sense.iter_mut())
            .chain(self.pov_perf.iter_mut())
            .chain(self.stats_sense.iter_mut())
            .chain(self.stats_perf.iter_mut())
            .chain(self.deep_sense.iter_mut())
            .chain(self.deep_perf.iter_mut())
            .chain([&mut self.reduce, &mut self.out])
        {
            p.extend(l.params_mut());
        }
        p
    }
}

impl BinaryModel for ExSpcNet {
    type Input = ExSpcInput;

    fn logit(&self, x: &ExSpcInput) -> f64 {
        self.run(x).logit
    }

    fn accumulate(&self, x: &ExSpcInput, y: bool, w: ClassWeights, grad: &mut Self, _rng: Option<&mut ChaCha8Rng>) -> f64 {
        let f = self.run(x);
        let (loss, dz) = bce_logit(y, f.logit, w);
        let g_reduce_y = self.out.backward_pre(&f.reduce_y, &[dz], &mut grad.out);
        let gu = self.reduce.backward(&f.reduce_x, &f.reduce_z, &f.reduce_y, &g_reduce_y, &mut grad.reduce);
        let ds = f.deep_s.xs.last().unwrap().len();
        let (g_ds, g_dp) = split_at(&gu, ds);
        let g_vs = stack_backward(&self.deep_sense, &f.deep_s, g_ds, &mut grad.deep_sense);
        let g_vp = stack_backward(&self.deep_perf, &f.deep_p, g_dp, &mut grad.deep_perf);
        let (g_sts, g_povs) = split_at(&g_vs, f.st_s.xs.last().unwrap().len());
        let (g_stp, g_povp) = split_at(&g_vp, f.st_p.xs.last().unwrap().len());
        stack_backward(&self.stats_sense, &f.st_s, g_sts, &mut grad.stats_sense);
        stack_backward(&self.stats_perf, &f.st_p, g_stp, &mut grad.stats_perf);
        let g_cat_s = stack_backward(&self.pov_sense, &f.pov_s, g_povs, &mut grad.pov_sense);
        let g_cat_p = stack_backward(&self.pov_perf, &f.pov_p, g_povp, &mut grad.pov_perf);
        for (idx, g_cat) in [(&self.sense_streams, g_cat_s), (&self.perf_streams, g_cat_p)] {
            let mut off = 0;
            for &s in idx {
                let h = &self.heads[s];
                let gy = &g_cat[off..off + h.outputs];
                off += h.outputs;
                let (z, yv) = &f.heads[s];
                head_backward(h, &x.streams[s], x.active[s], z, yv, gy, &mut grad.heads[s]);
            }
        }
        loss
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SpcDecision {
    pub decision: bool,
    pub score: f64,
}

/// Class 1 when the score reaches one half (inclusive).
pub fn decide_score(score: f64) -> SpcDecision {
    SpcDecision {
        decision: score >= 0.5,
        score,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExSpcHistory {
    pub train_loss: Vec<f64>,
    pub validation_loss: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExSpcModel {
    pub config: ExSpcConfig,
    pub layout: ExSpcLayout,
    pub net: ExSpcNet,
    pub history: ExSpcHistory,
}

impl ExSpcModel {
    pub fn inputs(&self, pov: &RevPovModel, t: &TemporalStreams, v: &StructuredVector) -> Result<ExSpcInput> {
        let out = layout_outputs(&self.layout, pov, t)?;
        assemble_inputs(&self.layout, &out, v)
    }

    pub fn decide(&self, x: &ExSpcInput) -> Result<SpcDecision> {
        if x.streams.len() != self.net.heads.len() {
            return Err(CoreError::MissingEmbedding(format!("{} of {} streams", x.streams.len(), self.net.heads.len())));
        }
        Ok(decide_score(self.net.predict(x)))
    }
}

pub fn train_exspc(
    layout: ExSpcLayout,
    train: &[ExSpcInput],
    labels: &[bool],
    validation: Option<(&[ExSpcInput], &[bool])>,
    cfg: &ExSpcConfig,
) -> Result<ExSpcModel> {
    if train.len() != labels.len() {
        return Err(CoreError::Config(format!("{} samples, {} labels", train.len(), labels.len())));
    }
    let mut net = ExSpcNet::new(&layout, cfg, sub_seed(cfg.seed, 500));
    let tc = TrainConfig {
        seed: sub_seed(cfg.seed, 501),
        ..cfg.train.clone()
    };
    let mut validation_loss = Vec::new();
    let h = train_binary_observed(&mut net, train, labels, &tc, |_, m| {
        if let Some((vx, vy)) = validation {
            validation_loss.push(evaluate_loss(m, vx, vy, tc.class_weights));
        }
    })?;
    Ok(ExSpcModel {
        config: cfg.clone(),
        layout,
        net,
        history: ExSpcHistory {
            train_loss: h.epoch_loss,
            validation_loss,
        },
    })
}
