//! Weighted fusion of the three subsystem outputs and the threshold
//! optimizer.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::metrics::{ConfusionCounts, Metrics};

const SIMPLEX_TOL: f64 = 1e-9;
pub const GRID_STEPS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Objective {
    F1,
    Accuracy,
    /// Balanced accuracy `(TPR + TNR) / 2`, the AUC of a single operating point.
    Auc,
    AccuracySubjectToRecall { r: f64 },
}

impl Objective {
    pub fn validate(&self) -> Result<()> {
        if let Objective::AccuracySubjectToRecall { r } = self {
            if !r.is_finite() || *r <= 0.0 {
                return Err(CoreError::Config(format!("recall bound {r} must be positive")));
            }
        }
        Ok(())
    }

    /// Objective value; `None` when a constraint is violated.
    pub fn value(&self, c: &ConfusionCounts) -> Option<f64> {
        let m = c.metrics();
        match self {
            Objective::F1 => Some(m.f1.unwrap_or(0.0)),
            Objective::Accuracy => Some(m.accuracy.unwrap_or(0.0)),
            Objective::Auc => Some((m.recall.unwrap_or(0.0) + m.specificity.unwrap_or(0.0)) / 2.0),
            Objective::AccuracySubjectToRecall { r } => {
                (m.recall.unwrap_or(0.0) >= *r).then(|| m.accuracy.unwrap_or(0.0))
            }
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = CoreError;

    /// `f1`, `accuracy`, `auc`, or `accuracy-subject-to-recall:<r>`.
    fn from_str(s: &str) -> Result<Self> {
        let o = match s {
            "f1" => Objective::F1,
            "accuracy" => Objective::Accuracy,
            "auc" => Objective::Auc,
            _ => match s.strip_prefix("accuracy-subject-to-recall:") {
                Some(r) => Objective::AccuracySubjectToRecall {
                    r: r.parse().map_err(|_| CoreError::Config(format!("bad recall bound {r:?}")))?,
                },
                None => return Err(CoreError::Config(format!("unknown objective {s:?}"))),
            },
        };
        o.validate()?;
        Ok(o)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum FusionMode {
    /// Fuse the binary decisions.
    #[default]
    Binary,
    /// Fuse the continuous scores.
    Score,
}

/// One validation player: subsystem decisions and scores in the order
/// pov, stats, spc.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Triple {
    pub decisions: [bool; 3],
    pub scores: [f64; 3],
    pub label: bool,
}

impl Triple {
    pub fn binary(d_pov: bool, d_stats: bool, d_spc: bool, label: bool) -> Self {
        let s = |d: bool| if d { 1.0 } else { 0.0 };
        Triple {
            decisions: [d_pov, d_stats, d_spc],
            scores: [s(d_pov), s(d_stats), s(d_spc)],
            label,
        }
    }

    pub fn inputs(&self, mode: FusionMode) -> [f64; 3] {
        match mode {
            FusionMode::Binary => self.decisions.map(|d| if d { 1.0 } else { 0.0 }),
            FusionMode::Score => self.scores,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MvinModel {
    pub lambda: [f64; 3],
    pub epsilon: f64,
    pub objective: Objective,
    #[serde(default)]
    pub mode: FusionMode,
}

pub fn check_simplex(lambda: &[f64; 3]) -> Result<()> {
    let sum: f64 = lambda.iter().sum();
    if lambda.iter().any(|l| !(0.0..=1.0).contains(l)) || (sum - 1.0).abs() > SIMPLEX_TOL {
        return Err(CoreError::SimplexViolation(format!("{lambda:?}")));
    }
    Ok(())
}

/// `W = λ1 D_pov + λ2 D_stats + λ3 D_spc`.
pub fn fuse(lambda: &[f64; 3], d: &[f64; 3]) -> Result<f64> {
    check_simplex(lambda)?;
    Ok(fuse_unchecked(lambda, d))
}

fn fuse_unchecked(lambda: &[f64; 3], d: &[f64; 3]) -> f64 {
    lambda[0] * d[0] + lambda[1] * d[1] + lambda[2] * d[2]
}

pub fn decide_hawk(w: f64, epsilon: f64) -> bool {
    w >= epsilon
}

impl MvinModel {
    pub fn new(lambda: [f64; 3], epsilon: f64, objective: Objective) -> Result<Self> {
        check_simplex(&lambda)?;
        Ok(MvinModel {
            lambda,
            epsilon,
            objective,
            mode: FusionMode::Binary,
        })
    }

    pub fn score(&self, t: &Triple) -> f64 {
        fuse_unchecked(&self.lambda, &t.inputs(self.mode))
    }

    /// Fused weight and final decision.
    pub fn decide(&self, t: &Triple) -> (f64, bool) {
        let w = self.score(t);
        (w, decide_hawk(w, self.epsilon))
    }

    pub fn confusion(&self, triples: &[Triple]) -> ConfusionCounts {
        let mut c = ConfusionCounts::default();
        for t in triples {
            c.add(self.decide(t).1, t.label);
        }
        c
    }
}

/// The simplex grid at step `1 / GRID_STEPS`, in scan order.
pub fn lambda_grid() -> Vec<[f64; 3]> {
    let s = GRID_STEPS as f64;
    let mut out = Vec::new();
    for i in 0..=GRID_STEPS {
        for j in 0..=GRID_STEPS - i {
            let k = GRID_STEPS - i - j;
            out.push([i as f64 / s, j as f64 / s, k as f64 / s]);
        }
    }
    out
}

/// Threshold candidates: the smallest attainable W and the midpoints between
/// consecutive distinct attainable values.
pub fn epsilon_candidates(ws: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = ws.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    let mut out = Vec::with_capacity(v.len());
    if let Some(&m) = v.first() {
        out.push(m);
    }
    out.extend(v.windows(2).map(|p| (p[0] + p[1]) / 2.0));
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OptimizeResult {
    pub model: MvinModel,
    pub value: f64,
    pub counts: ConfusionCounts,
    pub metrics: Metrics,
}

fn spread(lambda: &[f64; 3]) -> f64 {
    lambda.iter().map(|l| (l - 1.0 / 3.0).powi(2)).sum()
}

/// Better objective, then higher recall (more TP), then fewer FP, then
/// weights closer to uniform.
fn better(value: f64, c: &ConfusionCounts, lambda: &[f64; 3], best: &Option<(f64, ConfusionCounts, [f64; 3])>) -> bool {
    match best {
        None => true,
        Some((bv, bc, bl)) => {
            if value != *bv {
                return value > *bv;
            }
            if c.tp != bc.tp {
                return c.tp > bc.tp;
            }
            if c.fp != bc.fp {
                return c.fp < bc.fp;
            }
            spread(lambda) < spread(bl) - 1e-12
        }
    }
}

/// Exhaustive search over the simplex grid and threshold candidates.
pub fn optimize(triples: &[Triple], objective: Objective, mode: FusionMode) -> Result<OptimizeResult> {
    objective.validate()?;
    let pos = triples.iter().filter(|t| t.label).count();
    if pos == 0 || pos == triples.len() {
        return Err(CoreError::DegenerateClass(format!(
            "validation set has {pos} positives out of {}",
            triples.len()
        )));
    }
    let inputs: Vec<[f64; 3]> = triples.iter().map(|t| t.inputs(mode)).collect();
    let mut best: Option<(f64, ConfusionCounts, [f64; 3])> = None;
    let mut best_model = None;
    for lambda in lambda_grid() {
        let ws: Vec<f64> = inputs.iter().map(|d| fuse_unchecked(&lambda, d)).collect();
        for eps in epsilon_candidates(&ws) {
            let mut c = ConfusionCounts::default();
            for (w, t) in ws.iter().zip(triples) {
                c.add(decide_hawk(*w, eps), t.label);
            }
            let Some(v) = objective.value(&c) else { continue };
            if better(v, &c, &lambda, &best) {
                best = Some((v, c, lambda));
                best_model = Some(MvinModel {
                    lambda,
                    epsilon: eps,
                    objective,
                    mode,
                });
            }
        }
    }
    match (best, best_model) {
        (Some((value, counts, _)), Some(model)) => Ok(OptimizeResult {
            model,
            value,
            counts,
            metrics: counts.metrics(),
        }),
        _ => Err(CoreError::InfeasibleConstraint {
            recall: match objective {
                Objective::AccuracySubjectToRecall { r } => r,
                _ => 0.0,
            },
        }),
    }
}
