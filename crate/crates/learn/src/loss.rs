//! Class-weighted binary cross-entropy.

use serde::{Deserialize, Serialize};

use crate::layers::sigmoid;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassWeights {
    pub negative: f64,
    pub positive: f64,
}

impl Default for ClassWeights {
    fn default() -> Self {
        ClassWeights { negative: 1.0, positive: 9.0 }
    }
}

impl ClassWeights {
    pub const UNIFORM: ClassWeights = ClassWeights { negative: 1.0, positive: 1.0 };

    pub fn of(&self, y: bool) -> f64 {
        if y {
            self.positive
        } else {
            self.negative
        }
    }
}

const P_FLOOR: f64 = 1e-15;

/// Weighted BCE of one probability.
pub fn bce(y: bool, p: f64, w: ClassWeights) -> f64 {
    let p = p.clamp(P_FLOOR, 1.0 - P_FLOOR);
    let t = if y { p.ln() } else { (1.0 - p).ln() };
    -w.of(y) * t
}

/// `d bce / d p`.
pub fn bce_grad(y: bool, p: f64, w: ClassWeights) -> f64 {
    let p = p.clamp(P_FLOOR, 1.0 - P_FLOOR);
    if y {
        -w.of(y) / p
    } else {
        w.of(y) / (1.0 - p)
    }
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Weighted BCE of `sigmoid(z)` and its derivative with respect to `z`.
pub fn bce_logit(y: bool, z: f64, w: ClassWeights) -> (f64, f64) {
    let t = if y { 1.0 } else { 0.0 };
    let loss = softplus(z) - t * z;
    (w.of(y) * loss, w.of(y) * (sigmoid(z) - t))
}

/// Mean weighted BCE over a batch.
pub fn mean_bce(labels: &[bool], probs: &[f64], w: ClassWeights) -> f64 {
    let n = labels.len().max(1) as f64;
    labels.iter().zip(probs).map(|(y, p)| bce(*y, *p, w)).sum::<f64>() / n
}
