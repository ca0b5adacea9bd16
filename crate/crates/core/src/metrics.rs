//! Confusion counts, derived rates and rank-based AUC.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn new(tp: u64, tn: u64, fp: u64, fn_: u64) -> Self {
        ConfusionCounts { tp, tn, fp, fn_ }
    }

    pub fn from_predictions(pred: &[bool], labels: &[bool]) -> Self {
        let mut c = ConfusionCounts::default();
        for (&p, &l) in pred.iter().zip(labels) {
            c.add(p, l);
        }
        c
    }

    pub fn add(&mut self, pred: bool, label: bool) {
        match (pred, label) {
            (true, true) => self.tp += 1,
            (false, false) => self.tn += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }

    pub fn metrics(&self) -> Metrics {
        metrics(*self)
    }
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Rates derived from a confusion matrix; `None` marks an undefined value
/// (zero denominator).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Metrics {
    pub n: u64,
    pub accuracy: Option<f64>,
    pub recall: Option<f64>,
    pub precision: Option<f64>,
    pub specificity: Option<f64>,
    pub npv: Option<f64>,
    pub f1: Option<f64>,
    pub oei: Option<f64>,
}

pub fn metrics(c: ConfusionCounts) -> Metrics {
    let n = c.total();
    let recall = ratio(c.tp, c.tp + c.fn_);
    let precision = ratio(c.tp, c.tp + c.fp);
    let npv = ratio(c.tn, c.tn + c.fn_);
    let f1 = ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn_);
    let oei = match (ratio(n, c.tp + c.fp), recall, npv) {
        (Some(a), Some(r), Some(v)) => Some(a * r * v),
        _ => None,
    };
    Metrics {
        n,
        accuracy: ratio(c.tp + c.tn, n),
        recall,
        precision,
        specificity: ratio(c.tn, c.tn + c.fp),
        npv,
        f1,
        oei,
    }
}

/// OEI with an externally supplied sample count.
pub fn oei_with_n(c: ConfusionCounts, n: u64) -> Option<f64> {
    let m = metrics(c);
    Some(ratio(n, c.tp + c.fp)? * m.recall? * m.npv?)
}

/// ROC AUC from average ranks: ties between a positive and a negative count
/// one half.
pub fn auc_roc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(CoreError::Config(format!("{} scores, {} labels", scores.len(), labels.len())));
    }
    let n1 = labels.iter().filter(|l| **l).count();
    let n0 = labels.len() - n1;
    if n1 == 0 || n0 == 0 {
        return Err(CoreError::DegenerateClass(format!("{n0} negatives, {n1} positives")));
    }
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // twice the rank sum keeps everything integral
    let mut rank2_pos: u128 = 0;
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && scores[idx[j + 1]] == scores[idx[i]] {
            j += 1;
        }
        let rank2 = (i + 1 + j + 1) as u128;
        for &k in &idx[i..=j] {
            if labels[k] {
                rank2_pos += rank2;
            }
        }
        i = j + 1;
    }
    let u2 = rank2_pos - (n1 as u128) * (n1 as u128 + 1);
    Ok(u2 as f64 / (2 * n1 * n0) as f64)
}
