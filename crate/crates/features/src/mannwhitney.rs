//! Two-sided Mann-Whitney U ranking of the structured features.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{FeatureError, Result};
use crate::structured::{StructuredVector, FEATURE_NAMES};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UTest {
    /// U statistic of the second sample.
    pub u: f64,
    pub z: f64,
    pub p: f64,
}

/// Normal approximation with tie correction, no continuity correction.
/// `None` when either sample is empty.
pub fn mann_whitney(x0: &[f64], x1: &[f64]) -> Option<UTest> {
    let (n0, n1) = (x0.len(), x1.len());
    if n0 == 0 || n1 == 0 {
        return None;
    }
    let mut all: Vec<(f64, bool)> = x0.iter().map(|&v| (v, false)).chain(x1.iter().map(|&v| (v, true))).collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = all.len();
    let mut rank_sum1 = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && all[j].0 == all[i].0 {
            j += 1;
        }
        let mid = (i + j + 1) as f64 / 2.0;
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        rank_sum1 += mid * all[i..j].iter().filter(|x| x.1).count() as f64;
        i = j;
    }
    let (a, b) = (n0 as f64, n1 as f64);
    let u = rank_sum1 - b * (b + 1.0) / 2.0;
    let nf = n as f64;
    let var = a * b / 12.0 * ((nf + 1.0) - tie_term / (nf * (nf - 1.0)));
    let mean = a * b / 2.0;
    if var <= 0.0 {
        return Some(UTest { u, z: 0.0, p: 1.0 });
    }
    let z = (u - mean) / var.sqrt();
    let p = erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0);
    Some(UTest { u, z, p })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FeatureRank {
    pub feature: String,
    pub u: f64,
    pub p: f64,
    pub n_honest: usize,
    pub n_cheater: usize,
}

/// Rank features by ascending p. Masked entries are dropped per feature; a
/// feature with no usable sample in one class gets p = 1.
pub fn rank_features_mannwhitney(samples: &[(StructuredVector, bool)]) -> Result<Vec<FeatureRank>> {
    rank_columns(
        &FEATURE_NAMES,
        &samples.iter().map(|(v, y)| (v.values.as_slice(), v.mask.as_slice(), *y)).collect::<Vec<_>>(),
    )
}

/// Column-wise ranking over arbitrary named features.
pub fn rank_columns(names: &[&str], rows: &[(&[f64], &[bool], bool)]) -> Result<Vec<FeatureRank>> {
    if !rows.iter().any(|r| r.2) {
        return Err(FeatureError::DegenerateClass("no cheater samples".into()));
    }
    if !rows.iter().any(|r| !r.2) {
        return Err(FeatureError::DegenerateClass("no honest samples".into()));
    }
    for r in rows {
        if r.0.len() != names.len() || r.1.len() != names.len() {
            return Err(FeatureError::Shape(format!("row of {} values for {} features", r.0.len(), names.len())));
        }
    }
    let mut out = Vec::with_capacity(names.len());
    for (j, name) in names.iter().enumerate() {
        let mut x0 = Vec::new();
        let mut x1 = Vec::new();
        for (vals, mask, y) in rows {
            if mask[j] {
                continue;
            }
            if *y {
                x1.push(vals[j]);
            } else {
                x0.push(vals[j]);
            }
        }
        let t = mann_whitney(&x0, &x1).unwrap_or(UTest { u: 0.0, z: 0.0, p: 1.0 });
        out.push(FeatureRank {
            feature: name.to_string(),
            u: t.u,
            p: t.p,
            n_honest: x0.len(),
            n_cheater: x1.len(),
        });
    }
    out.sort_by(|a, b| a.p.total_cmp(&b.p));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disjoint_samples_give_extreme_u() {
        let a: Vec<f64> = (0..20).map(f64::from).collect();
        let b: Vec<f64> = (100..120).map(f64::from).collect();
        let t = mann_whitney(&a, &b).unwrap();
        assert_eq!(t.u, 400.0);
        assert!(t.p < 1e-6);
        let s = mann_whitney(&b, &a).unwrap();
        assert_eq!(s.u, 0.0);
        assert_eq!(s.p, t.p);
    }

    #[test]
    fn constant_data_gives_p_one() {
        let t = mann_whitney(&[1.0; 5], &[1.0; 4]).unwrap();
        assert_eq!(t.p, 1.0);
    }

    #[test]
    fn empty_class_is_degenerate() {
        let v = [0.0; 2];
        let m = [false; 2];
        let rows = [(&v[..], &m[..], false)];
        assert!(matches!(rank_columns(&["a", "b"], &rows), Err(FeatureError::DegenerateClass(_))));
    }
}
