use serde::{Deserialize, Serialize};

/// Per-column z-score statistics. Columns with a standard deviation below the
/// floor are only centred.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZScore {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

pub const STD_FLOOR: f64 = 1e-9;

impl ZScore {
    pub fn identity(width: usize) -> Self {
        ZScore {
            mean: vec![0.0; width],
            std: vec![1.0; width],
        }
    }

    pub fn fit<'a, I>(rows: I, width: usize) -> Self
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut n = 0usize;
        let mut mean = vec![0.0; width];
        let mut m2 = vec![0.0; width];
        for r in rows {
            n += 1;
            for j in 0..width {
                let d = r[j] - mean[j];
                mean[j] += d / n as f64;
                m2[j] += d * (r[j] - mean[j]);
            }
        }
        let std = m2
            .iter()
            .map(|s| {
                let sd = if n > 0 { (s / n as f64).sqrt() } else { 0.0 };
                if sd < STD_FLOOR {
                    1.0
                } else {
                    sd
                }
            })
            .collect();
        ZScore { mean, std }
    }

    pub fn width(&self) -> usize {
        self.mean.len()
    }

    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(x, (m, s))| (x - m) / s)
            .collect()
    }
}
