//! Balanced multi-subsampling of an imbalanced binary dataset.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

pub const MAX_SETS: usize = 15;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SubsampleSet {
    pub index: usize,
    pub honest: Vec<usize>,
    pub cheaters: Vec<usize>,
}

impl SubsampleSet {
    /// Cheaters first, then honest, each in draw order.
    pub fn indices(&self) -> Vec<usize> {
        self.cheaters.iter().chain(&self.honest).copied().collect()
    }

    pub fn len(&self) -> usize {
        self.honest.len() + self.cheaters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `round(majority / minority)` clamped to `[1, MAX_SETS]`.
pub fn subsample_count(n_honest: usize, n_cheater: usize) -> usize {
    let (hi, lo) = if n_honest >= n_cheater { (n_honest, n_cheater) } else { (n_cheater, n_honest) };
    if lo == 0 {
        return 1;
    }
    ((hi as f64 / lo as f64).round() as usize).clamp(1, MAX_SETS)
}

/// Every set keeps the whole minority class and draws as many majority
/// samples. Majority draws do not repeat across sets until the pool runs
/// out, after which a freshly shuffled pool is used.
pub fn multi_subsample(labels: &[bool], seed: u64) -> Result<Vec<SubsampleSet>> {
    let cheaters: Vec<usize> = (0..labels.len()).filter(|&i| labels[i]).collect();
    let honest: Vec<usize> = (0..labels.len()).filter(|&i| !labels[i]).collect();
    if cheaters.is_empty() || honest.is_empty() {
        return Err(CoreError::DegenerateClass(format!(
            "{} honest and {} cheater samples",
            honest.len(),
            cheaters.len()
        )));
    }
    let k = subsample_count(honest.len(), cheaters.len());
    let cheater_major = cheaters.len() > honest.len();
    let (minor, major) = if cheater_major { (&honest, &cheaters) } else { (&cheaters, &honest) };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool = major.clone();
    pool.shuffle(&mut rng);
    let mut cursor = 0;
    let mut sets = Vec::with_capacity(k);
    for index in 0..k {
        let mut drawn: Vec<usize> = Vec::with_capacity(minor.len());
        while drawn.len() < minor.len() {
            if cursor == pool.len() {
                pool.shuffle(&mut rng);
                cursor = 0;
            }
            let c = pool[cursor];
            cursor += 1;
            if !drawn.contains(&c) {
                drawn.push(c);
            }
        }
        let (h, c) = if cheater_major { (minor.clone(), drawn) } else { (drawn, minor.clone()) };
        sets.push(SubsampleSet {
            index,
            honest: h,
            cheaters: c,
        });
    }
    Ok(sets)
}
