use chrono::{DateTime, Utc};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ReplayError, Result};
use crate::model::{LabelSet, MatchRecord};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

impl SplitRatios {
    pub fn new(train: f64, validation: f64, test: f64) -> Self {
        SplitRatios { train, validation, test }
    }

    pub fn validate(&self) -> Result<()> {
        let r = [self.train, self.validation, self.test];
        if r.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(ReplayError::Config(format!("negative or non-finite split ratio in {r:?}")));
        }
        let sum: f64 = r.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(ReplayError::Config(format!("split ratios sum to {sum}, expected 1")));
        }
        Ok(())
    }
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios::new(0.6, 0.2, 0.2)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Split<T> {
    pub train: Vec<T>,
    pub validation: Vec<T>,
    pub test: Vec<T>,
}

/// Partition `dates.len()` items. With `by_date` the items are ordered by date
/// (stable on ties) before cutting; otherwise they are shuffled with `seed`.
pub fn split_indices(dates: &[DateTime<Utc>], ratios: SplitRatios, by_date: bool, seed: u64) -> Result<SplitIndices> {
    ratios.validate()?;
    let n = dates.len();
    let mut order: Vec<usize> = (0..n).collect();
    if by_date {
        order.sort_by_key(|&i| dates[i]);
    } else {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let n_train = ((n as f64) * ratios.train).round() as usize;
    let n_train = n_train.min(n);
    let n_val = (((n as f64) * ratios.validation).round() as usize).min(n - n_train);
    let test = order.split_off(n_train + n_val);
    let validation = order.split_off(n_train);
    Ok(SplitIndices { train: order, validation, test })
}

pub fn split_dataset(
    data: Vec<(MatchRecord, LabelSet)>,
    ratios: SplitRatios,
    by_date: bool,
    seed: u64,
) -> Result<Split<(MatchRecord, LabelSet)>> {
    let dates: Vec<_> = data.iter().map(|(m, _)| m.date_utc).collect();
    let idx = split_indices(&dates, ratios, by_date, seed)?;
    Ok(apply_split(data, &idx))
}

pub fn apply_split<T>(data: Vec<T>, idx: &SplitIndices) -> Split<T> {
    let mut slots: Vec<Option<T>> = data.into_iter().map(Some).collect();
    let mut take = |ids: &[usize]| -> Vec<T> { ids.iter().map(|&i| slots[i].take().expect("index used twice")).collect() };
    let train = take(&idx.train);
    let validation = take(&idx.validation);
    let test = take(&idx.test);
    Split { train, validation, test }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn dates(n: usize) -> Vec<DateTime<Utc>> {
        (0..n)
            .map(|i| Utc.with_ymd_and_hms(2023, 1, 1, 0, 0, 0).unwrap() + chrono::Duration::days(((i * 7) % n) as i64))
            .collect()
    }

    #[test]
    fn sizes_follow_ratios() {
        let s = split_indices(&dates(10), SplitRatios::new(0.6, 0.2, 0.2), false, 1).unwrap();
        assert_eq!((s.train.len(), s.validation.len(), s.test.len()), (6, 2, 2));
    }

    #[test]
    fn negative_ratio_is_rejected() {
        assert!(split_indices(&dates(4), SplitRatios::new(1.2, -0.2, 0.0), false, 1).is_err());
        assert!(split_indices(&dates(4), SplitRatios::new(0.5, 0.2, 0.2), false, 1).is_err());
    }

    #[test]
    fn by_date_orders_partitions() {
        let d = dates(10);
        let s = split_indices(&d, SplitRatios::new(0.6, 0.2, 0.2), true, 1).unwrap();
        let max_train = s.train.iter().map(|&i| d[i]).max().unwrap();
        let min_val = s.validation.iter().map(|&i| d[i]).min().unwrap();
        let max_val = s.validation.iter().map(|&i| d[i]).max().unwrap();
        let min_test = s.test.iter().map(|&i| d[i]).min().unwrap();
        assert!(max_train <= min_val && max_val <= min_test);
    }

    #[test]
    fn same_seed_same_split() {
        let d = dates(25);
        let r = SplitRatios::new(0.5, 0.25, 0.25);
        assert_eq!(split_indices(&d, r, false, 9).unwrap(), split_indices(&d, r, false, 9).unwrap());
    }
}
