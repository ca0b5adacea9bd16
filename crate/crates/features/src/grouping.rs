//! Sense / performance partition of the streams and the structured features.

use serde::{Deserialize, Serialize};

use crate::streams::StreamKind;
use crate::structured::{feature_index, FEATURE_NAMES};

pub const STRUCTURED_SENSE: [&str; 5] = ["fei", "opi", "isp", "bkp", "pui"];

pub const TEMPORAL_SENSE: [StreamKind; 4] = [
    StreamKind::Movement,
    StreamKind::Economy,
    StreamKind::OffensiveProps,
    StreamKind::AuxiliaryProps,
];

pub const TEMPORAL_PERF: [StreamKind; 3] = [StreamKind::WeaponFire, StreamKind::Elimination, StreamKind::Damage];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SensePerfGrouping {
    pub temporal_sense: Vec<StreamKind>,
    pub temporal_perf: Vec<StreamKind>,
    pub structured_sense: Vec<String>,
    pub structured_perf: Vec<String>,
}

impl Default for SensePerfGrouping {
    fn default() -> Self {
        SensePerfGrouping {
            temporal_sense: TEMPORAL_SENSE.to_vec(),
            temporal_perf: TEMPORAL_PERF.to_vec(),
            structured_sense: STRUCTURED_SENSE.iter().map(|s| s.to_string()).collect(),
            structured_perf: FEATURE_NAMES
                .iter()
                .filter(|n| !STRUCTURED_SENSE.contains(n))
                .map(|s| s.to_string())
                .collect(),
        }
    }
}

impl SensePerfGrouping {
    /// Positions of the sense features inside V28.
    pub fn sense_indices(&self) -> Vec<usize> {
        self.structured_sense.iter().filter_map(|n| feature_index(n)).collect()
    }

    pub fn perf_indices(&self) -> Vec<usize> {
        self.structured_perf.iter().filter_map(|n| feature_index(n)).collect()
    }
}

/// Pick `idx` columns out of a row.
pub fn select(row: &[f64], idx: &[usize]) -> Vec<f64> {
    idx.iter().map(|&i| row[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn structured_sets_partition_the_vector() {
        let g = SensePerfGrouping::default();
        assert_eq!(g.structured_perf.len(), 23);
        let mut all: Vec<usize> = g.sense_indices();
        all.extend(g.perf_indices());
        let set: BTreeSet<usize> = all.iter().copied().collect();
        assert_eq!(all.len(), 28);
        assert_eq!(set.len(), 28);
    }

    #[test]
    fn temporal_sets_partition_the_streams() {
        let g = SensePerfGrouping::default();
        let mut all: Vec<StreamKind> = g.temporal_sense.clone();
        all.extend(&g.temporal_perf);
        all.sort();
        assert_eq!(all, StreamKind::ALL.to_vec());
    }
}
