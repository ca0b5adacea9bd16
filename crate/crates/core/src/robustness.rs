//! Date-partitioned robustness sweep: train on growing prefixes of a dated
//! corpus and evaluate each model on fixed validation and test sets.

use chrono::{DateTime, Utc};
use log::info;
use serde::{Deserialize, Serialize};

use hawk_replay::{LabelSet, MatchRecord};

use crate::dataset::dataset_samples;
use crate::error::{CoreError, Result};
use crate::metrics::Metrics;
use crate::pipeline::{train_pipeline, PipelineConfig, SubsystemEval};

pub const PARTITION_SIZE: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepMetrics {
    pub accuracy: Option<f64>,
    pub recall: Option<f64>,
    pub npv: Option<f64>,
    pub auc: Option<f64>,
    pub oei: Option<f64>,
}

impl SweepMetrics {
    fn from_eval(e: &SubsystemEval) -> Self {
        let m: &Metrics = &e.metrics;
        SweepMetrics {
            accuracy: m.accuracy,
            recall: m.recall,
            npv: m.npv,
            auc: e.auc,
            oei: m.oei,
        }
    }

    fn cells(&self) -> [Option<f64>; 5] {
        [self.accuracy, self.recall, self.npv, self.auc, self.oei]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepRow {
    pub partitions: usize,
    pub train_matches: usize,
    pub last_date_utc: DateTime<Utc>,
    pub validation: SweepMetrics,
    pub test: SweepMetrics,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

pub const SWEEP_COLUMNS: [&str; 13] = [
    "partitions",
    "trainMatches",
    "lastDateUtc",
    "valAccuracy",
    "valRecall",
    "valNpv",
    "valAuc",
    "valOei",
    "testAccuracy",
    "testRecall",
    "testNpv",
    "testAuc",
    "testOei",
];

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

impl SweepTable {
    /// Undefined metrics are written as empty cells.
    pub fn to_csv(&self) -> String {
        let mut out = SWEEP_COLUMNS.join(",");
        out.push('\n');
        for r in &self.rows {
            let mut cells = vec![
                r.partitions.to_string(),
                r.train_matches.to_string(),
                r.last_date_utc.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            ];
            cells.extend(r.validation.cells().into_iter().map(cell));
            cells.extend(r.test.cells().into_iter().map(cell));
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Sort by date (then match id) and keep only whole partitions.
pub fn partition_by_date(pool: &[(MatchRecord, LabelSet)], size: usize) -> Result<Vec<Vec<(MatchRecord, LabelSet)>>> {
    if size == 0 {
        return Err(CoreError::Config("partition size must be positive".into()));
    }
    let mut sorted = pool.to_vec();
    sorted.sort_by(|a, b| a.0.date_utc.cmp(&b.0.date_utc).then_with(|| a.0.match_id.cmp(&b.0.match_id)));
    let n = sorted.len() / size;
    if n < 2 {
        return Err(CoreError::InsufficientData(format!(
            "{} matches make {n} partitions of {size}; at least 2 needed",
            pool.len()
        )));
    }
    Ok(sorted.chunks(size).take(n).map(|c| c.to_vec()).collect())
}

pub fn robustness_sweep(
    pool: &[(MatchRecord, LabelSet)],
    validation: &[(MatchRecord, LabelSet)],
    test: &[(MatchRecord, LabelSet)],
    partition_size: usize,
    cfg: &PipelineConfig,
) -> Result<SweepTable> {
    let parts = partition_by_date(pool, partition_size)?;
    let val = dataset_samples(validation, &cfg.features)?;
    let tst = dataset_samples(test, &cfg.features)?;
    let mut prefixes = Vec::with_capacity(parts.len());
    let mut train = Vec::new();
    for part in &parts {
        train.extend(dataset_samples(part, &cfg.features)?);
        prefixes.push(train.clone());
    }
    let run = |p: usize, train: &[crate::dataset::PlayerSample]| -> Result<SweepRow> {
        info!("sweep prefix {} with {} players", p + 1, train.len());
        let bundle = train_pipeline(train, &val, cfg)?;
        let ve = bundle.evaluate(&val)?;
        let te = bundle.evaluate(&tst)?;
        Ok(SweepRow {
            partitions: p + 1,
            train_matches: (p + 1) * partition_size,
            last_date_utc: parts[p].last().map(|m| m.0.date_utc).unwrap_or_default(),
            validation: SweepMetrics::from_eval(&ve.subsystems["hawk"]),
            test: SweepMetrics::from_eval(&te.subsystems["hawk"]),
        })
    };
    let rows = std::thread::scope(|s| {
        let handles: Vec<_> = prefixes
            .iter()
            .enumerate()
            .map(|(p, train)| s.spawn(move || run(p, train)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|e| std::panic::resume_unwind(e)))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(SweepTable { rows })
}
