//! Detection subsystems, multi-view fusion, threshold optimization and
//! evaluation.

pub mod bancycle;
pub mod dataset;
pub mod error;
pub mod exspc;
pub mod metrics;
pub mod mvin;
pub mod pipeline;
pub mod report;
pub mod revpov;
pub mod revstats;
pub mod robustness;
pub mod subsample;
pub mod vote;

pub use error::{CoreError, Result};
pub use metrics::{auc_roc, metrics, ConfusionCounts, Metrics};
pub use mvin::{decide_hawk, fuse, optimize, FusionMode, MvinModel, Objective, Triple};
pub use subsample::{multi_subsample, SubsampleSet};
pub use bancycle::{ban_cycle_csv, ban_cycle_report, BanCycleRow};
pub use dataset::{dataset_samples, labels_of, match_samples, PlayerSample};
pub use pipeline::{
    evaluate_predictions, train_pipeline, EvaluationReport, FeatureContribution, ModelBundle, PipelineConfig,
    PlayerVerdict, SubsystemEval,
};
pub use report::{CheatReport, Evidence, TimelineKind, TimelineRow};
pub use robustness::{robustness_sweep, SweepRow, SweepTable};
