//! Cheat reports and the evidence shown to reviewers.

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use hawk_features::{segment_engagements, FeatureConfig, StructuredVector, FEATURE_NAMES};
use hawk_replay::{MatchRecord, SteamId};

use crate::error::Result;
use crate::pipeline::{FeatureContribution, ModelBundle, PlayerVerdict};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CheatReport {
    pub report_id: String,
    pub match_id: String,
    pub created_utc: DateTime<Utc>,
    pub model_version: String,
    pub players: Vec<PlayerVerdict>,
}

impl CheatReport {
    pub fn flagged(&self) -> impl Iterator<Item = &PlayerVerdict> {
        self.players.iter().filter(|p| p.d_hawk)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum TimelineKind {
    Engage,
    Fire,
    Hit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TimelineRow {
    pub tick: i64,
    pub round_num: u32,
    pub kind: TimelineKind,
    pub opponent: SteamId,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Evidence {
    /// All structured features with their z-scores, largest magnitude first.
    pub zscores: Vec<FeatureContribution>,
    pub timeline: Vec<TimelineRow>,
}

pub fn zscores(bundle: &ModelBundle, v: &StructuredVector) -> Vec<FeatureContribution> {
    let z = bundle.revstats.norm.apply(&v.values);
    let mut out: Vec<FeatureContribution> = (0..z.len())
        .map(|i| FeatureContribution {
            feature: FEATURE_NAMES[i].to_string(),
            value: v.values[i],
            z: if v.mask[i] { 0.0 } else { z[i] },
        })
        .collect();
    out.sort_by(|a, b| b.z.abs().total_cmp(&a.z.abs()).then_with(|| a.feature.cmp(&b.feature)));
    out
}

/// Engagement timeline sorted by tick.
pub fn timeline(m: &MatchRecord, player: SteamId, cfg: &FeatureConfig) -> Result<Vec<TimelineRow>> {
    let mut rows = Vec::new();
    for e in segment_engagements(m, player, cfg)? {
        let mut push = |tick: Option<i64>, kind| {
            if let Some(t) = tick {
                rows.push(TimelineRow {
                    tick: t,
                    round_num: e.round_num,
                    kind,
                    opponent: e.opponent_id,
                });
            }
        };
        push(Some(e.t0_tick as i64), TimelineKind::Engage);
        push(e.t1_tick.map(|t| t as i64), TimelineKind::Fire);
        push(e.t2_tick.map(|t| t as i64), TimelineKind::Hit);
    }
    rows.sort_by_key(|r| (r.tick, r.kind as u8, r.opponent));
    Ok(rows)
}

pub fn evidence(bundle: &ModelBundle, m: &MatchRecord, player: SteamId) -> Result<Evidence> {
    let cfg = &bundle.config.features;
    let v = hawk_features::feature_vector(m, player, cfg)?;
    Ok(Evidence {
        zscores: zscores(bundle, &v),
        timeline: timeline(m, player, cfg)?,
    })
}
