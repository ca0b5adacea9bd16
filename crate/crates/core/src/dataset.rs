//! Per-player samples extracted from labeled matches.

use chrono::{DateTime, Utc};

use hawk_features::{extract_streams, feature_vector, FeatureConfig, StructuredVector, TemporalStreams};
use hawk_replay::{CheatType, LabelSet, MatchRecord, SteamId};

use crate::error::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct PlayerSample {
    pub match_id: String,
    pub steam_id: SteamId,
    pub date_utc: DateTime<Utc>,
    pub label: bool,
    pub cheat_type: CheatType,
    pub streams: TemporalStreams,
    pub v28: StructuredVector,
}

/// Every roster player of a match. Without labels everyone is honest.
pub fn match_samples(m: &MatchRecord, labels: Option<&LabelSet>, cfg: &FeatureConfig) -> Result<Vec<PlayerSample>> {
    m.players
        .iter()
        .map(|p| {
            let l = labels.and_then(|l| l.get(p.steam_id));
            Ok(PlayerSample {
                match_id: m.match_id.clone(),
                steam_id: p.steam_id,
                date_utc: m.date_utc,
                label: l.map(|l| l.cheater).unwrap_or(false),
                cheat_type: l.map(|l| l.cheat_type).unwrap_or(CheatType::None),
                streams: extract_streams(m, p.steam_id, cfg)?,
                v28: feature_vector(m, p.steam_id, cfg)?,
            })
        })
        .collect()
}

pub fn dataset_samples(data: &[(MatchRecord, LabelSet)], cfg: &FeatureConfig) -> Result<Vec<PlayerSample>> {
    let mut out = Vec::new();
    for (m, l) in data {
        out.extend(match_samples(m, Some(l), cfg)?);
    }
    Ok(out)
}

pub fn labels_of(samples: &[PlayerSample]) -> Vec<bool> {
    samples.iter().map(|s| s.label).collect()
}
