//! Feature extraction: temporal streams, engagements, the 28 structured
//! features, sense/performance grouping and Mann-Whitney feature ranking.

pub mod config;
pub mod engagement;
pub mod error;
pub mod grouping;
pub mod mannwhitney;
pub mod streams;
pub mod structured;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use hawk_replay::{MatchRecord, SteamId};

pub use config::FeatureConfig;
pub use engagement::{segment_engagements, Engagement};
pub use error::{FeatureError, Result};
pub use grouping::SensePerfGrouping;
pub use mannwhitney::{mann_whitney, rank_features_mannwhitney, FeatureRank, UTest};
pub use streams::{extract_streams, Sequence, StreamKind, TemporalStreams};
pub use structured::{
    aiming_features, elimination_features, feature_vector, firing_features, props_features, StructuredVector,
    FEATURE_NAMES, NUM_FEATURES,
};

/// Everything extracted for one player of one match.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PlayerFeatures {
    pub steam_id: SteamId,
    pub v28: Vec<f64>,
    pub mask: Vec<bool>,
    pub streams: BTreeMap<String, Vec<Vec<f64>>>,
}

impl PlayerFeatures {
    pub fn structured(&self) -> Result<StructuredVector> {
        StructuredVector::new(self.v28.clone(), self.mask.clone())
    }

    pub fn temporal(&self) -> Result<TemporalStreams> {
        let mut out = TemporalStreams::empty();
        for kind in StreamKind::ALL {
            let Some(rows) = self.streams.get(kind.name()) else { continue };
            let s = out.get_mut(kind);
            for r in rows {
                if r.len() != kind.width() {
                    return Err(FeatureError::Shape(format!(
                        "{} row has {} columns, expected {}",
                        kind.name(),
                        r.len(),
                        kind.width()
                    )));
                }
                s.push(r);
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MatchFeatures {
    pub match_id: String,
    pub players: Vec<PlayerFeatures>,
}

impl MatchFeatures {
    pub fn player(&self, id: SteamId) -> Option<&PlayerFeatures> {
        self.players.iter().find(|p| p.steam_id == id)
    }
}

fn streams_map(t: &TemporalStreams) -> BTreeMap<String, Vec<Vec<f64>>> {
    StreamKind::ALL
        .iter()
        .map(|k| (k.name().to_string(), t.get(*k).rows().map(|r| r.to_vec()).collect()))
        .collect()
}

/// Streams and structured vector for one player.
pub fn extract_player(m: &MatchRecord, player: SteamId, cfg: &FeatureConfig) -> Result<PlayerFeatures> {
    let streams = extract_streams(m, player, cfg)?;
    let v = feature_vector(m, player, cfg)?;
    Ok(PlayerFeatures {
        steam_id: player,
        v28: v.values,
        mask: v.mask,
        streams: streams_map(&streams),
    })
}

/// Extract every player of a match, in roster order.
pub fn extract_match(m: &MatchRecord, cfg: &FeatureConfig) -> Result<MatchFeatures> {
    let players = m
        .players
        .iter()
        .map(|p| extract_player(m, p.steam_id, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(MatchFeatures {
        match_id: m.match_id.clone(),
        players,
    })
}
