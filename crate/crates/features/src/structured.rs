//! The 28 structured per-player features.

use serde::{Deserialize, Serialize};

use hawk_replay::{is_sniper_class, HitGroup, MatchRecord, SteamId};

use crate::config::FeatureConfig;
use crate::engagement::{segment_engagements, Engagement};
use crate::error::{FeatureError, Result};
use crate::streams::find_player;

pub const NUM_FEATURES: usize = 28;

pub const FEATURE_NAMES: [&str; NUM_FEATURES] = [
    "rat-avg", "rat-var", "ajt-avg", "ajt-var", "drt-avg", "drt-var", "v-avg", "v-var", "raa-avg", "raa-var",
    "aja-avg", "aja-var", "isp", "fhp", "precis", "shp", "hgd", "shr", "ttk-avg", "ttk-var", "fkp", "otp", "opi",
    "bkp", "chp", "akpr", "fei", "pui",
];

/// Features bounded to `[0, 1]`.
pub const RATIO_FEATURES: [&str; 9] = ["isp", "fhp", "precis", "shp", "shr", "fkp", "otp", "bkp", "chp"];

pub fn feature_index(name: &str) -> Option<usize> {
    FEATURE_NAMES.iter().position(|n| *n == name)
}

/// A run of feature values with a parallel missing mask.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FeatureBlock {
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
}

impl FeatureBlock {
    fn push(&mut self, (v, missing): (f64, bool)) {
        self.values.push(v);
        self.mask.push(missing);
    }

    fn push_stats(&mut self, xs: &[f64]) {
        let (avg, var, missing) = match mean_var(xs) {
            Some((a, v)) => (a, v, false),
            None => (0.0, 0.0, true),
        };
        self.push((avg, missing));
        self.push((var, missing));
    }

    fn extend(&mut self, other: FeatureBlock) {
        self.values.extend(other.values);
        self.mask.extend(other.mask);
    }
}

/// The ordered 28-value vector and its missing mask.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructuredVector {
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
}

impl StructuredVector {
    pub fn new(values: Vec<f64>, mask: Vec<bool>) -> Result<Self> {
        if values.len() != NUM_FEATURES || mask.len() != NUM_FEATURES {
            return Err(FeatureError::Shape(format!(
                "expected {NUM_FEATURES} values and mask bits, got {} and {}",
                values.len(),
                mask.len()
            )));
        }
        Ok(StructuredVector { values, mask })
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        feature_index(name).map(|i| self.values[i])
    }

    pub fn is_missing(&self, name: &str) -> Option<bool> {
        feature_index(name).map(|i| self.mask[i])
    }

    /// Values followed by the mask as 0/1 columns.
    pub fn with_mask_columns(&self) -> Vec<f64> {
        let mut out = self.values.clone();
        out.extend(self.mask.iter().map(|&m| if m { 1.0 } else { 0.0 }));
        out
    }
}

/// Population mean and variance; `None` for an empty sample.
pub fn mean_var(xs: &[f64]) -> Option<(f64, f64)> {
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    Some((mean, var))
}

fn ratio(num: f64, den: f64) -> (f64, bool) {
    if den == 0.0 {
        (0.0, true)
    } else {
        (num / den, false)
    }
}

fn clamped_ratio(num: f64, den: f64) -> (f64, bool) {
    let (v, m) = ratio(num, den);
    (v.min(1.0), m)
}

/// rat, ajt, drt, v, raa, aja: mean and variance each.
pub fn aiming_features(engagements: &[Engagement]) -> FeatureBlock {
    let rat: Vec<f64> = engagements.iter().filter_map(|e| e.rat).collect();
    let ajt: Vec<f64> = engagements.iter().filter_map(|e| e.ajt).collect();
    let drt: Vec<f64> = engagements.iter().filter_map(|e| e.drt).collect();
    let v: Vec<f64> = engagements
        .iter()
        .filter_map(|e| match (e.drt, e.hit_distance) {
            (Some(d), Some(dist)) if d > 0.0 => Some(dist / d),
            _ => None,
        })
        .collect();
    let raa: Vec<f64> = engagements.iter().filter_map(|e| e.raa).collect();
    let aja: Vec<f64> = engagements.iter().filter_map(|e| e.aja).collect();
    let mut b = FeatureBlock::default();
    for xs in [&rat, &ajt, &drt, &v, &raa, &aja] {
        b.push_stats(xs);
    }
    b
}

/// isp, fhp, precis, shp, hgd, shr.
pub fn firing_features(m: &MatchRecord, player: SteamId, cfg: &FeatureConfig) -> FeatureBlock {
    let mut fires: Vec<_> = m.weapon_fires.iter().filter(|f| f.player_steam_id == player).collect();
    fires.sort_by_key(|f| f.tick);
    let mut damages: Vec<_> = m
        .damages
        .iter()
        .filter(|d| d.attacker_steam_id == player && d.is_on_opponent())
        .collect();
    damages.sort_by_key(|d| d.tick);
    let kills: Vec<_> = m
        .kills
        .iter()
        .filter(|k| k.attacker_steam_id == player && k.is_on_opponent())
        .collect();

    let mut b = FeatureBlock::default();

    let inertial = kills
        .iter()
        .filter(|k| {
            fires.iter().any(|f| {
                let dt = m.secs_between(k.tick, f.tick);
                dt > 0.0 && dt <= cfg.isp_window_secs
            })
        })
        .count();
    b.push(ratio(inertial as f64, kills.len() as f64));

    let mut rounds = 0usize;
    let mut first_hits = 0usize;
    for (i, f) in fires.iter().enumerate() {
        let starts = match i {
            0 => true,
            _ => {
                let p = fires[i - 1];
                f.round_num != p.round_num
                    || f.ammo_in_magazine > p.ammo_in_magazine
                    || m.secs_between(p.tick, f.tick) > cfg.fire_round_gap_secs
            }
        };
        if !starts {
            continue;
        }
        rounds += 1;
        if damages
            .iter()
            .any(|d| m.secs_between(d.tick, f.tick).abs() <= cfg.fhp_tolerance_secs)
        {
            first_hits += 1;
        }
    }
    b.push(ratio(first_hits as f64, rounds as f64));

    let n_dmg = damages.len() as f64;
    b.push(clamped_ratio(n_dmg, fires.len() as f64));

    let strafing = damages.iter().filter(|d| d.attacker_strafe).count();
    b.push(ratio(strafing as f64, n_dmg));

    let mut hg = [0.0f64; 9];
    for d in &damages {
        hg[d.hit_group.index()] += 1.0;
    }
    if n_dmg == 0.0 {
        b.push((0.0, true));
    } else {
        let mean = hg.iter().sum::<f64>() / n_dmg;
        let ss = hg.iter().map(|h| (h - mean) * (h - mean)).sum::<f64>();
        b.push((ss / n_dmg, false));
    }

    let scale = cfg.distance_scale;
    let mut special = 0usize;
    for d in &damages {
        let dist = d.distance * scale;
        let head = d.hit_group == HitGroup::Head;
        if is_sniper_class(&d.weapon_class) {
            special += usize::from((50.0..=150.0).contains(&dist));
            special += usize::from(head && (40.0..=170.0).contains(&dist));
        } else {
            special += usize::from(dist >= 800.0);
            special += usize::from(head && dist >= 700.0);
        }
    }
    b.push(clamped_ratio(special as f64, n_dmg));
    b
}

/// ttk (mean, variance), fkp, otp, opi, bkp, chp, akpr.
pub fn elimination_features(m: &MatchRecord, player: SteamId, cfg: &FeatureConfig) -> FeatureBlock {
    let mut kills: Vec<_> = m
        .kills
        .iter()
        .filter(|k| k.attacker_steam_id == player && k.is_on_opponent())
        .collect();
    kills.sort_by_key(|k| k.tick);
    let mut damages: Vec<_> = m
        .damages
        .iter()
        .filter(|d| d.attacker_steam_id == player && d.is_on_opponent())
        .collect();
    damages.sort_by_key(|d| d.tick);
    let all_damages = m.damages.iter().filter(|d| d.attacker_steam_id == player).count();
    let rounds = m.round_count() as f64;
    let n_kills = kills.len() as f64;

    let mut b = FeatureBlock::default();

    let ttk: Vec<f64> = kills
        .iter()
        .filter_map(|k| {
            damages
                .iter()
                .filter(|d| d.victim_steam_id == k.victim_steam_id && d.round_num == k.round_num && d.tick <= k.tick)
                .map(|d| m.secs_between(d.tick, k.tick))
                .filter(|dt| *dt <= cfg.ttk_window_secs)
                .reduce(f64::max)
        })
        .collect();
    b.push_stats(&ttk);

    let first = kills.iter().filter(|k| k.is_first_kill).count();
    b.push(clamped_ratio(first as f64, rounds));

    let non_sniper = damages.iter().filter(|d| !is_sniper_class(&d.weapon_class)).count();
    let onetaps = kills
        .iter()
        .filter(|k| {
            k.is_headshot
                && !is_sniper_class(&k.weapon_class)
                && damages.iter().any(|d| {
                    d.victim_steam_id == k.victim_steam_id
                        && d.tick == k.tick
                        && !is_sniper_class(&d.weapon_class)
                        && d.hp_damage >= 100
                })
        })
        .count();
    b.push(clamped_ratio(onetaps as f64, non_sniper as f64));

    let p1 = kills.iter().filter(|k| k.penetrated_objects == 1).count() as f64;
    let p2 = kills.iter().filter(|k| k.penetrated_objects == 2).count() as f64;
    let p3 = kills.iter().filter(|k| k.penetrated_objects > 2).count() as f64;
    let smoke = kills.iter().filter(|k| k.thru_smoke).count() as f64;
    b.push(ratio(0.5 * p1 + p2 + 2.0 * p3 + 0.5 * smoke, rounds));

    let blind = kills.iter().filter(|k| k.attacker_blinded).count();
    b.push(ratio(blind as f64, n_kills));

    let heads = damages.iter().filter(|d| d.hit_group == HitGroup::Head).count();
    b.push(ratio(heads as f64, all_damages as f64));

    b.push(ratio(n_kills, rounds));
    b
}

/// fei, pui.
pub fn props_features(m: &MatchRecord, player: SteamId, cfg: &FeatureConfig) -> FeatureBlock {
    let mut on_opp = 0.0;
    let mut on_ally = 0.0;
    for f in m.flashes.iter().filter(|f| f.attacker_steam_id == player) {
        if f.player_side != f.attacker_side && f.player_steam_id != player {
            on_opp += f.flash_duration;
        } else {
            on_ally += f.flash_duration;
        }
    }
    let mut b = FeatureBlock::default();
    b.push(ratio(on_opp - on_ally, on_opp + on_ally));

    let thrown = m
        .grenades
        .iter()
        .filter(|g| g.thrower_steam_id == player && g.grenade_type.is_utility())
        .count();
    let cap = m.players.len() as f64 * m.round_count() as f64 * cfg.props_per_round;
    b.push(ratio(thrown as f64, cap));
    b
}

/// All 28 features in their fixed order.
pub fn feature_vector(m: &MatchRecord, player: SteamId, cfg: &FeatureConfig) -> Result<StructuredVector> {
    let engagements = segment_engagements(m, player, cfg)?;
    Ok(feature_vector_with(m, player, &engagements, cfg))
}

/// Same as [`feature_vector`] with precomputed engagements.
pub fn feature_vector_with(
    m: &MatchRecord,
    player: SteamId,
    engagements: &[Engagement],
    cfg: &FeatureConfig,
) -> StructuredVector {
    let mut b = aiming_features(engagements);
    b.extend(firing_features(m, player, cfg));
    b.extend(elimination_features(m, player, cfg));
    b.extend(props_features(m, player, cfg));
    debug_assert_eq!(b.values.len(), NUM_FEATURES);
    StructuredVector { values: b.values, mask: b.mask }
}

/// Feature vectors for every player in the match, in roster order.
pub fn match_feature_vectors(m: &MatchRecord, cfg: &FeatureConfig) -> Result<Vec<(SteamId, StructuredVector)>> {
    m.players
        .iter()
        .map(|p| {
            find_player(m, p.steam_id)?;
            Ok((p.steam_id, feature_vector(m, p.steam_id, cfg)?))
        })
        .collect()
}
