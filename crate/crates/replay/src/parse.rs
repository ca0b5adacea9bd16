use std::collections::HashSet;

use crate::error::{ReplayError, Result};
use crate::model::*;

/// Parse, normalize and validate one match document.
pub fn parse_match_json(bytes: &[u8]) -> Result<MatchRecord> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    let mut m: MatchRecord = serde_path_to_error::deserialize(&mut de).map_err(schema_error)?;
    de.end().map_err(|e| ReplayError::Schema {
        path: ".".into(),
        message: e.to_string(),
    })?;
    normalize(&mut m);
    validate(&m)?;
    Ok(m)
}

pub fn parse_labels_json(bytes: &[u8]) -> Result<LabelSet> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    let labels: LabelSet = serde_path_to_error::deserialize(&mut de).map_err(schema_error)?;
    validate_labels(&labels)?;
    Ok(labels)
}

pub fn match_to_json(m: &MatchRecord) -> Vec<u8> {
    serde_json::to_vec(m).expect("match serialization is infallible")
}

pub fn labels_to_json(l: &LabelSet) -> Vec<u8> {
    serde_json::to_vec_pretty(l).expect("label serialization is infallible")
}

fn schema_error(e: serde_path_to_error::Error<serde_json::Error>) -> ReplayError {
    let path = e.path().to_string();
    ReplayError::Schema {
        path,
        message: e.into_inner().to_string(),
    }
}

/// Yaw wrapped to `[0, 360)`.
pub fn normalize_yaw(deg: f64) -> f64 {
    let y = deg.rem_euclid(360.0);
    // rem_euclid can round up to exactly 360 for tiny negative inputs
    if y >= 360.0 {
        0.0
    } else {
        y
    }
}

/// Pitch clamped to `[-90, 90]`.
pub fn normalize_pitch(deg: f64) -> f64 {
    deg.clamp(-90.0, 90.0)
}

fn view(x: &mut f64, y: &mut f64) {
    *x = normalize_yaw(*x);
    *y = normalize_pitch(*y);
}

pub fn normalize(m: &mut MatchRecord) {
    for d in &mut m.damages {
        view(&mut d.attacker_view_x, &mut d.attacker_view_y);
        view(&mut d.victim_view_x, &mut d.victim_view_y);
    }
    for k in &mut m.kills {
        view(&mut k.attacker_view_x, &mut k.attacker_view_y);
        view(&mut k.victim_view_x, &mut k.victim_view_y);
    }
    for f in &mut m.weapon_fires {
        view(&mut f.player_view_x, &mut f.player_view_y);
    }
    for f in &mut m.flashes {
        view(&mut f.attacker_view_x, &mut f.attacker_view_y);
        view(&mut f.player_view_x, &mut f.player_view_y);
    }
    for g in &mut m.grenades {
        view(&mut g.thrower_view_x, &mut g.thrower_view_y);
    }
    for fr in &mut m.frames {
        for p in &mut fr.players {
            view(&mut p.view_x, &mut p.view_y);
        }
    }
}

struct Checker<'a> {
    m: &'a MatchRecord,
    ids: HashSet<SteamId>,
}

impl Checker<'_> {
    fn tick(&self, path: String, tick: Tick) -> Result<()> {
        if self.m.round_at(tick).is_none() {
            return Err(ReplayError::consistency(
                path,
                format!("tick {tick} lies outside every round"),
            ));
        }
        Ok(())
    }

    fn id(&self, path: String, id: SteamId) -> Result<()> {
        if !self.ids.contains(&id) {
            return Err(ReplayError::consistency(
                path,
                format!("steamId {id} is not a match player"),
            ));
        }
        Ok(())
    }

    fn finite(&self, path: String, vals: &[f64]) -> Result<()> {
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(ReplayError::consistency(path, "non-finite number"));
        }
        Ok(())
    }
}

/// Enforce the record invariants. Assumes view angles were already normalized.
pub fn validate(m: &MatchRecord) -> Result<()> {
    if m.tick_rate == 0 {
        return Err(ReplayError::consistency("tickRate", "tick rate must be positive"));
    }
    let mut ids = HashSet::new();
    for (i, p) in m.players.iter().enumerate() {
        if !ids.insert(p.steam_id) {
            return Err(ReplayError::consistency(
                format!("players[{i}].steamID"),
                format!("duplicate steamId {}", p.steam_id),
            ));
        }
    }
    for (i, r) in m.rounds.iter().enumerate() {
        if r.round_num as usize != i + 1 {
            return Err(ReplayError::consistency(
                format!("rounds[{i}].roundNum"),
                format!("expected round {} but found {}", i + 1, r.round_num),
            ));
        }
        if !(r.start_tick <= r.freeze_time_end_tick && r.freeze_time_end_tick <= r.end_tick) {
            return Err(ReplayError::consistency(
                format!("rounds[{i}]"),
                "startTick <= freezeTimeEndTick <= endTick violated",
            ));
        }
    }
    let c = Checker { m, ids };

    for (i, d) in m.damages.iter().enumerate() {
        let p = |f: &str| format!("damages[{i}].{f}");
        c.tick(p("tick"), d.tick)?;
        c.id(p("attackerSteamID"), d.attacker_steam_id)?;
        c.id(p("victimSteamID"), d.victim_steam_id)?;
        if d.hp_damage_taken > d.hp_damage {
            return Err(ReplayError::consistency(p("hpDamageTaken"), "exceeds hpDamage"));
        }
        c.finite(
            p("distance"),
            &[d.distance, d.attacker_x, d.attacker_y, d.attacker_z, d.victim_x, d.victim_y, d.victim_z],
        )?;
    }
    for (i, k) in m.kills.iter().enumerate() {
        let p = |f: &str| format!("kills[{i}].{f}");
        c.tick(p("tick"), k.tick)?;
        c.id(p("attackerSteamID"), k.attacker_steam_id)?;
        c.id(p("victimSteamID"), k.victim_steam_id)?;
        if let Some(a) = k.assister_steam_id {
            c.id(p("assisterSteamID"), a)?;
        }
        if let Some(a) = k.flash_thrower_steam_id {
            c.id(p("flashThrowerSteamID"), a)?;
        }
        c.finite(p("distance"), &[k.distance])?;
    }
    for (i, f) in m.weapon_fires.iter().enumerate() {
        let p = |s: &str| format!("weaponFires[{i}].{s}");
        c.tick(p("tick"), f.tick)?;
        c.id(p("playerSteamID"), f.player_steam_id)?;
    }
    for (i, f) in m.flashes.iter().enumerate() {
        let p = |s: &str| format!("flashes[{i}].{s}");
        c.tick(p("tick"), f.tick)?;
        c.id(p("attackerSteamID"), f.attacker_steam_id)?;
        c.id(p("playerSteamID"), f.player_steam_id)?;
        if !(f.flash_duration >= 0.0 && f.flash_duration.is_finite()) {
            return Err(ReplayError::consistency(p("flashDuration"), "must be finite and >= 0"));
        }
    }
    for (i, g) in m.grenades.iter().enumerate() {
        let p = |s: &str| format!("grenades[{i}].{s}");
        c.tick(p("throwTick"), g.throw_tick)?;
        c.tick(p("destroyTick"), g.destroy_tick)?;
        c.id(p("throwerSteamID"), g.thrower_steam_id)?;
        if g.destroy_tick < g.throw_tick {
            return Err(ReplayError::consistency(p("destroyTick"), "precedes throwTick"));
        }
    }
    for (i, fr) in m.frames.iter().enumerate() {
        c.tick(format!("frames[{i}].tick"), fr.tick)?;
        for (j, pl) in fr.players.iter().enumerate() {
            c.id(format!("frames[{i}].players[{j}].steamID"), pl.steam_id)?;
        }
    }
    for (i, e) in m.economy.iter().enumerate() {
        let p = |s: &str| format!("economy[{i}].{s}");
        c.id(p("steamID"), e.steam_id)?;
        if m.round(e.round_num).is_none() {
            return Err(ReplayError::consistency(p("roundNum"), "unknown round"));
        }
        for (name, v) in [
            ("equipmentValueFreezetimeEnd", e.equipment_value_freezetime_end),
            ("equipmentValueRoundStart", e.equipment_value_round_start),
            ("cash", e.cash),
            ("cashSpendTotal", e.cash_spend_total),
        ] {
            if v < 0 {
                return Err(ReplayError::consistency(p(name), "must be >= 0"));
            }
        }
    }
    Ok(())
}

pub fn validate_labels(l: &LabelSet) -> Result<()> {
    for (i, lab) in l.labels.iter().enumerate() {
        let none = lab.cheat_type == CheatType::None;
        if none == lab.cheater {
            return Err(ReplayError::consistency(
                format!("labels[{i}].cheatType"),
                "cheatType none must coincide with cheater = false",
            ));
        }
    }
    Ok(())
}
