//! Hand-built matches for example-driven tests.

use chrono::{TimeZone, Utc};
use hawk_replay::*;

pub const A: SteamId = SteamId(1);
pub const B: SteamId = SteamId(2);
pub const C: SteamId = SteamId(3);
pub const D: SteamId = SteamId(4);

/// Four players (A, C on CT; B, D on T) and `rounds` rounds of 60 s each at `rate`.
pub fn base(rate: u32, rounds: u32) -> MatchRecord {
    let len = 60 * rate as i64;
    MatchRecord {
        match_id: "hand".into(),
        map_name: "de_hand".into(),
        tick_rate: rate,
        date_utc: Utc.with_ymd_and_hms(2023, 1, 1, 0, 0, 0).unwrap(),
        players: vec![
            PlayerRef { steam_id: A, side: Side::CT },
            PlayerRef { steam_id: B, side: Side::T },
            PlayerRef { steam_id: C, side: Side::CT },
            PlayerRef { steam_id: D, side: Side::T },
        ],
        rounds: (0..rounds)
            .map(|i| RoundRecord {
                round_num: i + 1,
                start_tick: i as i64 * len,
                freeze_time_end_tick: i as i64 * len,
                end_tick: (i as i64 + 1) * len - 1,
                winner_side: Side::CT,
            })
            .collect(),
        damages: vec![],
        kills: vec![],
        weapon_fires: vec![],
        flashes: vec![],
        grenades: vec![],
        frames: vec![],
        economy: vec![],
    }
}

fn side_of(id: SteamId) -> Side {
    if id.0 % 2 == 1 {
        Side::CT
    } else {
        Side::T
    }
}

pub fn damage(tick: Tick, attacker: SteamId, victim: SteamId) -> DamageEvent {
    DamageEvent {
        tick,
        seconds: 0.0,
        attacker_steam_id: attacker,
        victim_steam_id: victim,
        attacker_side: side_of(attacker),
        victim_side: side_of(victim),
        attacker_x: 0.0,
        attacker_y: 0.0,
        attacker_z: 0.0,
        victim_x: 300.0,
        victim_y: 0.0,
        victim_z: 0.0,
        attacker_view_x: 0.0,
        attacker_view_y: 0.0,
        victim_view_x: 180.0,
        victim_view_y: 0.0,
        attacker_strafe: false,
        weapon: "ak47".into(),
        weapon_class: "rifle".into(),
        hp_damage: 30,
        hp_damage_taken: 30,
        armor_damage: 0,
        armor_damage_taken: 0,
        hit_group: HitGroup::Chest,
        is_friendly_fire: side_of(attacker) == side_of(victim),
        distance: 300.0,
        zoom_level: 0,
        round_num: 1,
    }
}

pub fn kill(tick: Tick, attacker: SteamId, victim: SteamId) -> KillEvent {
    KillEvent {
        tick,
        seconds: 0.0,
        attacker_steam_id: attacker,
        victim_steam_id: victim,
        attacker_side: side_of(attacker),
        victim_side: side_of(victim),
        attacker_x: 0.0,
        attacker_y: 0.0,
        attacker_z: 0.0,
        attacker_view_x: 0.0,
        attacker_view_y: 0.0,
        victim_x: 300.0,
        victim_y: 0.0,
        victim_z: 0.0,
        victim_view_x: 180.0,
        victim_view_y: 0.0,
        distance: 300.0,
        weapon: "ak47".into(),
        weapon_class: "rifle".into(),
        assister_steam_id: None,
        assister_side: None,
        is_suicide: false,
        is_teamkill: false,
        is_wallbang: false,
        penetrated_objects: 0,
        is_first_kill: false,
        is_headshot: false,
        victim_blinded: false,
        attacker_blinded: false,
        flash_thrower_steam_id: None,
        flash_thrower_side: None,
        no_scope: false,
        thru_smoke: false,
        is_trade: false,
        round_num: 1,
    }
}

pub fn fire(tick: Tick, player: SteamId, mag: u32) -> WeaponFireEvent {
    WeaponFireEvent {
        tick,
        seconds: 0.0,
        player_steam_id: player,
        player_side: side_of(player),
        player_x: 0.0,
        player_y: 0.0,
        player_z: 0.0,
        player_view_x: 0.0,
        player_view_y: 0.0,
        player_strafe: false,
        weapon: "ak47".into(),
        weapon_class: "rifle".into(),
        zoom_level: 0,
        ammo_in_magazine: mag,
        ammo_in_reserve: 90,
        round_num: 1,
    }
}

pub fn flash(tick: Tick, thrower: SteamId, blinded: SteamId, duration: f64) -> FlashEvent {
    FlashEvent {
        tick,
        seconds: 0.0,
        attacker_steam_id: thrower,
        attacker_side: side_of(thrower),
        attacker_x: 0.0,
        attacker_y: 0.0,
        attacker_z: 0.0,
        attacker_view_x: 0.0,
        attacker_view_y: 0.0,
        player_steam_id: blinded,
        player_side: side_of(blinded),
        player_x: 0.0,
        player_y: 0.0,
        player_z: 0.0,
        player_view_x: 0.0,
        player_view_y: 0.0,
        flash_duration: duration,
        round_num: 1,
    }
}

pub fn grenade(tick: Tick, thrower: SteamId, kind: GrenadeType) -> GrenadeEvent {
    GrenadeEvent {
        thrower_steam_id: thrower,
        thrower_side: side_of(thrower),
        thrower_x: 0.0,
        thrower_y: 0.0,
        thrower_z: 0.0,
        thrower_view_x: 0.0,
        thrower_view_y: 0.0,
        grenade_type: kind,
        grenade_x: 150.0,
        grenade_y: 0.0,
        grenade_z: 0.0,
        throw_tick: tick,
        destroy_tick: tick + 10,
        throw_seconds: 0.0,
        destroy_seconds: 0.0,
        round_num: 1,
    }
}

pub fn frame_player(id: SteamId, pos: [f64; 3], view: (f64, f64)) -> FramePlayer {
    FramePlayer {
        steam_id: id,
        side: side_of(id),
        x: pos[0],
        y: pos[1],
        z: pos[2],
        view_x: view.0,
        view_y: view.1,
        velocity_x: 0.0,
        velocity_y: 0.0,
        velocity_z: 0.0,
        is_alive: true,
        is_blinded: false,
        is_airborne: false,
        is_ducking: false,
        is_ducking_in_progress: false,
        is_un_ducking_in_progress: false,
        is_defusing: false,
        is_planting: false,
        is_reloading: false,
        is_in_bomb_zone: false,
        is_standing: true,
        is_scoped: false,
        is_walking: false,
        isolation_degree: 0.0,
    }
}

/// A at the origin looking along `view`, B at (300, 0, 0).
pub fn sight_frame(tick: Tick, view: (f64, f64)) -> MovementFrame {
    MovementFrame {
        tick,
        round_num: 1,
        players: vec![frame_player(A, [0.0, 0.0, 0.0], view), frame_player(B, [300.0, 0.0, 0.0], (180.0, 0.0))],
    }
}
