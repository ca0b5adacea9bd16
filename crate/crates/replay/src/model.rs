//! Canonical replay data model.
//!
//! Field names on the wire follow the parsed-demo conventions (`attackerSteamID`,
//! `hpDamageTaken`, `equipmentValueFreezetimeEnd`, ...). Positions are world
//! units, view angles are degrees, `seconds` fields are seconds elapsed in the
//! round.

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use std::fmt;

pub type Tick = i64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SteamId(pub u64);

impl fmt::Display for SteamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    CT,
    T,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::CT => Side::T,
            Side::T => Side::CT,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HitGroup {
    Chest,
    Generic,
    Head,
    Neck,
    LeftArm,
    RightArm,
    LeftLeg,
    RightLeg,
    Stomach,
}

impl HitGroup {
    /// Fixed enumeration order, chest through stomach.
    pub const ALL: [HitGroup; 9] = [
        HitGroup::Chest,
        HitGroup::Generic,
        HitGroup::Head,
        HitGroup::Neck,
        HitGroup::LeftArm,
        HitGroup::RightArm,
        HitGroup::LeftLeg,
        HitGroup::RightLeg,
        HitGroup::Stomach,
    ];

    pub fn index(self) -> usize {
        HitGroup::ALL.iter().position(|g| *g == self).unwrap()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum GrenadeType {
    Flashbang,
    Smoke,
    HeGrenade,
    Molotov,
    Incendiary,
    Decoy,
}

impl GrenadeType {
    pub const ALL: [GrenadeType; 6] = [
        GrenadeType::Flashbang,
        GrenadeType::Smoke,
        GrenadeType::HeGrenade,
        GrenadeType::Molotov,
        GrenadeType::Incendiary,
        GrenadeType::Decoy,
    ];

    pub fn index(self) -> usize {
        GrenadeType::ALL.iter().position(|g| *g == self).unwrap()
    }

    /// HE, incendiary/molotov, smoke and flash count as utility props; decoys do not.
    pub fn is_utility(self) -> bool {
        !matches!(self, GrenadeType::Decoy)
    }
}

/// Weapon class label used to separate sniper rifles from everything else.
pub const SNIPER_CLASS: &str = "sniper";

pub fn is_sniper_class(weapon_class: &str) -> bool {
    weapon_class.eq_ignore_ascii_case(SNIPER_CLASS)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlayerRef {
    #[serde(rename = "steamID")]
    pub steam_id: SteamId,
    pub side: Side,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RoundRecord {
    pub round_num: u32,
    pub start_tick: Tick,
    pub freeze_time_end_tick: Tick,
    pub end_tick: Tick,
    pub winner_side: Side,
}

impl RoundRecord {
    pub fn contains(&self, tick: Tick) -> bool {
        tick >= self.start_tick && tick <= self.end_tick
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DamageEvent {
    pub tick: Tick,
    pub seconds: f64,
    #[serde(rename = "attackerSteamID")]
    pub attacker_steam_id: SteamId,
    #[serde(rename = "victimSteamID")]
    pub victim_steam_id: SteamId,
    pub attacker_side: Side,
    pub victim_side: Side,
    pub attacker_x: f64,
    pub attacker_y: f64,
    pub attacker_z: f64,
    pub victim_x: f64,
    pub victim_y: f64,
    pub victim_z: f64,
    pub attacker_view_x: f64,
    pub attacker_view_y: f64,
    pub victim_view_x: f64,
    pub victim_view_y: f64,
    pub attacker_strafe: bool,
    pub weapon: String,
    pub weapon_class: String,
    pub hp_damage: u32,
    pub hp_damage_taken: u32,
    pub armor_damage: u32,
    pub armor_damage_taken: u32,
    pub hit_group: HitGroup,
    pub is_friendly_fire: bool,
    pub distance: f64,
    pub zoom_level: u32,
    pub round_num: u32,
}

impl DamageEvent {
    /// Damage dealt to a player on the other team.
    pub fn is_on_opponent(&self) -> bool {
        self.attacker_side != self.victim_side && self.attacker_steam_id != self.victim_steam_id
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct KillEvent {
    pub tick: Tick,
    pub seconds: f64,
    #[serde(rename = "attackerSteamID")]
    pub attacker_steam_id: SteamId,
    #[serde(rename = "victimSteamID")]
    pub victim_steam_id: SteamId,
    pub attacker_side: Side,
    pub victim_side: Side,
    pub attacker_x: f64,
    pub attacker_y: f64,
    pub attacker_z: f64,
    pub attacker_view_x: f64,
    pub attacker_view_y: f64,
    pub victim_x: f64,
    pub victim_y: f64,
    pub victim_z: f64,
    pub victim_view_x: f64,
    pub victim_view_y: f64,
    pub distance: f64,
    pub weapon: String,
    pub weapon_class: String,
    #[serde(rename = "assisterSteamID", default, skip_serializing_if = "Option::is_none")]
    pub assister_steam_id: Option<SteamId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assister_side: Option<Side>,
    pub is_suicide: bool,
    pub is_teamkill: bool,
    pub is_wallbang: bool,
    pub penetrated_objects: u32,
    pub is_first_kill: bool,
    pub is_headshot: bool,
    pub victim_blinded: bool,
    pub attacker_blinded: bool,
    #[serde(rename = "flashThrowerSteamID", default, skip_serializing_if = "Option::is_none")]
    pub flash_thrower_steam_id: Option<SteamId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flash_thrower_side: Option<Side>,
    pub no_scope: bool,
    pub thru_smoke: bool,
    pub is_trade: bool,
    pub round_num: u32,
}

impl KillEvent {
    /// Elimination of a player on the other team (no suicides, no team kills).
    pub fn is_on_opponent(&self) -> bool {
        !self.is_suicide
            && !self.is_teamkill
            && self.attacker_side != self.victim_side
            && self.attacker_steam_id != self.victim_steam_id
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WeaponFireEvent {
    pub tick: Tick,
    pub seconds: f64,
    #[serde(rename = "playerSteamID")]
    pub player_steam_id: SteamId,
    pub player_side: Side,
    pub player_x: f64,
    pub player_y: f64,
    pub player_z: f64,
    pub player_view_x: f64,
    pub player_view_y: f64,
    pub player_strafe: bool,
    pub weapon: String,
    pub weapon_class: String,
    pub zoom_level: u32,
    pub ammo_in_magazine: u32,
    pub ammo_in_reserve: u32,
    pub round_num: u32,
}

/// One player blinded by one flashbang.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FlashEvent {
    pub tick: Tick,
    pub seconds: f64,
    #[serde(rename = "attackerSteamID")]
    pub attacker_steam_id: SteamId,
    pub attacker_side: Side,
    pub attacker_x: f64,
    pub attacker_y: f64,
    pub attacker_z: f64,
    pub attacker_view_x: f64,
    pub attacker_view_y: f64,
    #[serde(rename = "playerSteamID")]
    pub player_steam_id: SteamId,
    pub player_side: Side,
    pub player_x: f64,
    pub player_y: f64,
    pub player_z: f64,
    pub player_view_x: f64,
    pub player_view_y: f64,
    pub flash_duration: f64,
    pub round_num: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GrenadeEvent {
    #[serde(rename = "throwerSteamID")]
    pub thrower_steam_id: SteamId,
    pub thrower_side: Side,
    pub thrower_x: f64,
    pub thrower_y: f64,
    pub thrower_z: f64,
    pub thrower_view_x: f64,
    pub thrower_view_y: f64,
    pub grenade_type: GrenadeType,
    pub grenade_x: f64,
    pub grenade_y: f64,
    pub grenade_z: f64,
    pub throw_tick: Tick,
    pub destroy_tick: Tick,
    pub throw_seconds: f64,
    pub destroy_seconds: f64,
    pub round_num: u32,
}

impl GrenadeEvent {
    pub fn active_at(&self, tick: Tick) -> bool {
        tick >= self.throw_tick && tick <= self.destroy_tick
    }
}

/// Per-player state inside one movement frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FramePlayer {
    #[serde(rename = "steamID")]
    pub steam_id: SteamId,
    pub side: Side,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub view_x: f64,
    pub view_y: f64,
    pub velocity_x: f64,
    pub velocity_y: f64,
    pub velocity_z: f64,
    pub is_alive: bool,
    pub is_blinded: bool,
    pub is_airborne: bool,
    pub is_ducking: bool,
    pub is_ducking_in_progress: bool,
    pub is_un_ducking_in_progress: bool,
    pub is_defusing: bool,
    pub is_planting: bool,
    pub is_reloading: bool,
    pub is_in_bomb_zone: bool,
    pub is_standing: bool,
    pub is_scoped: bool,
    pub is_walking: bool,
    pub isolation_degree: f64,
}

impl FramePlayer {
    pub fn position(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MovementFrame {
    pub tick: Tick,
    pub round_num: u32,
    pub players: Vec<FramePlayer>,
}

impl MovementFrame {
    pub fn player(&self, id: SteamId) -> Option<&FramePlayer> {
        self.players.iter().find(|p| p.steam_id == id)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EconomyRecord {
    pub round_num: u32,
    #[serde(rename = "steamID")]
    pub steam_id: SteamId,
    pub equipment_value_freezetime_end: i64,
    pub equipment_value_round_start: i64,
    pub cash: i64,
    pub cash_spend_total: i64,
}

/// One parsed replay.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MatchRecord {
    pub match_id: String,
    pub map_name: String,
    #[serde(default = "default_tick_rate")]
    pub tick_rate: u32,
    pub date_utc: DateTime<Utc>,
    pub players: Vec<PlayerRef>,
    pub rounds: Vec<RoundRecord>,
    pub damages: Vec<DamageEvent>,
    pub kills: Vec<KillEvent>,
    pub weapon_fires: Vec<WeaponFireEvent>,
    pub flashes: Vec<FlashEvent>,
    pub grenades: Vec<GrenadeEvent>,
    pub frames: Vec<MovementFrame>,
    pub economy: Vec<EconomyRecord>,
}

pub const DEFAULT_TICK_RATE: u32 = 128;

fn default_tick_rate() -> u32 {
    DEFAULT_TICK_RATE
}

impl MatchRecord {
    pub fn player(&self, id: SteamId) -> Option<&PlayerRef> {
        self.players.iter().find(|p| p.steam_id == id)
    }

    pub fn round_count(&self) -> usize {
        self.rounds.len()
    }

    /// Round whose `[startTick, endTick]` contains `tick`.
    pub fn round_at(&self, tick: Tick) -> Option<&RoundRecord> {
        self.rounds.iter().find(|r| r.contains(tick))
    }

    pub fn round(&self, round_num: u32) -> Option<&RoundRecord> {
        self.rounds.iter().find(|r| r.round_num == round_num)
    }

    /// Seconds between two ticks. The integer difference is taken first so the
    /// value only depends on the tick ratio.
    pub fn secs_between(&self, from: Tick, to: Tick) -> f64 {
        (to - from) as f64 / self.tick_rate as f64
    }

    pub fn tick_to_secs(&self, tick: Tick) -> f64 {
        tick as f64 / self.tick_rate as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheatType {
    Aimbot,
    Wallhack,
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PlayerLabel {
    pub steam_id: SteamId,
    pub cheater: bool,
    pub cheat_type: CheatType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ban_date_utc: Option<DateTime<Utc>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LabelSet {
    pub match_id: String,
    pub labels: Vec<PlayerLabel>,
}

impl LabelSet {
    pub fn get(&self, id: SteamId) -> Option<&PlayerLabel> {
        self.labels.iter().find(|l| l.steam_id == id)
    }

    pub fn is_cheater(&self, id: SteamId) -> bool {
        self.get(id).map(|l| l.cheater).unwrap_or(false)
    }
}
