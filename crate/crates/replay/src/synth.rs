//! Scripted-duel match generator.
//!
//! Each round places both teams at their spawn areas on a lower level of the
//! map, then runs a sequence of one-on-one duels in the middle area. Idle
//! players look away from everybody, so every field-of-view sighting in the
//! generated frames belongs to a scripted duel. Cheater behavior moves each
//! parameter from the player's own honest draw toward the cheat target by
//! `1 - sophistication`.

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{ReplayError, Result};
use crate::model::*;
use crate::parse::{normalize_pitch, normalize_yaw};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    Honest,
    Aimbot,
    Wallhack,
    BoostingLike,
}

impl ProfileKind {
    pub fn cheat_type(self) -> CheatType {
        match self {
            ProfileKind::Aimbot => CheatType::Aimbot,
            ProfileKind::Wallhack => CheatType::Wallhack,
            ProfileKind::Honest | ProfileKind::BoostingLike => CheatType::None,
        }
    }

    pub fn parse(s: &str) -> Option<ProfileKind> {
        match s.to_ascii_lowercase().as_str() {
            "honest" => Some(ProfileKind::Honest),
            "aimbot" => Some(ProfileKind::Aimbot),
            "wallhack" => Some(ProfileKind::Wallhack),
            "boosting" | "boosting-like" => Some(ProfileKind::BoostingLike),
            _ => None,
        }
    }
}

/// Explicit per-behavior values applied after sophistication blending.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct BehaviorOverrides {
    /// Mean reaction time in seconds.
    #[serde(default)]
    pub reaction_mean: Option<f64>,
    #[serde(default)]
    pub reaction_sd: Option<f64>,
    /// Probability that a hit lands on the head.
    #[serde(default)]
    pub headshot_bias: Option<f64>,
    /// Probability that a duel is fought through a wall.
    #[serde(default)]
    pub wallbang_rate: Option<f64>,
    /// Probability of using each of the four per-round utility slots.
    #[serde(default)]
    pub props_rate: Option<f64>,
    /// Probability of aiming at an opponent before it becomes visible.
    #[serde(default)]
    pub preaim_rate: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CheatProfile {
    pub kind: ProfileKind,
    #[serde(default)]
    pub sophistication: f64,
    #[serde(default)]
    pub overrides: BehaviorOverrides,
}

impl CheatProfile {
    pub fn honest() -> Self {
        Self::new(ProfileKind::Honest, 0.0)
    }

    pub fn new(kind: ProfileKind, sophistication: f64) -> Self {
        CheatProfile {
            kind,
            sophistication,
            overrides: BehaviorOverrides::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.sophistication) {
            return Err(ReplayError::Config(format!(
                "sophistication {} outside [0, 1]",
                self.sophistication
            )));
        }
        let o = &self.overrides;
        for (name, v) in [
            ("headshotBias", o.headshot_bias),
            ("wallbangRate", o.wallbang_rate),
            ("propsRate", o.props_rate),
            ("preaimRate", o.preaim_rate),
        ] {
            if let Some(v) = v {
                if !(0.0..=1.0).contains(&v) {
                    return Err(ReplayError::Config(format!("{name} {v} outside [0, 1]")));
                }
            }
        }
        for (name, v) in [("reactionMean", o.reaction_mean), ("reactionSd", o.reaction_sd)] {
            if let Some(v) = v {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(ReplayError::Config(format!("{name} must be >= 0")));
                }
            }
        }
        Ok(())
    }
}

/// Per-player behavior parameters driving the duel script.
#[derive(Clone, Debug, PartialEq)]
pub struct BehaviorParams {
    pub reaction_mean: f64,
    pub reaction_sd: f64,
    pub hit_prob: f64,
    pub first_shot_factor: f64,
    pub head_bias: f64,
    pub range_decay: f64,
    /// Crosshair offset from the opponent at the moment of sighting, degrees.
    pub aim_offset_mean: f64,
    pub aim_offset_sd: f64,
    /// Per-shot aim error, degrees.
    pub aim_err: f64,
    pub preaim_rate: f64,
    pub wallbang_rate: f64,
    pub smoke_kill_rate: f64,
    pub props_rate: f64,
    pub flash_skill: f64,
    /// Multiplier on the opponent's hit probability.
    pub vulnerability: f64,
    pub inertial_rate: f64,
    pub strafe_rate: f64,
    pub sniper_rate: f64,
}

impl BehaviorParams {
    fn honest(rng: &mut ChaCha8Rng) -> Self {
        let mut n = |mean: f64, sd: f64, lo: f64, hi: f64| -> f64 {
            (mean + sd * std_normal(rng)).clamp(lo, hi)
        };
        BehaviorParams {
            reaction_mean: n(0.27, 0.03, 0.18, 0.4),
            reaction_sd: n(0.06, 0.01, 0.03, 0.1),
            hit_prob: n(0.45, 0.07, 0.25, 0.7),
            first_shot_factor: 0.8,
            head_bias: n(0.25, 0.06, 0.08, 0.45),
            range_decay: 1.0,
            aim_offset_mean: n(18.0, 4.0, 8.0, 30.0),
            aim_offset_sd: 8.0,
            aim_err: n(3.0, 0.5, 1.5, 4.5),
            preaim_rate: n(0.05, 0.02, 0.0, 0.12),
            wallbang_rate: n(0.02, 0.01, 0.0, 0.05),
            smoke_kill_rate: n(0.02, 0.01, 0.0, 0.05),
            props_rate: n(0.45, 0.1, 0.2, 0.75),
            flash_skill: n(0.7, 0.1, 0.4, 0.95),
            vulnerability: 1.0,
            inertial_rate: n(0.55, 0.1, 0.25, 0.85),
            strafe_rate: n(0.3, 0.08, 0.1, 0.5),
            sniper_rate: n(0.15, 0.05, 0.0, 0.3),
        }
    }

    fn target(&self, kind: ProfileKind) -> BehaviorParams {
        let mut t = self.clone();
        match kind {
            ProfileKind::Honest => {}
            ProfileKind::Aimbot => {
                t.reaction_mean = 0.08;
                t.reaction_sd = 0.02;
                t.hit_prob = 0.9;
                t.first_shot_factor = 1.0;
                t.head_bias = 0.85;
                t.range_decay = 0.0;
                t.aim_err = 0.3;
                t.inertial_rate = 0.1;
                t.strafe_rate = 0.6;
            }
            ProfileKind::Wallhack => {
                t.aim_offset_mean = 6.0;
                t.aim_offset_sd = 2.0;
                t.preaim_rate = 0.85;
                t.reaction_mean = 0.12;
                t.wallbang_rate = 0.35;
                t.smoke_kill_rate = 0.3;
                t.props_rate = 0.08;
                t.vulnerability = 0.45;
            }
            ProfileKind::BoostingLike => {
                t.reaction_mean = 0.2;
                t.hit_prob = 0.62;
                t.head_bias = 0.45;
                t.aim_err = 1.8;
                t.props_rate = 0.15;
                t.flash_skill = 0.35;
            }
        }
        t
    }

    fn lerp(&self, other: &BehaviorParams, w: f64) -> BehaviorParams {
        let l = |a: f64, b: f64| a + w * (b - a);
        BehaviorParams {
            reaction_mean: l(self.reaction_mean, other.reaction_mean),
            reaction_sd: l(self.reaction_sd, other.reaction_sd),
            hit_prob: l(self.hit_prob, other.hit_prob),
            first_shot_factor: l(self.first_shot_factor, other.first_shot_factor),
            head_bias: l(self.head_bias, other.head_bias),
            range_decay: l(self.range_decay, other.range_decay),
            aim_offset_mean: l(self.aim_offset_mean, other.aim_offset_mean),
            aim_offset_sd: l(self.aim_offset_sd, other.aim_offset_sd),
            aim_err: l(self.aim_err, other.aim_err),
            preaim_rate: l(self.preaim_rate, other.preaim_rate),
            wallbang_rate: l(self.wallbang_rate, other.wallbang_rate),
            smoke_kill_rate: l(self.smoke_kill_rate, other.smoke_kill_rate),
            props_rate: l(self.props_rate, other.props_rate),
            flash_skill: l(self.flash_skill, other.flash_skill),
            vulnerability: l(self.vulnerability, other.vulnerability),
            inertial_rate: l(self.inertial_rate, other.inertial_rate),
            strafe_rate: l(self.strafe_rate, other.strafe_rate),
            sniper_rate: l(self.sniper_rate, other.sniper_rate),
        }
    }

    /// Draw the honest baseline for one player, then move it toward the
    /// profile's target.
    pub fn for_profile(profile: &CheatProfile, rng: &mut ChaCha8Rng) -> BehaviorParams {
        let honest = BehaviorParams::honest(rng);
        let target = honest.target(profile.kind);
        let mut p = honest.lerp(&target, 1.0 - profile.sophistication);
        let o = &profile.overrides;
        if let Some(v) = o.reaction_mean {
            p.reaction_mean = v;
        }
        if let Some(v) = o.reaction_sd {
            p.reaction_sd = v;
        }
        if let Some(v) = o.headshot_bias {
            p.head_bias = v;
        }
        if let Some(v) = o.wallbang_rate {
            p.wallbang_rate = v;
        }
        if let Some(v) = o.props_rate {
            p.props_rate = v;
        }
        if let Some(v) = o.preaim_rate {
            p.preaim_rate = v;
        }
        p
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct SynthConfig {
    pub tick_rate: u32,
    /// Ticks between emitted movement frames.
    pub frame_stride: u32,
    pub freeze_secs: f64,
    pub live_secs: f64,
    pub map_name: String,
    pub date_utc: DateTime<Utc>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            tick_rate: DEFAULT_TICK_RATE,
            frame_stride: 16,
            freeze_secs: 5.0,
            live_secs: 40.0,
            map_name: "de_synth".into(),
            date_utc: Utc.with_ymd_and_hms(2023, 1, 1, 12, 0, 0).unwrap(),
        }
    }
}

impl SynthConfig {
    fn validate(&self) -> Result<()> {
        if self.tick_rate == 0 || self.frame_stride == 0 {
            return Err(ReplayError::Config("tickRate and frameStride must be positive".into()));
        }
        if !(self.freeze_secs >= 0.0 && self.live_secs >= 10.0) {
            return Err(ReplayError::Config("liveSecs must be at least 10".into()));
        }
        Ok(())
    }
}

pub fn generate_synthetic_match(
    profiles: &[CheatProfile],
    rounds: u32,
    seed: u64,
) -> Result<(MatchRecord, LabelSet)> {
    generate_with_config(profiles, rounds, seed, &SynthConfig::default())
}

pub fn generate_with_config(
    profiles: &[CheatProfile],
    rounds: u32,
    seed: u64,
    cfg: &SynthConfig,
) -> Result<(MatchRecord, LabelSet)> {
    if profiles.is_empty() {
        return Err(ReplayError::Config("empty player list".into()));
    }
    if profiles.len() < 2 || profiles.len() > 10 {
        return Err(ReplayError::Config(format!(
            "between 2 and 10 players required, got {}",
            profiles.len()
        )));
    }
    if rounds == 0 {
        return Err(ReplayError::Config("at least one round required".into()));
    }
    cfg.validate()?;
    for p in profiles {
        p.validate()?;
    }
    let mut sim = Sim::new(profiles, seed, cfg);
    for r in 1..=rounds {
        sim.play_round(r);
    }
    Ok(sim.finish(profiles, seed))
}

// ---------------------------------------------------------------------------

const SPAWN_Z: f64 = -6000.0;
const IDLE_SPAWN_PITCH: f64 = -70.0;
const IDLE_MID_PITCH: f64 = 70.0;

#[derive(Clone, Copy)]
struct Weapon {
    name: &'static str,
    class: &'static str,
    sniper: bool,
    interval_secs: f64,
    mag: u32,
    max_shots: usize,
}

const AK: Weapon = Weapon { name: "ak47", class: "rifle", sniper: false, interval_secs: 0.1, mag: 30, max_shots: 8 };
const M4: Weapon = Weapon { name: "m4a1", class: "rifle", sniper: false, interval_secs: 0.09, mag: 30, max_shots: 8 };
const AWP: Weapon = Weapon { name: "awp", class: "sniper", sniper: true, interval_secs: 1.3, mag: 5, max_shots: 2 };

fn damage_for(w: &Weapon, g: HitGroup) -> u32 {
    if w.sniper {
        return match g {
            HitGroup::LeftLeg | HitGroup::RightLeg => 85,
            _ => 115,
        };
    }
    match g {
        HitGroup::Head => 105,
        HitGroup::Chest | HitGroup::Neck => 30,
        HitGroup::Stomach => 35,
        HitGroup::LeftArm | HitGroup::RightArm => 25,
        HitGroup::LeftLeg | HitGroup::RightLeg => 22,
        HitGroup::Generic => 28,
    }
}

const BODY_GROUPS: [(HitGroup, f64); 8] = [
    (HitGroup::Chest, 0.40),
    (HitGroup::Stomach, 0.20),
    (HitGroup::LeftArm, 0.08),
    (HitGroup::RightArm, 0.08),
    (HitGroup::LeftLeg, 0.08),
    (HitGroup::RightLeg, 0.08),
    (HitGroup::Neck, 0.03),
    (HitGroup::Generic, 0.05),
];

#[derive(Clone, Copy)]
enum PoseKind {
    /// Facing an opponent: view moves from `start` to `aim` by `aim_tick`.
    Look { start: (f64, f64), aim: (f64, f64), from: Tick, aim_tick: Tick, strafe: bool },
    /// Standing mid-map, unaware.
    Stand,
}

#[derive(Clone, Copy)]
struct Pose {
    from: Tick,
    to: Tick,
    pos: [f64; 3],
    kind: PoseKind,
}

struct PlayerState {
    id: SteamId,
    side: Side,
    params: BehaviorParams,
    spawn: [f64; 3],
    idle_phase: f64,
    hp: u32,
    armor: u32,
    death_tick: Option<Tick>,
    weapon: Weapon,
    mag: u32,
    reserve: u32,
    cash: i64,
    equipment: i64,
    poses: Vec<Pose>,
    round_kills: u32,
    last_kill_tick: Option<Tick>,
}

impl PlayerState {
    fn alive_at(&self, t: Tick) -> bool {
        self.death_tick.map_or(true, |d| t < d)
    }
}

struct Sim<'c> {
    rng: ChaCha8Rng,
    cfg: &'c SynthConfig,
    players: Vec<PlayerState>,
    m: MatchRecord,
    next_start: Tick,
}

fn std_normal(rng: &mut ChaCha8Rng) -> f64 {
    Normal::new(0.0, 1.0).unwrap().sample(rng)
}

fn bearing(from: [f64; 3], to: [f64; 3]) -> (f64, f64) {
    let dx = to[0] - from[0];
    let dy = to[1] - from[1];
    let dz = to[2] - from[2];
    let yaw = dy.atan2(dx).to_degrees();
    let pitch = dz.atan2((dx * dx + dy * dy).sqrt()).to_degrees();
    (normalize_yaw(yaw), normalize_pitch(pitch))
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Shortest signed yaw difference `b - a`.
fn yaw_delta(a: f64, b: f64) -> f64 {
    let d = (b - a).rem_euclid(360.0);
    if d > 180.0 {
        d - 360.0
    } else {
        d
    }
}

fn view_lerp(a: (f64, f64), b: (f64, f64), w: f64) -> (f64, f64) {
    (normalize_yaw(a.0 + w * yaw_delta(a.0, b.0)), a.1 + w * (b.1 - a.1))
}

struct Shot {
    tick: Tick,
    shooter: usize,
    index: usize,
}

enum DuelMode {
    Open,
    Wallbang { shooter: usize },
    Smoke { shooter: usize },
}

impl<'c> Sim<'c> {
    fn new(profiles: &[CheatProfile], seed: u64, cfg: &'c SynthConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base: u64 = 76_561_198_000_000_000 + (rng.random::<u32>() as u64) * 16;
        let n = profiles.len();
        let n_ct = n / 2;
        let mut players = Vec::with_capacity(n);
        for (i, prof) in profiles.iter().enumerate() {
            let side = if i < n_ct { Side::CT } else { Side::T };
            let slot = if side == Side::CT { i } else { i - n_ct } as f64;
            let x = if side == Side::CT { -500.0 } else { 500.0 };
            let params = BehaviorParams::for_profile(prof, &mut rng);
            players.push(PlayerState {
                id: SteamId(base + i as u64),
                side,
                params,
                spawn: [x, -240.0 + 120.0 * slot, SPAWN_Z],
                idle_phase: rng.random_range(0.0..std::f64::consts::TAU),
                hp: 100,
                armor: 100,
                death_tick: None,
                weapon: AK,
                mag: 30,
                reserve: 90,
                cash: 800,
                equipment: 200,
                poses: Vec::new(),
                round_kills: 0,
                last_kill_tick: None,
            });
        }
        let m = MatchRecord {
            match_id: format!("synth-{seed:016x}"),
            map_name: cfg.map_name.clone(),
            tick_rate: cfg.tick_rate,
            date_utc: cfg.date_utc,
            players: players
                .iter()
                .map(|p| PlayerRef { steam_id: p.id, side: p.side })
                .collect(),
            rounds: Vec::new(),
            damages: Vec::new(),
            kills: Vec::new(),
            weapon_fires: Vec::new(),
            flashes: Vec::new(),
            grenades: Vec::new(),
            frames: Vec::new(),
            economy: Vec::new(),
        };
        Sim { rng, cfg, players, m, next_start: 1000 }
    }

    fn ticks(&self, secs: f64) -> Tick {
        (secs * self.cfg.tick_rate as f64).round() as Tick
    }

    fn secs(&self, round_start: Tick, t: Tick) -> f64 {
        (t - round_start) as f64 / self.cfg.tick_rate as f64
    }

    fn stride(&self) -> Tick {
        self.cfg.frame_stride as Tick
    }

    /// Largest frame tick `<= t`.
    fn frame_floor(&self, start: Tick, t: Tick) -> Tick {
        start + (t - start).div_euclid(self.stride()) * self.stride()
    }

    fn play_round(&mut self, round_num: u32) {
        let start = self.next_start;
        let freeze_end = start + self.ticks(self.cfg.freeze_secs);
        let live_end = freeze_end + self.ticks(self.cfg.live_secs);

        self.buy_phase(round_num);
        let props = self.plan_props(round_num, start, freeze_end, live_end);

        let mut first_kill_done = false;
        let gap = self.rng.random_range(1.0..3.0);
        let mut cursor = freeze_end + self.ticks(gap);
        let mut last_event = freeze_end;
        loop {
            let ct: Vec<usize> = self.alive_of(Side::CT, cursor);
            let t: Vec<usize> = self.alive_of(Side::T, cursor);
            if ct.is_empty() || t.is_empty() || cursor + self.ticks(4.0) > live_end {
                break;
            }
            let a = ct[self.rng.random_range(0..ct.len())];
            let b = t[self.rng.random_range(0..t.len())];
            let tau = self.frame_floor(start, cursor + self.ticks(2.0));
            let end = self.duel(a, b, tau, round_num, start, live_end, &mut first_kill_done);
            last_event = last_event.max(end);
            let gap = self.rng.random_range(1.0..4.0);
            cursor = end + self.ticks(gap);
        }
        let ct_alive = self.alive_of(Side::CT, live_end).len();
        let t_alive = self.alive_of(Side::T, live_end).len();
        let end = if ct_alive == 0 || t_alive == 0 {
            (last_event + self.ticks(2.0)).min(live_end)
        } else {
            live_end
        };
        let winner = if t_alive > ct_alive { Side::T } else { Side::CT };
        self.m.rounds.push(RoundRecord {
            round_num,
            start_tick: start,
            freeze_time_end_tick: freeze_end,
            end_tick: end,
            winner_side: winner,
        });
        self.emit_props(props, round_num, start, end);
        self.mark_blinded_kills(round_num);
        self.emit_frames(round_num, start, end);
        self.settle_economy(round_num, winner);
        self.next_start = end + self.ticks(2.0);
    }

    fn alive_of(&self, side: Side, t: Tick) -> Vec<usize> {
        (0..self.players.len())
            .filter(|&i| self.players[i].side == side && self.players[i].alive_at(t))
            .collect()
    }

    fn buy_phase(&mut self, round_num: u32) {
        for i in 0..self.players.len() {
            let sniper = self.rng.random_bool(self.players[i].params.sniper_rate);
            let p = &mut self.players[i];
            p.hp = 100;
            p.armor = 100;
            p.death_tick = None;
            p.poses.clear();
            p.round_kills = 0;
            p.weapon = if sniper {
                AWP
            } else if p.side == Side::T {
                AK
            } else {
                M4
            };
            p.mag = p.weapon.mag;
            p.reserve = p.weapon.mag * 3;
            let start_value = p.equipment;
            let spend = p.cash.min(if sniper { 5750 } else { 3700 });
            p.cash -= spend;
            p.equipment = start_value + spend;
            self.m.economy.push(EconomyRecord {
                round_num,
                steam_id: p.id,
                equipment_value_freezetime_end: p.equipment,
                equipment_value_round_start: start_value,
                cash: 0,
                cash_spend_total: spend,
            });
        }
    }

    fn settle_economy(&mut self, round_num: u32, winner: Side) {
        for p in &mut self.players {
            let reward = if p.side == winner { 3250 } else { 1900 } + 300 * p.round_kills as i64;
            p.cash = (p.cash + reward).min(16000);
            if p.death_tick.is_some() {
                p.equipment = 200;
            }
            if let Some(e) = self
                .m
                .economy
                .iter_mut()
                .rev()
                .find(|e| e.round_num == round_num && e.steam_id == p.id)
            {
                e.cash = p.cash;
            }
        }
    }

    fn plan_props(&mut self, round_num: u32, start: Tick, freeze_end: Tick, live_end: Tick) -> Vec<GrenadeEvent> {
        let mut out = Vec::new();
        let lo = freeze_end + self.ticks(1.0);
        let hi = live_end - self.ticks(4.0);
        if hi <= lo {
            return out;
        }
        for i in 0..self.players.len() {
            let rate = self.players[i].params.props_rate.clamp(0.0, 1.0);
            let count = Binomial::new(4, rate).unwrap().sample(&mut self.rng);
            for _ in 0..count {
                let u: f64 = self.rng.random();
                let ty = match (u, self.players[i].side) {
                    (u, _) if u < 0.35 => GrenadeType::Flashbang,
                    (u, _) if u < 0.6 => GrenadeType::Smoke,
                    (u, _) if u < 0.85 => GrenadeType::HeGrenade,
                    (_, Side::T) => GrenadeType::Molotov,
                    (_, Side::CT) => GrenadeType::Incendiary,
                };
                let throw = self.rng.random_range(lo..hi);
                let life = match ty {
                    GrenadeType::Smoke => 18.0,
                    GrenadeType::Molotov | GrenadeType::Incendiary => 7.0,
                    _ => 1.5,
                };
                let p = &self.players[i];
                let view = (normalize_yaw(self.rng.random_range(0.0..360.0)), IDLE_SPAWN_PITCH);
                let gx = p.spawn[0] + self.rng.random_range(-300.0..300.0);
                let gy = p.spawn[1] + self.rng.random_range(-300.0..300.0);
                let destroy = throw + self.ticks(life);
                out.push(GrenadeEvent {
                    thrower_steam_id: p.id,
                    thrower_side: p.side,
                    thrower_x: p.spawn[0],
                    thrower_y: p.spawn[1],
                    thrower_z: p.spawn[2],
                    thrower_view_x: view.0,
                    thrower_view_y: view.1,
                    grenade_type: ty,
                    grenade_x: gx,
                    grenade_y: gy,
                    grenade_z: SPAWN_Z,
                    throw_tick: throw,
                    destroy_tick: destroy,
                    throw_seconds: self.secs(start, throw),
                    destroy_seconds: self.secs(start, destroy),
                    round_num,
                });
            }
        }
        out.sort_by_key(|g| g.throw_tick);
        out
    }

    /// Keep props thrown by living players before the round ended; flashes blind
    /// players who are alive at detonation.
    fn emit_props(&mut self, props: Vec<GrenadeEvent>, round_num: u32, start: Tick, end: Tick) {
        let rate = self.cfg.tick_rate as f64;
        for g in self.m.grenades.iter_mut().filter(|g| g.round_num == round_num) {
            g.destroy_tick = g.destroy_tick.min(end);
            g.destroy_seconds = (g.destroy_tick - start) as f64 / rate;
        }
        for mut g in props {
            let ti = self.index_of(g.thrower_steam_id);
            if g.throw_tick > end || !self.players[ti].alive_at(g.throw_tick) {
                continue;
            }
            g.destroy_tick = g.destroy_tick.min(end);
            g.destroy_seconds = self.secs(start, g.destroy_tick);
            if g.grenade_type == GrenadeType::Flashbang {
                let det = g.destroy_tick;
                let thrower_side = self.players[ti].side;
                let hits_opponents = self.rng.random_bool(self.players[ti].params.flash_skill);
                let n = self.rng.random_range(1..=2usize);
                let mut pool: Vec<usize> = (0..self.players.len())
                    .filter(|&j| {
                        let same = self.players[j].side == thrower_side;
                        same != hits_opponents && self.players[j].alive_at(det)
                    })
                    .collect();
                pool.shuffle(&mut self.rng);
                for &j in pool.iter().take(n) {
                    let duration = self.rng.random_range(0.7..3.0);
                    let pl = &self.players[j];
                    self.m.flashes.push(FlashEvent {
                        tick: det,
                        seconds: self.secs(start, det),
                        attacker_steam_id: g.thrower_steam_id,
                        attacker_side: thrower_side,
                        attacker_x: g.thrower_x,
                        attacker_y: g.thrower_y,
                        attacker_z: g.thrower_z,
                        attacker_view_x: g.thrower_view_x,
                        attacker_view_y: g.thrower_view_y,
                        player_steam_id: pl.id,
                        player_side: pl.side,
                        player_x: pl.spawn[0],
                        player_y: pl.spawn[1],
                        player_z: pl.spawn[2],
                        player_view_x: 0.0,
                        player_view_y: IDLE_SPAWN_PITCH,
                        flash_duration: duration,
                        round_num,
                    });
                }
            }
            self.m.grenades.push(g);
        }
        self.m.grenades.sort_by_key(|g| g.throw_tick);
        self.m.flashes.sort_by_key(|f| f.tick);
    }

    fn index_of(&self, id: SteamId) -> usize {
        self.players.iter().position(|p| p.id == id).unwrap()
    }

    fn blinded_by(&self, id: SteamId, round_num: u32, t: Tick) -> Option<&FlashEvent> {
        let rate = self.cfg.tick_rate as f64;
        self.m.flashes.iter().find(|f| {
            f.round_num == round_num
                && f.player_steam_id == id
                && f.tick <= t
                && (t - f.tick) as f64 / rate <= f.flash_duration
        })
    }

    fn mark_blinded_kills(&mut self, round_num: u32) {
        let mut updates = Vec::new();
        for (k, kill) in self.m.kills.iter().enumerate() {
            if kill.round_num != round_num {
                continue;
            }
            let attacker = self.blinded_by(kill.attacker_steam_id, round_num, kill.tick).is_some();
            let victim = self
                .blinded_by(kill.victim_steam_id, round_num, kill.tick)
                .map(|f| (f.attacker_steam_id, f.attacker_side));
            updates.push((k, attacker, victim));
        }
        for (k, attacker, victim) in updates {
            let kill = &mut self.m.kills[k];
            kill.attacker_blinded = attacker;
            kill.victim_blinded = victim.is_some();
            kill.flash_thrower_steam_id = victim.map(|v| v.0);
            kill.flash_thrower_side = victim.map(|v| v.1);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn duel(
        &mut self,
        a: usize,
        b: usize,
        tau: Tick,
        round_num: u32,
        start: Tick,
        live_end: Tick,
        first_kill_done: &mut bool,
    ) -> Tick {
        let d = self.rng.random_range(250.0..1500.0);
        let center = [self.rng.random_range(-400.0..400.0), self.rng.random_range(-400.0..400.0), 0.0];
        let beta = (if self.rng.random_bool(0.5) { 90.0f64 } else { 270.0 }
            + self.rng.random_range(-20.0..20.0))
        .to_radians();
        let u = [beta.cos(), beta.sin()];
        let pos_a = [center[0] - 0.5 * d * u[0], center[1] - 0.5 * d * u[1], self.rng.random_range(-10.0..10.0)];
        let pos_b = [center[0] + 0.5 * d * u[0], center[1] + 0.5 * d * u[1], self.rng.random_range(-10.0..10.0)];
        let pos = [pos_a, pos_b];
        let who = [a, b];

        let mut mode = DuelMode::Open;
        let order = if self.rng.random_bool(0.5) { [0, 1] } else { [1, 0] };
        for s in order {
            let p = &self.players[who[s]].params;
            let (wb, sk) = (p.wallbang_rate, p.smoke_kill_rate);
            let r: f64 = self.rng.random();
            if r < wb {
                mode = DuelMode::Wallbang { shooter: s };
                break;
            } else if r < wb + sk {
                mode = DuelMode::Smoke { shooter: s };
                break;
            }
        }
        let aware = match mode {
            DuelMode::Open => [true, true],
            DuelMode::Wallbang { shooter } | DuelMode::Smoke { shooter } => [shooter == 0, shooter == 1],
        };
        let stage = tau - self.ticks(2.0);

        if let DuelMode::Smoke { shooter } = mode {
            // the unaware side smokes the lane
            let victim = who[1 - shooter];
            let mid = [(pos_a[0] + pos_b[0]) / 2.0, (pos_a[1] + pos_b[1]) / 2.0, (pos_a[2] + pos_b[2]) / 2.0];
            let throw = tau - self.ticks(1.5);
            let destroy = throw + self.ticks(18.0);
            let vp = pos[1 - shooter];
            let view = bearing(vp, mid);
            let vs = &self.players[victim];
            self.m.grenades.push(GrenadeEvent {
                thrower_steam_id: vs.id,
                thrower_side: vs.side,
                thrower_x: vp[0],
                thrower_y: vp[1],
                thrower_z: vp[2],
                thrower_view_x: view.0,
                thrower_view_y: view.1,
                grenade_type: GrenadeType::Smoke,
                grenade_x: mid[0],
                grenade_y: mid[1],
                grenade_z: mid[2],
                throw_tick: throw,
                destroy_tick: destroy,
                throw_seconds: self.secs(start, throw),
                destroy_seconds: self.secs(start, destroy),
                round_num,
            });
        }

        // per-side look schedule and shots
        let mut look: [Option<((f64, f64), (f64, f64), Tick, Tick, bool)>; 2] = [None, None];
        let mut shots = Vec::new();
        for s in 0..2 {
            if !aware[s] {
                continue;
            }
            let p = self.players[who[s]].params.clone();
            let to_opp = bearing(pos[s], pos[1 - s]);
            let preaim = self.rng.random_bool(p.preaim_rate.clamp(0.0, 1.0));
            let sees_at = if preaim {
                let lead = self.rng.random_range(0.4..1.6);
                let lead = self.ticks(lead);
                self.frame_floor(start, tau - lead)
            } else {
                tau
            };
            let reaction = (p.reaction_mean + p.reaction_sd * std_normal(&mut self.rng)).max(0.03);
            let t1 = tau + self.ticks(reaction).max(1);
            let delta0 = (p.aim_offset_mean + p.aim_offset_sd * std_normal(&mut self.rng)).abs().min(40.0);
            let phi = self.rng.random_range(0.0..std::f64::consts::TAU);
            let start_view = (
                normalize_yaw(to_opp.0 + delta0 * phi.cos()),
                normalize_pitch(to_opp.1 + 0.3 * delta0 * phi.sin()),
            );
            let aim_view = (
                normalize_yaw(to_opp.0 + p.aim_err * std_normal(&mut self.rng)),
                normalize_pitch(to_opp.1 + 0.3 * p.aim_err * std_normal(&mut self.rng)),
            );
            let strafe = self.rng.random_bool(p.strafe_rate.clamp(0.0, 1.0));
            look[s] = Some((start_view, aim_view, sees_at, t1, strafe));
            let w = self.players[who[s]].weapon;
            let max_shots = if matches!(mode, DuelMode::Open) { w.max_shots } else { w.max_shots + 4 };
            let step = self.ticks(w.interval_secs).max(1);
            for k in 0..max_shots {
                shots.push(Shot { tick: t1 + step * k as Tick, shooter: s, index: k });
            }
        }
        shots.sort_by_key(|s| (s.tick, s.shooter));

        let mut last = tau;
        let mut finished = false;
        let mut killer: Option<(usize, Tick)> = None;
        let mut reload_shift = [0 as Tick; 2];
        for shot in shots {
            let s = shot.shooter;
            let tick = shot.tick + reload_shift[s];
            let (x, y) = (who[s], who[1 - s]);
            if finished || tick > live_end - self.ticks(1.0) {
                break;
            }
            if !self.players[x].alive_at(tick) {
                continue;
            }
            if self.players[x].mag == 0 {
                let reload = self.ticks(2.5);
                reload_shift[s] += reload;
                let p = &mut self.players[x];
                let refill = p.weapon.mag.min(p.reserve);
                p.reserve -= refill;
                p.mag = refill;
                continue;
            }
            let (_, aim, _, _, strafe) = look[s].unwrap();
            let err = self.players[x].params.aim_err;
            let view = if shot.index == 0 {
                aim
            } else {
                (
                    normalize_yaw(aim.0 + 0.5 * err * std_normal(&mut self.rng)),
                    normalize_pitch(aim.1 + 0.15 * err * std_normal(&mut self.rng)),
                )
            };
            self.fire(x, tick, view, pos[s], start, round_num, strafe);
            last = last.max(tick);

            let px = &self.players[x].params;
            let range = 1.0 - px.range_decay * ((d - 300.0) / 2000.0).clamp(0.0, 0.6);
            let first = if shot.index == 0 { px.first_shot_factor } else { 1.0 };
            let wall = if matches!(mode, DuelMode::Wallbang { .. }) { 0.8 } else { 1.0 };
            let vul = self.players[y].params.vulnerability;
            let p_hit = (px.hit_prob * range * first * wall * vul).clamp(0.0, 1.0);
            let head_bias = px.head_bias.clamp(0.0, 1.0);
            if !self.rng.random_bool(p_hit) {
                continue;
            }
            let group = if self.rng.random_bool(head_bias) {
                HitGroup::Head
            } else {
                let r: f64 = self.rng.random();
                let mut acc = 0.0;
                let mut g = HitGroup::Chest;
                for (hg, w) in BODY_GROUPS {
                    acc += w;
                    if r < acc {
                        g = hg;
                        break;
                    }
                }
                g
            };
            let killed = self.damage(x, y, tick, view, pos[s], pos[1 - s], group, strafe, start, round_num);
            if killed {
                let special = match mode {
                    DuelMode::Wallbang { shooter } if shooter == s => 1,
                    DuelMode::Smoke { shooter } if shooter == s => 2,
                    _ => 0,
                };
                self.kill(x, y, tick, view, pos[s], pos[1 - s], group, special, start, round_num, first_kill_done);
                killer = Some((s, tick));
                finished = true;
            }
        }

        if let Some((s, kt)) = killer {
            let x = who[s];
            if self.rng.random_bool(self.players[x].params.inertial_rate.clamp(0.0, 1.0)) {
                let n = self.rng.random_range(1..=2);
                let mut t = kt;
                for _ in 0..n {
                    t += self.rng.random_range(3..=9);
                    if self.players[x].mag == 0 || t > live_end - self.ticks(1.0) {
                        break;
                    }
                    let (_, aim, _, _, strafe) = look[s].unwrap();
                    self.fire(x, t, aim, pos[s], start, round_num, strafe);
                    last = last.max(t);
                }
            }
        }

        let end = (last + self.ticks(1.0)).min(live_end);
        for s in 0..2 {
            let kind = match look[s] {
                Some((start_view, aim, from, aim_tick, strafe)) => PoseKind::Look {
                    start: start_view,
                    aim,
                    from,
                    aim_tick,
                    strafe,
                },
                None => PoseKind::Stand,
            };
            self.players[who[s]].poses.push(Pose { from: stage, to: end, pos: pos[s], kind });
        }
        end
    }

    #[allow(clippy::too_many_arguments)]
    fn fire(&mut self, x: usize, tick: Tick, view: (f64, f64), pos: [f64; 3], start: Tick, round_num: u32, strafe: bool) {
        let secs = self.secs(start, tick);
        let p = &mut self.players[x];
        p.mag = p.mag.saturating_sub(1);
        self.m.weapon_fires.push(WeaponFireEvent {
            tick,
            seconds: secs,
            player_steam_id: p.id,
            player_side: p.side,
            player_x: pos[0],
            player_y: pos[1],
            player_z: pos[2],
            player_view_x: view.0,
            player_view_y: view.1,
            player_strafe: strafe,
            weapon: p.weapon.name.into(),
            weapon_class: p.weapon.class.into(),
            zoom_level: u32::from(p.weapon.sniper),
            ammo_in_magazine: p.mag,
            ammo_in_reserve: p.reserve,
            round_num,
        });
    }

    #[allow(clippy::too_many_arguments)]
    fn damage(
        &mut self,
        x: usize,
        y: usize,
        tick: Tick,
        view: (f64, f64),
        ax: [f64; 3],
        vx: [f64; 3],
        group: HitGroup,
        strafe: bool,
        start: Tick,
        round_num: u32,
    ) -> bool {
        let weapon = self.players[x].weapon;
        let raw = damage_for(&weapon, group);
        let victim_view = bearing(vx, ax);
        let secs = self.secs(start, tick);
        let (vid, vside, taken, armor_raw, armor_taken) = {
            let v = &mut self.players[y];
            let taken = raw.min(v.hp);
            v.hp -= taken;
            let armor_raw = raw / 2;
            let armor_taken = armor_raw.min(v.armor);
            v.armor -= armor_taken;
            (v.id, v.side, taken, armor_raw, armor_taken)
        };
        let a = &self.players[x];
        self.m.damages.push(DamageEvent {
            tick,
            seconds: secs,
            attacker_steam_id: a.id,
            victim_steam_id: vid,
            attacker_side: a.side,
            victim_side: vside,
            attacker_x: ax[0],
            attacker_y: ax[1],
            attacker_z: ax[2],
            victim_x: vx[0],
            victim_y: vx[1],
            victim_z: vx[2],
            attacker_view_x: view.0,
            attacker_view_y: view.1,
            victim_view_x: victim_view.0,
            victim_view_y: victim_view.1,
            attacker_strafe: strafe,
            weapon: weapon.name.into(),
            weapon_class: weapon.class.into(),
            hp_damage: raw,
            hp_damage_taken: taken,
            armor_damage: armor_raw,
            armor_damage_taken: armor_taken,
            hit_group: group,
            is_friendly_fire: false,
            distance: dist(ax, vx),
            zoom_level: u32::from(weapon.sniper),
            round_num,
        });
        self.players[y].hp == 0
    }

    #[allow(clippy::too_many_arguments)]
    fn kill(
        &mut self,
        x: usize,
        y: usize,
        tick: Tick,
        view: (f64, f64),
        ax: [f64; 3],
        vx: [f64; 3],
        group: HitGroup,
        special: u8,
        start: Tick,
        round_num: u32,
        first_kill_done: &mut bool,
    ) {
        let weapon = self.players[x].weapon;
        let penetrated = if special == 1 {
            let r: f64 = self.rng.random();
            if r < 0.6 {
                1
            } else if r < 0.9 {
                2
            } else {
                3
            }
        } else {
            0
        };
        let no_scope = weapon.sniper && self.rng.random_bool(0.1);
        let trade_window = self.ticks(5.0);
        let is_trade = self.players[y]
            .last_kill_tick
            .is_some_and(|t| tick - t <= trade_window && t >= start);
        let is_first = !*first_kill_done;
        *first_kill_done = true;
        self.players[y].death_tick = Some(tick);
        self.players[x].round_kills += 1;
        self.players[x].last_kill_tick = Some(tick);
        let victim_view = bearing(vx, ax);
        let (a, v) = (&self.players[x], &self.players[y]);
        self.m.kills.push(KillEvent {
            tick,
            seconds: self.secs(start, tick),
            attacker_steam_id: a.id,
            victim_steam_id: v.id,
            attacker_side: a.side,
            victim_side: v.side,
            attacker_x: ax[0],
            attacker_y: ax[1],
            attacker_z: ax[2],
            attacker_view_x: view.0,
            attacker_view_y: view.1,
            victim_x: vx[0],
            victim_y: vx[1],
            victim_z: vx[2],
            victim_view_x: victim_view.0,
            victim_view_y: victim_view.1,
            distance: dist(ax, vx),
            weapon: weapon.name.into(),
            weapon_class: weapon.class.into(),
            assister_steam_id: None,
            assister_side: None,
            is_suicide: false,
            is_teamkill: false,
            is_wallbang: special == 1,
            penetrated_objects: penetrated,
            is_first_kill: is_first,
            is_headshot: group == HitGroup::Head,
            victim_blinded: false,
            attacker_blinded: false,
            flash_thrower_steam_id: None,
            flash_thrower_side: None,
            no_scope,
            thru_smoke: special == 2,
            is_trade,
            round_num,
        });
    }

    fn emit_frames(&mut self, round_num: u32, start: Tick, end: Tick) {
        let stride = self.stride();
        let rate = self.cfg.tick_rate as f64;
        let mut tick = start;
        while tick <= end {
            let mut players = Vec::with_capacity(self.players.len());
            for p in &self.players {
                let alive = p.alive_at(tick);
                let pose = p.poses.iter().rev().find(|ps| ps.from <= tick && tick <= ps.to);
                let secs = (tick - start) as f64 / rate;
                let (pos, view, vel, scoped) = match pose {
                    Some(ps) => match ps.kind {
                        PoseKind::Look { start: sv, aim, from, aim_tick, strafe } => {
                            let view = if tick < from {
                                (normalize_yaw(sv.0 + 180.0), IDLE_MID_PITCH)
                            } else if tick >= aim_tick {
                                aim
                            } else {
                                let w = (tick - from) as f64 / (aim_tick - from).max(1) as f64;
                                view_lerp(sv, aim, w)
                            };
                            let lateral = if strafe { 200.0 } else { 0.0 };
                            let yaw = view.0.to_radians();
                            let vel = [-yaw.sin() * lateral, yaw.cos() * lateral, 0.0];
                            (ps.pos, view, vel, p.weapon.sniper && tick >= from)
                        }
                        PoseKind::Stand => {
                            let yaw = normalize_yaw(p.idle_phase.to_degrees() + 15.0 * (secs * 0.7).sin());
                            (ps.pos, (yaw, IDLE_MID_PITCH), [0.0; 3], false)
                        }
                    },
                    None => {
                        let yaw = normalize_yaw(p.idle_phase.to_degrees() + 40.0 * (secs * 0.3 + p.idle_phase).sin());
                        let wobble = 30.0 * (secs * 0.5 + p.idle_phase).sin();
                        let pos = [p.spawn[0] + wobble, p.spawn[1], p.spawn[2]];
                        let vel = [15.0 * (secs * 0.5 + p.idle_phase).cos(), 0.0, 0.0];
                        (pos, (yaw, IDLE_SPAWN_PITCH), vel, false)
                    }
                };
                let blinded = self.m.flashes.iter().any(|f| {
                    f.round_num == round_num
                        && f.player_steam_id == p.id
                        && f.tick <= tick
                        && (tick - f.tick) as f64 / rate <= f.flash_duration
                });
                let ducking = alive && (p.idle_phase + secs).sin() > 0.95;
                players.push(FramePlayer {
                    steam_id: p.id,
                    side: p.side,
                    x: pos[0],
                    y: pos[1],
                    z: pos[2],
                    view_x: view.0,
                    view_y: view.1,
                    velocity_x: if alive { vel[0] } else { 0.0 },
                    velocity_y: if alive { vel[1] } else { 0.0 },
                    velocity_z: if alive { vel[2] } else { 0.0 },
                    is_alive: alive,
                    is_blinded: alive && blinded,
                    is_airborne: false,
                    is_ducking: ducking,
                    is_ducking_in_progress: false,
                    is_un_ducking_in_progress: false,
                    is_defusing: false,
                    is_planting: false,
                    is_reloading: false,
                    is_in_bomb_zone: alive && pose.is_none() && p.side == Side::T,
                    is_standing: alive && !ducking,
                    is_scoped: alive && scoped,
                    is_walking: alive && vel[0].abs() + vel[1].abs() < 100.0 && vel[0].abs() + vel[1].abs() > 0.0,
                    isolation_degree: 0.0,
                });
            }
            fill_isolation(&mut players);
            self.m.frames.push(MovementFrame { tick, round_num, players });
            tick += stride;
        }
    }

    fn finish(mut self, profiles: &[CheatProfile], _seed: u64) -> (MatchRecord, LabelSet) {
        self.m.damages.sort_by_key(|e| e.tick);
        self.m.kills.sort_by_key(|e| e.tick);
        self.m.weapon_fires.sort_by_key(|e| e.tick);
        let labels = LabelSet {
            match_id: self.m.match_id.clone(),
            labels: self
                .players
                .iter()
                .zip(profiles)
                .map(|(p, prof)| {
                    let ct = prof.kind.cheat_type();
                    PlayerLabel {
                        steam_id: p.id,
                        cheater: ct != CheatType::None,
                        cheat_type: ct,
                        ban_date_utc: None,
                    }
                })
                .collect(),
        };
        (self.m, labels)
    }
}

/// Distance from each living player to the centroid of its living teammates.
pub fn fill_isolation(players: &mut [FramePlayer]) {
    let snapshot: Vec<(Side, bool, [f64; 3])> = players.iter().map(|p| (p.side, p.is_alive, p.position())).collect();
    for (i, p) in players.iter_mut().enumerate() {
        if !p.is_alive {
            p.isolation_degree = 0.0;
            continue;
        }
        let mut c = [0.0; 3];
        let mut n = 0.0;
        for (j, (side, alive, pos)) in snapshot.iter().enumerate() {
            if j != i && *alive && *side == p.side {
                c[0] += pos[0];
                c[1] += pos[1];
                c[2] += pos[2];
                n += 1.0;
            }
        }
        p.isolation_degree = if n > 0.0 {
            dist(p.position(), [c[0] / n, c[1] / n, c[2] / n])
        } else {
            0.0
        };
    }
}

// ---------------------------------------------------------------------------

/// Recipe for a whole corpus of matches.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct CorpusSpec {
    pub matches: usize,
    pub players: usize,
    pub rounds: u32,
    /// Expected cheaters of each kind per match; fractional rates are spread
    /// deterministically over consecutive matches.
    pub cheaters: Vec<(ProfileKind, f64)>,
    pub boosting: f64,
    pub sophistication: f64,
    pub overrides: BehaviorOverrides,
    /// Parameter shift applied to cheaters from this fraction of the corpus on.
    pub shift: Option<ProfileShift>,
    pub hours_between_matches: f64,
    pub synth: SynthConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProfileShift {
    pub after_fraction: f64,
    #[serde(default)]
    pub sophistication: Option<f64>,
    #[serde(default)]
    pub overrides: BehaviorOverrides,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            matches: 40,
            players: 10,
            rounds: 6,
            cheaters: vec![(ProfileKind::Aimbot, 1.0)],
            boosting: 0.0,
            sophistication: 0.0,
            overrides: BehaviorOverrides::default(),
            shift: None,
            hours_between_matches: 6.0,
            synth: SynthConfig::default(),
        }
    }
}

/// SplitMix64 step, used to derive independent per-match seeds.
pub fn mix_seed(seed: u64, i: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(i.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn spread(rate: f64, i: usize) -> usize {
    ((i + 1) as f64 * rate + 1e-9).floor() as usize - (i as f64 * rate + 1e-9).floor() as usize
}

/// Profiles for match `i` of the corpus, in player order.
pub fn corpus_profiles(spec: &CorpusSpec, i: usize, seed: u64) -> Vec<CheatProfile> {
    let shifted = spec
        .shift
        .as_ref()
        .filter(|s| i as f64 >= s.after_fraction * spec.matches as f64);
    let mut out = Vec::with_capacity(spec.players);
    for &(kind, rate) in &spec.cheaters {
        for _ in 0..spread(rate, i) {
            let mut p = CheatProfile {
                kind,
                sophistication: spec.sophistication,
                overrides: spec.overrides.clone(),
            };
            if let Some(s) = shifted {
                if let Some(soph) = s.sophistication {
                    p.sophistication = soph;
                }
                merge_overrides(&mut p.overrides, &s.overrides);
            }
            out.push(p);
        }
    }
    for _ in 0..spread(spec.boosting, i) {
        out.push(CheatProfile::new(ProfileKind::BoostingLike, 0.0));
    }
    out.truncate(spec.players);
    while out.len() < spec.players {
        out.push(CheatProfile::honest());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed ^ 0x5EED, i as u64));
    out.shuffle(&mut rng);
    out
}

fn merge_overrides(dst: &mut BehaviorOverrides, src: &BehaviorOverrides) {
    macro_rules! take {
        ($($f:ident),*) => {$( if src.$f.is_some() { dst.$f = src.$f; } )*};
    }
    take!(reaction_mean, reaction_sd, headshot_bias, wallbang_rate, props_rate, preaim_rate);
}

/// Generate match `i` of a corpus.
pub fn generate_corpus_match(spec: &CorpusSpec, i: usize, seed: u64) -> Result<(MatchRecord, LabelSet)> {
    let profiles = corpus_profiles(spec, i, seed);
    let mut cfg = spec.synth.clone();
    cfg.date_utc = spec.synth.date_utc + Duration::seconds((spec.hours_between_matches * 3600.0 * i as f64) as i64);
    generate_with_config(&profiles, spec.rounds, mix_seed(seed, i as u64), &cfg)
}

pub fn generate_corpus(spec: &CorpusSpec, seed: u64) -> Result<Vec<(MatchRecord, LabelSet)>> {
    (0..spec.matches).map(|i| generate_corpus_match(spec, i, seed)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn honest(n: usize) -> Vec<CheatProfile> {
        vec![CheatProfile::honest(); n]
    }

    #[test]
    fn empty_player_list_is_config_error() {
        assert!(matches!(generate_synthetic_match(&[], 3, 1), Err(ReplayError::Config(_))));
    }

    #[test]
    fn rates_outside_unit_interval_rejected() {
        let mut p = CheatProfile::new(ProfileKind::Aimbot, 0.0);
        p.overrides.props_rate = Some(1.5);
        assert!(p.validate().is_err());
        assert!(CheatProfile::new(ProfileKind::Aimbot, 1.2).validate().is_err());
    }

    #[test]
    fn sophistication_one_keeps_honest_parameters() {
        let mut r1 = ChaCha8Rng::seed_from_u64(3);
        let mut r2 = ChaCha8Rng::seed_from_u64(3);
        let a = BehaviorParams::for_profile(&CheatProfile::new(ProfileKind::Aimbot, 1.0), &mut r1);
        let h = BehaviorParams::for_profile(&CheatProfile::honest(), &mut r2);
        assert_eq!(a, h);
    }

    #[test]
    fn spread_distributes_fractional_rates() {
        let total: usize = (0..10).map(|i| spread(0.5, i)).sum();
        assert_eq!(total, 5);
        assert!((0..10).all(|i| spread(2.0, i) == 2));
    }

    #[test]
    fn idle_frames_contain_no_sightings_toward_spawn() {
        let (m, _) = generate_synthetic_match(&honest(4), 1, 11).unwrap();
        let fr = &m.frames[0];
        assert!(fr.players.iter().all(|p| (p.view_y - IDLE_SPAWN_PITCH).abs() < 1e-9));
    }

    #[test]
    fn isolation_ignores_dead_teammates() {
        let (m, _) = generate_synthetic_match(&honest(4), 1, 5).unwrap();
        let mut players = m.frames[0].players.clone();
        players[1].is_alive = false;
        fill_isolation(&mut players);
        // two CT players, one dead: the survivor has no living teammate
        assert_eq!(players[0].isolation_degree, 0.0);
    }
}
