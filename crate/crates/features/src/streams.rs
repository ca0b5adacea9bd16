//! The seven per-player temporal streams and their column maps.

use serde::{Deserialize, Serialize};

use hawk_replay::{is_sniper_class, GrenadeType, HitGroup, MatchRecord, PlayerRef, RoundRecord, SteamId, Tick};

use crate::config::FeatureConfig;
use crate::error::{FeatureError, Result};

/// Stream identity, in embedding concatenation order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum StreamKind {
    Economy,
    Movement,
    Damage,
    Elimination,
    AuxiliaryProps,
    OffensiveProps,
    WeaponFire,
}

impl StreamKind {
    pub const ALL: [StreamKind; 7] = [
        StreamKind::Economy,
        StreamKind::Movement,
        StreamKind::Damage,
        StreamKind::Elimination,
        StreamKind::AuxiliaryProps,
        StreamKind::OffensiveProps,
        StreamKind::WeaponFire,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            StreamKind::Economy => "economy",
            StreamKind::Movement => "movement",
            StreamKind::Damage => "damage",
            StreamKind::Elimination => "elimination",
            StreamKind::AuxiliaryProps => "auxiliaryProps",
            StreamKind::OffensiveProps => "offensiveProps",
            StreamKind::WeaponFire => "weaponFire",
        }
    }

    pub fn short(self) -> &'static str {
        match self {
            StreamKind::Economy => "eco",
            StreamKind::Movement => "mov",
            StreamKind::Damage => "dmg",
            StreamKind::Elimination => "elm",
            StreamKind::AuxiliaryProps => "aux",
            StreamKind::OffensiveProps => "off",
            StreamKind::WeaponFire => "wf",
        }
    }

    pub fn columns(self) -> &'static [&'static str] {
        match self {
            StreamKind::Economy => ECONOMY_COLUMNS,
            StreamKind::Movement => MOVEMENT_COLUMNS,
            StreamKind::Damage => DAMAGE_COLUMNS,
            StreamKind::Elimination => ELIMINATION_COLUMNS,
            StreamKind::AuxiliaryProps => AUXILIARY_COLUMNS,
            StreamKind::OffensiveProps => OFFENSIVE_COLUMNS,
            StreamKind::WeaponFire => WEAPON_FIRE_COLUMNS,
        }
    }

    pub fn width(self) -> usize {
        self.columns().len()
    }
}

pub const STREAM_SCHEMA_VERSION: u32 = 1;

pub const DAMAGE_COLUMNS: &[&str] = &[
    "seconds",
    "attackerX",
    "attackerY",
    "attackerZ",
    "victimX",
    "victimY",
    "victimZ",
    "attackerViewX",
    "attackerViewY",
    "victimViewX",
    "victimViewY",
    "attackerStrafe",
    "isSniper",
    "hpDamage",
    "hpDamageTaken",
    "armorDamage",
    "armorDamageTaken",
    "hitGroup.chest",
    "hitGroup.generic",
    "hitGroup.head",
    "hitGroup.neck",
    "hitGroup.leftArm",
    "hitGroup.rightArm",
    "hitGroup.leftLeg",
    "hitGroup.rightLeg",
    "hitGroup.stomach",
    "isFriendlyFire",
    "distance",
    "zoomLevel",
    "roundNum",
];

pub const ELIMINATION_COLUMNS: &[&str] = &[
    "seconds",
    "attackerX",
    "attackerY",
    "attackerZ",
    "attackerViewX",
    "attackerViewY",
    "victimX",
    "victimY",
    "victimZ",
    "victimViewX",
    "victimViewY",
    "distance",
    "isSniper",
    "hasAssister",
    "isSuicide",
    "isTeamkill",
    "isWallbang",
    "penetratedObjects",
    "isFirstKill",
    "isHeadshot",
    "victimBlinded",
    "attackerBlinded",
    "hasFlashThrower",
    "noScope",
    "thruSmoke",
    "isTrade",
    "roundNum",
];

pub const WEAPON_FIRE_COLUMNS: &[&str] = &[
    "seconds",
    "playerX",
    "playerY",
    "playerZ",
    "playerViewX",
    "playerViewY",
    "playerStrafe",
    "isSniper",
    "zoomLevel",
    "ammoInMagazine",
    "ammoInReserve",
    "roundNum",
];

pub const AUXILIARY_COLUMNS: &[&str] = &[
    "seconds",
    "attackerX",
    "attackerY",
    "attackerZ",
    "attackerViewX",
    "attackerViewY",
    "playerX",
    "playerY",
    "playerZ",
    "playerViewX",
    "playerViewY",
    "blindedOpponent",
    "blindedSelf",
    "flashDuration",
    "roundNum",
];

pub const OFFENSIVE_COLUMNS: &[&str] = &[
    "throwSeconds",
    "destroySeconds",
    "throwerX",
    "throwerY",
    "throwerZ",
    "throwerViewX",
    "throwerViewY",
    "grenadeX",
    "grenadeY",
    "grenadeZ",
    "grenadeType.flashbang",
    "grenadeType.smoke",
    "grenadeType.heGrenade",
    "grenadeType.molotov",
    "grenadeType.incendiary",
    "grenadeType.decoy",
    "roundNum",
];

pub const MOVEMENT_COLUMNS: &[&str] = &[
    "seconds",
    "x",
    "y",
    "z",
    "viewX",
    "viewY",
    "velocityX",
    "velocityY",
    "velocityZ",
    "isAlive",
    "isBlinded",
    "isAirborne",
    "isDucking",
    "isDuckingInProgress",
    "isUnDuckingInProgress",
    "isDefusing",
    "isPlanting",
    "isReloading",
    "isInBombZone",
    "isStanding",
    "isScoped",
    "isWalking",
    "isolationDegree",
    "roundNum",
];

pub const ECONOMY_COLUMNS: &[&str] = &[
    "roundNum",
    "equipmentValueFreezetimeEnd",
    "equipmentValueRoundStart",
    "cash",
    "cashSpendTotal",
];

/// Row-major sequence with a fixed width.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sequence {
    pub width: usize,
    pub data: Vec<f64>,
}

impl Sequence {
    pub fn new(width: usize) -> Self {
        Sequence { width, data: Vec::new() }
    }

    pub fn from_rows(width: usize, rows: &[Vec<f64>]) -> Self {
        let mut s = Sequence::new(width);
        for r in rows {
            s.push(r);
        }
        s
    }

    pub fn push(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.width, "row width");
        self.data.extend_from_slice(row);
    }

    pub fn len(&self) -> usize {
        if self.width == 0 {
            0
        } else {
            self.data.len() / self.width
        }
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.width..(i + 1) * self.width]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.width.max(1))
    }

    /// Keep only the first `n` rows.
    pub fn truncate(&mut self, n: usize) {
        self.data.truncate(n * self.width);
    }
}

/// One player's seven streams, indexed by [`StreamKind::index`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemporalStreams {
    pub streams: Vec<Sequence>,
}

impl TemporalStreams {
    pub fn empty() -> Self {
        TemporalStreams {
            streams: StreamKind::ALL.iter().map(|k| Sequence::new(k.width())).collect(),
        }
    }

    pub fn get(&self, kind: StreamKind) -> &Sequence {
        &self.streams[kind.index()]
    }

    pub fn get_mut(&mut self, kind: StreamKind) -> &mut Sequence {
        &mut self.streams[kind.index()]
    }

    pub fn truncate(&mut self, max_len: usize) {
        for s in &mut self.streams {
            s.truncate(max_len);
        }
    }
}

fn b(v: bool) -> f64 {
    if v {
        1.0
    } else {
        0.0
    }
}

fn round_start(m: &MatchRecord, round_num: u32, tick: Tick) -> Tick {
    m.round(round_num)
        .or_else(|| m.round_at(tick))
        .map(|r: &RoundRecord| r.start_tick)
        .unwrap_or(0)
}

fn secs(m: &MatchRecord, round_num: u32, tick: Tick) -> f64 {
    m.secs_between(round_start(m, round_num, tick), tick)
}

pub fn find_player(m: &MatchRecord, id: SteamId) -> Result<&PlayerRef> {
    m.player(id).ok_or(FeatureError::UnknownPlayer(id))
}

/// Build the seven streams for one player. Every event where the player is the
/// actor contributes one row; movement frames are thinned to the configured stride.
pub fn extract_streams(m: &MatchRecord, player: SteamId, cfg: &FeatureConfig) -> Result<TemporalStreams> {
    find_player(m, player)?;
    let mut out = TemporalStreams::empty();

    let mut damages: Vec<_> = m.damages.iter().filter(|d| d.attacker_steam_id == player).collect();
    damages.sort_by_key(|d| d.tick);
    let s = out.get_mut(StreamKind::Damage);
    for d in damages {
        let mut row = vec![
            secs(m, d.round_num, d.tick),
            d.attacker_x,
            d.attacker_y,
            d.attacker_z,
            d.victim_x,
            d.victim_y,
            d.victim_z,
            d.attacker_view_x,
            d.attacker_view_y,
            d.victim_view_x,
            d.victim_view_y,
            b(d.attacker_strafe),
            b(is_sniper_class(&d.weapon_class)),
            d.hp_damage as f64,
            d.hp_damage_taken as f64,
            d.armor_damage as f64,
            d.armor_damage_taken as f64,
        ];
        let mut hg = [0.0; 9];
        hg[d.hit_group.index()] = 1.0;
        row.extend_from_slice(&hg);
        row.extend_from_slice(&[b(d.is_friendly_fire), d.distance, d.zoom_level as f64, d.round_num as f64]);
        s.push(&row);
    }

    let mut kills: Vec<_> = m.kills.iter().filter(|k| k.attacker_steam_id == player).collect();
    kills.sort_by_key(|k| k.tick);
    let s = out.get_mut(StreamKind::Elimination);
    for k in kills {
        s.push(&[
            secs(m, k.round_num, k.tick),
            k.attacker_x,
            k.attacker_y,
            k.attacker_z,
            k.attacker_view_x,
            k.attacker_view_y,
            k.victim_x,
            k.victim_y,
            k.victim_z,
            k.victim_view_x,
            k.victim_view_y,
            k.distance,
            b(is_sniper_class(&k.weapon_class)),
            b(k.assister_steam_id.is_some()),
            b(k.is_suicide),
            b(k.is_teamkill),
            b(k.is_wallbang),
            k.penetrated_objects as f64,
            b(k.is_first_kill),
            b(k.is_headshot),
            b(k.victim_blinded),
            b(k.attacker_blinded),
            b(k.flash_thrower_steam_id.is_some()),
            b(k.no_scope),
            b(k.thru_smoke),
            b(k.is_trade),
            k.round_num as f64,
        ]);
    }

    let mut fires: Vec<_> = m.weapon_fires.iter().filter(|f| f.player_steam_id == player).collect();
    fires.sort_by_key(|f| f.tick);
    let s = out.get_mut(StreamKind::WeaponFire);
    for f in fires {
        s.push(&[
            secs(m, f.round_num, f.tick),
            f.player_x,
            f.player_y,
            f.player_z,
            f.player_view_x,
            f.player_view_y,
            b(f.player_strafe),
            b(is_sniper_class(&f.weapon_class)),
            f.zoom_level as f64,
            f.ammo_in_magazine as f64,
            f.ammo_in_reserve as f64,
            f.round_num as f64,
        ]);
    }

    let mut flashes: Vec<_> = m.flashes.iter().filter(|f| f.attacker_steam_id == player).collect();
    flashes.sort_by_key(|f| f.tick);
    let s = out.get_mut(StreamKind::AuxiliaryProps);
    for f in flashes {
        s.push(&[
            secs(m, f.round_num, f.tick),
            f.attacker_x,
            f.attacker_y,
            f.attacker_z,
            f.attacker_view_x,
            f.attacker_view_y,
            f.player_x,
            f.player_y,
            f.player_z,
            f.player_view_x,
            f.player_view_y,
            b(f.player_side != f.attacker_side),
            b(f.player_steam_id == player),
            f.flash_duration,
            f.round_num as f64,
        ]);
    }

    let mut grenades: Vec<_> = m.grenades.iter().filter(|g| g.thrower_steam_id == player).collect();
    grenades.sort_by_key(|g| g.throw_tick);
    let s = out.get_mut(StreamKind::OffensiveProps);
    for g in grenades {
        let mut row = vec![
            secs(m, g.round_num, g.throw_tick),
            secs(m, g.round_num, g.destroy_tick),
            g.thrower_x,
            g.thrower_y,
            g.thrower_z,
            g.thrower_view_x,
            g.thrower_view_y,
            g.grenade_x,
            g.grenade_y,
            g.grenade_z,
        ];
        let mut ty = [0.0; 6];
        ty[GrenadeType::ALL.iter().position(|t| *t == g.grenade_type).unwrap()] = 1.0;
        row.extend_from_slice(&ty);
        row.push(g.round_num as f64);
        s.push(&row);
    }

    let stride = cfg.movement_stride.max(1) as Tick;
    let mut frames: Vec<_> = m.frames.iter().collect();
    frames.sort_by_key(|f| f.tick);
    let s = out.get_mut(StreamKind::Movement);
    let mut last: Option<(u32, Tick)> = None;
    for fr in frames {
        let Some(p) = fr.player(player) else { continue };
        if let Some((r, t)) = last {
            if r == fr.round_num && fr.tick - t < stride {
                continue;
            }
        }
        last = Some((fr.round_num, fr.tick));
        s.push(&[
            secs(m, fr.round_num, fr.tick),
            p.x,
            p.y,
            p.z,
            p.view_x,
            p.view_y,
            p.velocity_x,
            p.velocity_y,
            p.velocity_z,
            b(p.is_alive),
            b(p.is_blinded),
            b(p.is_airborne),
            b(p.is_ducking),
            b(p.is_ducking_in_progress),
            b(p.is_un_ducking_in_progress),
            b(p.is_defusing),
            b(p.is_planting),
            b(p.is_reloading),
            b(p.is_in_bomb_zone),
            b(p.is_standing),
            b(p.is_scoped),
            b(p.is_walking),
            p.isolation_degree,
            fr.round_num as f64,
        ]);
    }

    let mut eco: Vec<_> = m.economy.iter().filter(|e| e.steam_id == player).collect();
    eco.sort_by_key(|e| e.round_num);
    let s = out.get_mut(StreamKind::Economy);
    for e in eco {
        s.push(&[
            e.round_num as f64,
            e.equipment_value_freezetime_end as f64,
            e.equipment_value_round_start as f64,
            e.cash as f64,
            e.cash_spend_total as f64,
        ]);
    }
    Ok(out)
}

/// Hit-group one-hot position used by the damage stream.
pub fn hit_group_column(g: HitGroup) -> usize {
    DAMAGE_COLUMNS.iter().position(|c| *c == "hitGroup.chest").unwrap() + g.index()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StreamSchema {
    pub schema_version: u32,
    pub streams: Vec<StreamColumns>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamColumns {
    pub name: String,
    pub columns: Vec<String>,
}

/// The published column map.
pub fn stream_schema() -> StreamSchema {
    StreamSchema {
        schema_version: STREAM_SCHEMA_VERSION,
        streams: StreamKind::ALL
            .iter()
            .map(|k| StreamColumns {
                name: k.name().into(),
                columns: k.columns().iter().map(|c| c.to_string()).collect(),
            })
            .collect(),
    }
}

/// Shipped copy of the column map.
pub const STREAM_SCHEMA_JSON: &str = include_str!("../schema/streams.v1.json");
