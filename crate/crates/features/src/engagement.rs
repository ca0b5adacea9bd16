//! Engagement segmentation: sighting (t0), first fire (t1), first hit (t2).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use hawk_replay::{GrenadeType, MatchRecord, Side, SteamId, Tick};

use crate::config::FeatureConfig;
use crate::error::Result;
use crate::streams::find_player;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Engagement {
    pub opponent_id: SteamId,
    pub round_num: u32,
    pub t0_tick: Tick,
    pub t1_tick: Option<Tick>,
    pub t2_tick: Option<Tick>,
    /// Seconds since the round start.
    pub t0: f64,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    pub rat: Option<f64>,
    pub ajt: Option<f64>,
    pub drt: Option<f64>,
    pub raa: Option<f64>,
    pub aja: Option<f64>,
    /// Attacker-victim distance at the first hit.
    pub hit_distance: Option<f64>,
    pub view_t0: (f64, f64),
    pub view_t1: Option<(f64, f64)>,
    pub view_t2: Option<(f64, f64)>,
    pub attacker_pos_t0: [f64; 3],
    pub attacker_pos_t1: Option<[f64; 3]>,
    pub attacker_pos_t2: Option<[f64; 3]>,
    pub victim_pos: [f64; 3],
}

/// Unit vector for a (yaw, pitch) view in degrees.
pub fn view_vector(yaw: f64, pitch: f64) -> [f64; 3] {
    let (y, p) = (yaw.to_radians(), pitch.to_radians());
    [p.cos() * y.cos(), p.cos() * y.sin(), p.sin()]
}

/// Great-circle angle between two view directions, degrees in `[0, 180]`.
pub fn view_angle(a: (f64, f64), b: (f64, f64)) -> f64 {
    let u = view_vector(a.0, a.1);
    let v = view_vector(b.0, b.1);
    let cross = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    let cn = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
    let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    cn.atan2(dot).to_degrees()
}

/// Yaw and pitch of the direction from `from` toward `to`, degrees.
pub fn direction(from: [f64; 3], to: [f64; 3]) -> (f64, f64) {
    let dx = to[0] - from[0];
    let dy = to[1] - from[1];
    let dz = to[2] - from[2];
    (dy.atan2(dx).to_degrees(), dz.atan2((dx * dx + dy * dy).sqrt()).to_degrees())
}

/// Absolute shortest yaw difference in degrees.
pub fn yaw_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    d.min(360.0 - d)
}

/// Distance from point `p` to the segment `a`-`b`.
pub fn point_segment_distance(p: [f64; 3], a: [f64; 3], b: [f64; 3]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let ap = [p[0] - a[0], p[1] - a[1], p[2] - a[2]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1] + ab[2] * ab[2];
    let t = if len2 > 0.0 {
        ((ap[0] * ab[0] + ap[1] * ab[1] + ap[2] * ab[2]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let q = [a[0] + t * ab[0] - p[0], a[1] + t * ab[1] - p[1], a[2] + t * ab[2] - p[2]];
    (q[0] * q[0] + q[1] * q[1] + q[2] * q[2]).sqrt()
}

/// Whether `target` sits inside the observer's field of view.
pub fn in_fov(view: (f64, f64), from: [f64; 3], target: [f64; 3], half_angle: f64) -> bool {
    let (yaw, pitch) = direction(from, target);
    yaw_gap(view.0, yaw) <= half_angle && (view.1 - pitch).abs() <= half_angle
}

struct Sighting {
    tick: Tick,
    round: u32,
    opponent: SteamId,
    view: (f64, f64),
    pos: [f64; 3],
    opp_pos: [f64; 3],
}

#[derive(Clone, Copy)]
enum Ev {
    // order matters at equal ticks: sightings, then fires, then damage
    Sight(usize),
    Fire(usize),
    Damage(usize),
}

impl Ev {
    fn rank(self) -> u8 {
        match self {
            Ev::Sight(_) => 0,
            Ev::Fire(_) => 1,
            Ev::Damage(_) => 2,
        }
    }
}

struct Open {
    round: u32,
    last: Tick,
    e: Engagement,
}

fn sightings(m: &MatchRecord, player: SteamId, side: Side, cfg: &FeatureConfig) -> Vec<Sighting> {
    let smokes: Vec<_> = m
        .grenades
        .iter()
        .filter(|g| g.grenade_type == GrenadeType::Smoke)
        .collect();
    let mut out = Vec::new();
    let mut frames: Vec<_> = m.frames.iter().collect();
    frames.sort_by_key(|f| f.tick);
    for fr in frames {
        let Some(me) = fr.player(player) else { continue };
        if !me.is_alive {
            continue;
        }
        let view = (me.view_x, me.view_y);
        for o in &fr.players {
            if o.side == side || !o.is_alive {
                continue;
            }
            if !in_fov(view, me.position(), o.position(), cfg.fov_half_angle) {
                continue;
            }
            let blocked = smokes.iter().any(|g| {
                g.active_at(fr.tick)
                    && point_segment_distance([g.grenade_x, g.grenade_y, g.grenade_z], me.position(), o.position())
                        <= cfg.smoke_radius
            });
            if blocked {
                continue;
            }
            out.push(Sighting {
                tick: fr.tick,
                round: fr.round_num,
                opponent: o.steam_id,
                view,
                pos: me.position(),
                opp_pos: o.position(),
            });
        }
    }
    out
}

fn finish(m: &MatchRecord, o: Open) -> Engagement {
    let mut e = o.e;
    let start = m.round(e.round_num).map(|r| r.start_tick).unwrap_or(0);
    e.t0 = m.secs_between(start, e.t0_tick);
    e.t1 = e.t1_tick.map(|t| m.secs_between(start, t));
    e.t2 = e.t2_tick.map(|t| m.secs_between(start, t));
    if let Some(t1) = e.t1_tick {
        e.rat = Some(m.secs_between(e.t0_tick, t1));
        e.raa = Some(view_angle(e.view_t0, e.view_t1.unwrap()));
    }
    if let (Some(t1), Some(t2)) = (e.t1_tick, e.t2_tick) {
        e.ajt = Some(m.secs_between(t1, t2));
        e.drt = Some(m.secs_between(e.t0_tick, t2));
        e.aja = Some(view_angle(e.view_t1.unwrap(), e.view_t2.unwrap()));
    }
    e
}

/// Split a player's match into engagements, one per (opponent, activity period).
pub fn segment_engagements(m: &MatchRecord, player: SteamId, cfg: &FeatureConfig) -> Result<Vec<Engagement>> {
    let me = find_player(m, player)?;
    let side = me.side;
    let sights = sightings(m, player, side, cfg);
    let fires: Vec<_> = m.weapon_fires.iter().filter(|f| f.player_steam_id == player).collect();
    let damages: Vec<_> = m
        .damages
        .iter()
        .filter(|d| d.attacker_steam_id == player && d.is_on_opponent())
        .collect();

    let mut events: Vec<(Tick, Ev)> = Vec::with_capacity(sights.len() + fires.len() + damages.len());
    events.extend(sights.iter().enumerate().map(|(i, s)| (s.tick, Ev::Sight(i))));
    events.extend(fires.iter().enumerate().map(|(i, f)| (f.tick, Ev::Fire(i))));
    events.extend(damages.iter().enumerate().map(|(i, d)| (d.tick, Ev::Damage(i))));
    events.sort_by_key(|&(t, e)| (t, e.rank()));

    let reset = cfg.engagement_reset_secs;
    let stale = |o: &Open, tick: Tick, round: u32| o.round != round || m.secs_between(o.last, tick) > reset;
    let round_of = |tick: Tick| m.round_at(tick).map(|r| r.round_num).unwrap_or(0);

    let mut open: BTreeMap<SteamId, Open> = BTreeMap::new();
    let mut done = Vec::new();
    for (tick, ev) in events {
        let round = match ev {
            Ev::Sight(i) => sights[i].round,
            Ev::Fire(i) => fires[i].round_num,
            Ev::Damage(i) => damages[i].round_num,
        };
        let round = if m.round(round).is_some() { round } else { round_of(tick) };
        // close everything that went quiet
        let closing: Vec<SteamId> = open.iter().filter(|(_, o)| stale(o, tick, round)).map(|(k, _)| *k).collect();
        for k in closing {
            done.push(open.remove(&k).unwrap());
        }
        match ev {
            Ev::Sight(i) => {
                let s = &sights[i];
                match open.get_mut(&s.opponent) {
                    Some(o) => o.last = tick,
                    None => {
                        open.insert(
                            s.opponent,
                            Open {
                                round,
                                last: tick,
                                e: Engagement {
                                    opponent_id: s.opponent,
                                    round_num: round,
                                    t0_tick: tick,
                                    t1_tick: None,
                                    t2_tick: None,
                                    t0: 0.0,
                                    t1: None,
                                    t2: None,
                                    rat: None,
                                    ajt: None,
                                    drt: None,
                                    raa: None,
                                    aja: None,
                                    hit_distance: None,
                                    view_t0: s.view,
                                    view_t1: None,
                                    view_t2: None,
                                    attacker_pos_t0: s.pos,
                                    attacker_pos_t1: None,
                                    attacker_pos_t2: None,
                                    victim_pos: s.opp_pos,
                                },
                            },
                        );
                    }
                }
            }
            Ev::Fire(i) => {
                let f = fires[i];
                for o in open.values_mut() {
                    o.last = tick;
                    if o.e.t1_tick.is_none() {
                        o.e.t1_tick = Some(tick);
                        o.e.view_t1 = Some((f.player_view_x, f.player_view_y));
                        o.e.attacker_pos_t1 = Some([f.player_x, f.player_y, f.player_z]);
                    }
                }
            }
            Ev::Damage(i) => {
                let d = damages[i];
                if let Some(o) = open.get_mut(&d.victim_steam_id) {
                    o.last = tick;
                    if o.e.t1_tick.is_some() && o.e.t2_tick.is_none() {
                        o.e.t2_tick = Some(tick);
                        o.e.view_t2 = Some((d.attacker_view_x, d.attacker_view_y));
                        o.e.attacker_pos_t2 = Some([d.attacker_x, d.attacker_y, d.attacker_z]);
                        o.e.victim_pos = [d.victim_x, d.victim_y, d.victim_z];
                        o.e.hit_distance = Some(d.distance);
                    }
                }
            }
        }
    }
    done.extend(open.into_values());
    let mut out: Vec<Engagement> = done.into_iter().map(|o| finish(m, o)).collect();
    out.sort_by_key(|e| (e.t0_tick, e.opponent_id));
    Ok(out)
}
