//! Brute-force re-implementation of the structured features: every quantity is
//! recomputed by scanning the raw event lists, with no shared helpers.

use hawk_replay::*;

pub struct Cfg {
    pub fov: f64,
    pub smoke_radius: f64,
    pub reset: f64,
    pub isp: f64,
    pub gap: f64,
    pub fhp_tol: f64,
    pub scale: f64,
    pub ttk: f64,
    pub rho: f64,
}

impl Default for Cfg {
    fn default() -> Self {
        Cfg {
            fov: 45.0,
            smoke_radius: 144.0,
            reset: 10.0,
            isp: 0.15,
            gap: 5.0,
            fhp_tol: 1.0 / 128.0,
            scale: 1.0,
            ttk: 10.0,
            rho: 5.0,
        }
    }
}

fn dt(m: &MatchRecord, a: Tick, b: Tick) -> f64 {
    (b - a) as f64 / m.tick_rate as f64
}

fn unit(yaw: f64, pitch: f64) -> [f64; 3] {
    let (y, p) = (yaw.to_radians(), pitch.to_radians());
    [p.cos() * y.cos(), p.cos() * y.sin(), p.sin()]
}

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Angle via 2·atan2(|u−v|, |u+v|).
pub fn angle(a: (f64, f64), b: (f64, f64)) -> f64 {
    let u = unit(a.0, a.1);
    let v = unit(b.0, b.1);
    let d = [u[0] - v[0], u[1] - v[1], u[2] - v[2]];
    let s = [u[0] + v[0], u[1] + v[1], u[2] + v[2]];
    (2.0 * norm(d).atan2(norm(s))).to_degrees()
}

fn sees(m: &MatchRecord, fr: &MovementFrame, me: &FramePlayer, o: &FramePlayer, c: &Cfg) -> bool {
    let d = [o.x - me.x, o.y - me.y, o.z - me.z];
    let yaw = d[1].atan2(d[0]).to_degrees();
    let pitch = d[2].atan2((d[0] * d[0] + d[1] * d[1]).sqrt()).to_degrees();
    let dy = (me.view_x - yaw).to_radians();
    let yaw_gap = dy.sin().atan2(dy.cos()).to_degrees().abs();
    if yaw_gap > c.fov || (me.view_y - pitch).abs() > c.fov {
        return false;
    }
    for g in &m.grenades {
        if g.grenade_type != GrenadeType::Smoke || fr.tick < g.throw_tick || fr.tick > g.destroy_tick {
            continue;
        }
        // closest point on the sight segment, by dense parametrisation
        let p = [g.grenade_x - me.x, g.grenade_y - me.y, g.grenade_z - me.z];
        let l2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
        let t = if l2 == 0.0 { 0.0 } else { ((p[0] * d[0] + p[1] * d[1] + p[2] * d[2]) / l2).clamp(0.0, 1.0) };
        let q = [d[0] * t - p[0], d[1] * t - p[1], d[2] * t - p[2]];
        if norm(q) <= c.smoke_radius {
            return false;
        }
    }
    true
}

#[derive(Debug, Default, Clone)]
pub struct Eng {
    pub round: u32,
    pub t0: Tick,
    pub t1: Option<Tick>,
    pub t2: Option<Tick>,
    pub v0: (f64, f64),
    pub v1: Option<(f64, f64)>,
    pub v2: Option<(f64, f64)>,
    pub dist: Option<f64>,
}

/// Engagements against each opponent, processed one opponent at a time.
pub fn engagements(m: &MatchRecord, i: SteamId, c: &Cfg) -> Vec<(SteamId, Eng)> {
    let side = m.players.iter().find(|p| p.steam_id == i).unwrap().side;
    let mut out = Vec::new();
    for opp in m.players.iter().filter(|p| p.side != side) {
        // (tick, kind, round, payload view, dist)
        let mut ev: Vec<(Tick, u8, u32, (f64, f64), f64)> = Vec::new();
        for fr in &m.frames {
            let (Some(me), Some(o)) = (
                fr.players.iter().find(|p| p.steam_id == i),
                fr.players.iter().find(|p| p.steam_id == opp.steam_id),
            ) else {
                continue;
            };
            if me.is_alive && o.is_alive && o.side != side && sees(m, fr, me, o, c) {
                ev.push((fr.tick, 0, fr.round_num, (me.view_x, me.view_y), 0.0));
            }
        }
        for f in &m.weapon_fires {
            if f.player_steam_id == i {
                ev.push((f.tick, 1, f.round_num, (f.player_view_x, f.player_view_y), 0.0));
            }
        }
        for d in &m.damages {
            if d.attacker_steam_id == i && d.victim_steam_id == opp.steam_id && d.attacker_side != d.victim_side {
                ev.push((d.tick, 2, d.round_num, (d.attacker_view_x, d.attacker_view_y), d.distance));
            }
        }
        ev.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut cur: Option<(Eng, Tick)> = None;
        for (tick, kind, round, view, dist) in ev {
            if let Some((e, last)) = &cur {
                if e.round != round || dt(m, *last, tick) > c.reset {
                    out.push((opp.steam_id, e.clone()));
                    cur = None;
                }
            }
            match (kind, cur.as_mut()) {
                (0, None) => {
                    cur = Some((
                        Eng { round, t0: tick, v0: view, ..Default::default() },
                        tick,
                    ))
                }
                (0, Some((_, last))) => *last = tick,
                (1, Some((e, last))) => {
                    *last = tick;
                    if e.t1.is_none() {
                        e.t1 = Some(tick);
                        e.v1 = Some(view);
                    }
                }
                (2, Some((e, last))) => {
                    *last = tick;
                    if e.t1.is_some() && e.t2.is_none() {
                        e.t2 = Some(tick);
                        e.v2 = Some(view);
                        e.dist = Some(dist);
                    }
                }
                _ => {}
            }
        }
        if let Some((e, _)) = cur {
            out.push((opp.steam_id, e));
        }
    }
    out.sort_by_key(|(o, e)| (e.t0, *o));
    out
}

fn stats(xs: &[f64]) -> [(f64, bool); 2] {
    if xs.is_empty() {
        return [(0.0, true), (0.0, true)];
    }
    let mut s = 0.0;
    for x in xs {
        s += x;
    }
    let mean = s / xs.len() as f64;
    let mut q = 0.0;
    for x in xs {
        q += (x - mean) * (x - mean);
    }
    [(mean, false), (q / xs.len() as f64, false)]
}

fn frac(n: f64, d: f64) -> (f64, bool) {
    if d == 0.0 {
        (0.0, true)
    } else {
        (n / d, false)
    }
}

fn sniper(class: &str) -> bool {
    class.to_ascii_lowercase() == "sniper"
}

pub fn features(m: &MatchRecord, i: SteamId, c: &Cfg) -> Vec<(f64, bool)> {
    let mut out = Vec::new();
    let engs = engagements(m, i, c);
    let mut rat = vec![];
    let mut ajt = vec![];
    let mut drt = vec![];
    let mut v = vec![];
    let mut raa = vec![];
    let mut aja = vec![];
    for (_, e) in &engs {
        if let Some(t1) = e.t1 {
            rat.push(dt(m, e.t0, t1));
            raa.push(angle(e.v0, e.v1.unwrap()));
            if let Some(t2) = e.t2 {
                ajt.push(dt(m, t1, t2));
                let d = dt(m, e.t0, t2);
                drt.push(d);
                if d > 0.0 {
                    v.push(e.dist.unwrap() / d);
                }
                aja.push(angle(e.v1.unwrap(), e.v2.unwrap()));
            }
        }
    }
    for xs in [&rat, &ajt, &drt, &v, &raa, &aja] {
        out.extend(stats(xs));
    }

    let opp_dmg = |d: &&DamageEvent| d.attacker_steam_id == i && d.attacker_side != d.victim_side && d.victim_steam_id != i;
    let opp_kill = |k: &&KillEvent| {
        k.attacker_steam_id == i && !k.is_suicide && !k.is_teamkill && k.attacker_side != k.victim_side && k.victim_steam_id != i
    };
    let dmgs: Vec<&DamageEvent> = m.damages.iter().filter(opp_dmg).collect();
    let kills: Vec<&KillEvent> = m.kills.iter().filter(opp_kill).collect();
    let fires: Vec<&WeaponFireEvent> = m.weapon_fires.iter().filter(|f| f.player_steam_id == i).collect();
    let nd = dmgs.len() as f64;
    let nk = kills.len() as f64;
    let rounds = m.rounds.len() as f64;

    // isp
    let mut is = 0.0;
    for k in &kills {
        if fires.iter().any(|f| f.tick > k.tick && dt(m, k.tick, f.tick) <= c.isp) {
            is += 1.0;
        }
    }
    out.push(frac(is, nk));

    // fhp: walk fires in tick order and compare each with its predecessor
    let mut sorted = fires.clone();
    sorted.sort_by_key(|f| f.tick);
    let (mut frs, mut hit) = (0.0, 0.0);
    for k in 0..sorted.len() {
        let new_round = k == 0
            || sorted[k].round_num != sorted[k - 1].round_num
            || sorted[k].ammo_in_magazine > sorted[k - 1].ammo_in_magazine
            || dt(m, sorted[k - 1].tick, sorted[k].tick) > c.gap;
        if new_round {
            frs += 1.0;
            if dmgs.iter().any(|d| dt(m, sorted[k].tick, d.tick).abs() <= c.fhp_tol) {
                hit += 1.0;
            }
        }
    }
    out.push(frac(hit, frs));

    let p = frac(nd, fires.len() as f64);
    out.push((p.0.min(1.0), p.1));
    out.push(frac(dmgs.iter().filter(|d| d.attacker_strafe).count() as f64, nd));

    // hgd
    if dmgs.is_empty() {
        out.push((0.0, true));
    } else {
        let mut counts = [0.0; 9];
        for d in &dmgs {
            counts[HitGroup::ALL.iter().position(|g| *g == d.hit_group).unwrap()] += 1.0;
        }
        let mut total = 0.0;
        for h in counts {
            total += h;
        }
        let mean = total / nd;
        let mut ss = 0.0;
        for h in counts {
            ss += (h - mean) * (h - mean);
        }
        out.push((ss / nd, false));
    }

    // shr
    let mut special = 0.0;
    for d in &dmgs {
        let x = d.distance * c.scale;
        let head = d.hit_group == HitGroup::Head;
        if sniper(&d.weapon_class) {
            if (50.0..=150.0).contains(&x) {
                special += 1.0;
            }
            if head && (40.0..=170.0).contains(&x) {
                special += 1.0;
            }
        } else {
            if x >= 800.0 {
                special += 1.0;
            }
            if head && x >= 700.0 {
                special += 1.0;
            }
        }
    }
    let s = frac(special, nd);
    out.push((s.0.min(1.0), s.1));

    // ttk in kill order
    let mut ks = kills.clone();
    ks.sort_by_key(|k| k.tick);
    let mut ttk = vec![];
    for k in &ks {
        let mut best: Option<f64> = None;
        for d in &dmgs {
            if d.victim_steam_id == k.victim_steam_id && d.round_num == k.round_num && d.tick <= k.tick {
                let x = dt(m, d.tick, k.tick);
                if x <= c.ttk && best.is_none_or(|b| x > b) {
                    best = Some(x);
                }
            }
        }
        if let Some(b) = best {
            ttk.push(b);
        }
    }
    out.extend(stats(&ttk));

    let f = frac(kills.iter().filter(|k| k.is_first_kill).count() as f64, rounds);
    out.push((f.0.min(1.0), f.1));

    let mut one = 0.0;
    for k in &kills {
        if k.is_headshot
            && !sniper(&k.weapon_class)
            && dmgs.iter().any(|d| {
                d.victim_steam_id == k.victim_steam_id && d.tick == k.tick && !sniper(&d.weapon_class) && d.hp_damage >= 100
            })
        {
            one += 1.0;
        }
    }
    let o = frac(one, dmgs.iter().filter(|d| !sniper(&d.weapon_class)).count() as f64);
    out.push((o.0.min(1.0), o.1));

    let mut w = 0.0;
    for k in &kills {
        w += match k.penetrated_objects {
            0 => 0.0,
            1 => 0.5,
            2 => 1.0,
            _ => 2.0,
        };
        if k.thru_smoke {
            w += 0.5;
        }
    }
    out.push(frac(w, rounds));
    out.push(frac(kills.iter().filter(|k| k.attacker_blinded).count() as f64, nk));
    let all = m.damages.iter().filter(|d| d.attacker_steam_id == i).count() as f64;
    out.push(frac(dmgs.iter().filter(|d| d.hit_group == HitGroup::Head).count() as f64, all));
    out.push(frac(nk, rounds));

    let (mut good, mut bad) = (0.0, 0.0);
    for f in m.flashes.iter().filter(|f| f.attacker_steam_id == i) {
        if f.player_steam_id != i && f.player_side != f.attacker_side {
            good += f.flash_duration;
        } else {
            bad += f.flash_duration;
        }
    }
    out.push(frac(good - bad, good + bad));
    let props = m
        .grenades
        .iter()
        .filter(|g| g.thrower_steam_id == i && g.grenade_type != GrenadeType::Decoy)
        .count() as f64;
    out.push(frac(props, m.players.len() as f64 * rounds * c.rho));
    out
}
