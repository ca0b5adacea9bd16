mod support;

use hawk_features::streams::StreamKind;
use hawk_features::structured::{feature_index, RATIO_FEATURES};
use hawk_features::*;
use hawk_replay::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::builder::*;
use support::oracle;

fn cfg() -> FeatureConfig {
    FeatureConfig::default()
}

fn value(m: &MatchRecord, id: SteamId, name: &str) -> (f64, bool) {
    let v = feature_vector(m, id, &cfg()).unwrap();
    (v.get(name).unwrap(), v.is_missing(name).unwrap())
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

// streams

#[test]
fn damage_stream_has_one_row_per_event_in_tick_order() {
    let mut m = base(128, 1);
    for t in [900, 300, 600] {
        m.damages.push(damage(t, A, B));
    }
    m.damages.push(damage(700, B, A));
    let s = extract_streams(&m, A, &cfg()).unwrap();
    let d = s.get(StreamKind::Damage);
    assert_eq!(d.len(), 3);
    let secs: Vec<f64> = d.rows().map(|r| r[0]).collect();
    assert_eq!(secs, vec![300.0 / 128.0, 600.0 / 128.0, 900.0 / 128.0]);
    assert!(s.get(StreamKind::OffensiveProps).is_empty());
    assert_eq!(s.streams.len(), 7);
}

#[test]
fn movement_rows_follow_the_stride() {
    let mut m = base(128, 1);
    for t in 0..256 {
        m.frames.push(sight_frame(t, (180.0, 0.0)));
    }
    let s = extract_streams(&m, A, &cfg()).unwrap();
    // two seconds at 128/16 = 8 rows per second
    assert_eq!(s.get(StreamKind::Movement).len(), 16);
}

#[test]
fn unknown_player_is_rejected() {
    let m = base(128, 1);
    assert_eq!(extract_streams(&m, SteamId(99), &cfg()), Err(FeatureError::UnknownPlayer(SteamId(99))));
    assert!(feature_vector(&m, SteamId(99), &cfg()).is_err());
}

// engagements

fn duel(rate: u32, sight: Tick, fire_at: Tick, hit_at: Tick) -> MatchRecord {
    let mut m = base(rate, 1);
    m.frames.push(sight_frame(sight, (0.0, 0.0)));
    m.weapon_fires.push(fire(fire_at, A, 30));
    m.damages.push(damage(hit_at, A, B));
    m
}

#[test]
fn engagement_durations() {
    let m = duel(100, 100, 130, 150);
    let e = segment_engagements(&m, A, &cfg()).unwrap();
    assert_eq!(e.len(), 1);
    let e = &e[0];
    assert_eq!(e.opponent_id, B);
    assert!(close(e.rat.unwrap(), 0.3, 1e-12));
    assert!(close(e.ajt.unwrap(), 0.2, 1e-12));
    assert!(close(e.drt.unwrap(), 0.5, 1e-12));
    assert!(e.t0 <= e.t1.unwrap() && e.t1.unwrap() <= e.t2.unwrap());
}

#[test]
fn reaction_angle_wraps_around() {
    let mut m = base(128, 1);
    m.frames.push(sight_frame(128, (350.0, 0.0)));
    let mut f = fire(160, A, 30);
    f.player_view_x = 10.0;
    m.weapon_fires.push(f);
    let e = segment_engagements(&m, A, &cfg()).unwrap();
    assert_eq!(e.len(), 1);
    let raa = e[0].raa.unwrap();
    assert!((raa - 20.0).abs() < 1e-9, "{raa}");
    assert!((raa - oracle::angle((350.0, 0.0), (10.0, 0.0))).abs() < 1e-9);
}

#[test]
fn quiet_period_resets_the_engagement() {
    let mut m = base(128, 1);
    m.frames.push(sight_frame(128, (0.0, 0.0)));
    m.frames.push(sight_frame(12 * 128, (0.0, 0.0)));
    assert_eq!(segment_engagements(&m, A, &cfg()).unwrap().len(), 2);
    m.frames.push(sight_frame(6 * 128, (0.0, 0.0)));
    assert_eq!(segment_engagements(&m, A, &cfg()).unwrap().len(), 1);
}

#[test]
fn smoke_and_view_block_sighting() {
    let mut m = base(128, 1);
    m.frames.push(sight_frame(128, (90.0, 0.0)));
    assert!(segment_engagements(&m, A, &cfg()).unwrap().is_empty());
    m.frames[0] = sight_frame(128, (0.0, 0.0));
    let mut g = grenade(100, D, GrenadeType::Smoke);
    g.destroy_tick = 2000;
    m.grenades.push(g);
    assert!(segment_engagements(&m, A, &cfg()).unwrap().is_empty());
    m.frames[0].players[1].is_alive = false;
    m.grenades.clear();
    assert!(segment_engagements(&m, A, &cfg()).unwrap().is_empty());
}

#[test]
fn no_engagements_without_frames() {
    let m = base(128, 2);
    assert!(segment_engagements(&m, A, &cfg()).unwrap().is_empty());
}

// aiming

#[test]
fn rat_mean_and_population_variance() {
    let mut m = base(10, 1);
    // rats 0.2 and 0.4 at 10 Hz; the second sight comes after a 10 s reset
    m.frames.push(sight_frame(10, (0.0, 0.0)));
    m.weapon_fires.push(fire(12, A, 30));
    m.frames.push(sight_frame(200, (0.0, 0.0)));
    m.weapon_fires.push(fire(204, A, 29));
    let (avg, miss) = value(&m, A, "rat-avg");
    let (var, _) = value(&m, A, "rat-var");
    assert!(!miss);
    assert!(close(avg, 0.3, 1e-12), "{avg}");
    assert!(close(var, 0.01, 1e-12), "{var}");
    // neither engagement reaches a hit
    assert_eq!(value(&m, A, "ajt-avg"), (0.0, true));
}

#[test]
fn velocity_is_distance_over_drt() {
    let m = duel(100, 100, 130, 150);
    let (v, miss) = value(&m, A, "v-avg");
    assert!(!miss);
    assert!(close(v, 600.0, 1e-12), "{v}");
    assert_eq!(value(&m, A, "v-var"), (0.0, false));
    assert_eq!(value(&m, A, "rat-var"), (0.0, false));
}

// firing

#[test]
fn inertial_shot_window() {
    let mut m = base(100, 1);
    m.kills.push(kill(1000, A, B));
    m.weapon_fires.push(fire(1005, A, 20));
    m.weapon_fires.push(fire(1030, A, 19));
    assert_eq!(value(&m, A, "isp"), (1.0, false));
    m.weapon_fires.remove(0);
    assert_eq!(value(&m, A, "isp"), (0.0, false));
    // a fire at exactly the kill tick does not count, one at +0.15 s does
    m.weapon_fires.push(fire(1000, A, 21));
    assert_eq!(value(&m, A, "isp"), (0.0, false));
    m.weapon_fires.push(fire(1015, A, 18));
    assert_eq!(value(&m, A, "isp"), (1.0, false));
}

#[test]
fn precision_ratio() {
    let mut m = base(128, 1);
    for k in 0..12 {
        m.weapon_fires.push(fire(100 + 10 * k, A, 30 - k as u32));
    }
    for k in 0..3 {
        m.damages.push(damage(100 + 10 * k, A, B));
    }
    assert_eq!(value(&m, A, "precis"), (0.25, false));
}

#[test]
fn first_hit_percentage_counts_fire_rounds() {
    let mut m = base(128, 1);
    // round 1: hit on the first fire; gap > 5 s starts round 2 (miss);
    // a magazine refill starts round 3 (hit one tick later)
    m.weapon_fires.push(fire(100, A, 30));
    m.weapon_fires.push(fire(110, A, 29));
    m.damages.push(damage(100, A, B));
    m.weapon_fires.push(fire(100 + 6 * 128, A, 28));
    m.weapon_fires.push(fire(100 + 6 * 128 + 10, A, 30));
    m.damages.push(damage(100 + 6 * 128 + 11, A, B));
    let (fhp, miss) = value(&m, A, "fhp");
    assert!(!miss);
    assert!(close(fhp, 2.0 / 3.0, 1e-15), "{fhp}");
}

#[test]
fn hit_group_variance_all_head() {
    let mut m = base(128, 1);
    for k in 0..10 {
        let mut d = damage(100 + k, A, B);
        d.hit_group = HitGroup::Head;
        m.damages.push(d);
    }
    let (hgd, miss) = value(&m, A, "hgd");
    assert!(!miss);
    // ((10 - 1)^2 + 8 (0 - 1)^2) / 10
    assert!(close(hgd, 8.9, 1e-12), "{hgd}");
    assert_eq!(value(&m, A, "chp"), (1.0, false));
}

#[test]
fn special_hits_use_distance_bands() {
    let mut m = base(128, 1);
    let mut sniper = damage(100, A, B);
    sniper.weapon_class = "Sniper".into();
    sniper.distance = 100.0;
    m.damages.push(sniper);
    let mut far = damage(200, A, B);
    far.distance = 900.0;
    m.damages.push(far);
    let mut near = damage(300, A, B);
    near.distance = 200.0;
    m.damages.push(near);
    let mut plain = damage(400, A, B);
    plain.distance = 790.0;
    m.damages.push(plain);
    assert_eq!(value(&m, A, "shr"), (0.5, false));
    let c = FeatureConfig { distance_scale: 0.5, ..cfg() };
    let v = feature_vector(&m, A, &c).unwrap();
    // at half scale only the sniper hit (now 50) stays special
    assert_eq!(v.get("shr"), Some(0.25));
}

#[test]
fn strafing_hit_percentage() {
    let mut m = base(128, 1);
    for k in 0..4 {
        let mut d = damage(100 + k, A, B);
        d.attacker_strafe = k == 0;
        m.damages.push(d);
    }
    assert_eq!(value(&m, A, "shp"), (0.25, false));
}

// elimination

#[test]
fn time_to_kill() {
    let mut m = base(10, 1);
    m.damages.push(damage(30, A, B));
    m.damages.push(damage(35, A, B));
    m.kills.push(kill(42, A, B));
    let (ttk, miss) = value(&m, A, "ttk-avg");
    assert!(!miss);
    assert!(close(ttk, 1.2, 1e-12), "{ttk}");
    // first damage more than 10 s before the kill: dropped
    let mut m = base(10, 1);
    m.damages.push(damage(30, A, B));
    m.kills.push(kill(200, A, B));
    assert_eq!(value(&m, A, "ttk-avg"), (0.0, true));
}

#[test]
fn occluder_penetration_index() {
    let mut m = base(128, 10);
    for (k, p) in [1u32, 1, 2].into_iter().enumerate() {
        let mut e = kill(100 + k as i64, A, B);
        e.is_wallbang = true;
        e.penetrated_objects = p;
        m.kills.push(e);
    }
    let mut e = kill(200, A, D);
    e.thru_smoke = true;
    m.kills.push(e);
    let (opi, miss) = value(&m, A, "opi");
    assert!(!miss);
    assert!(close(opi, 0.25, 1e-15), "{opi}");
}

#[test]
fn kills_per_round_and_first_kills() {
    let mut m = base(128, 20);
    for r in 0..10u32 {
        let start = m.rounds[r as usize].start_tick;
        let mut k = kill(start + 100, A, B);
        k.round_num = r + 1;
        k.is_first_kill = r < 4;
        k.attacker_blinded = r == 0;
        m.kills.push(k);
    }
    assert_eq!(value(&m, A, "akpr"), (0.5, false));
    assert_eq!(value(&m, A, "fkp"), (0.2, false));
    assert_eq!(value(&m, A, "bkp"), (0.1, false));
}

#[test]
fn teamkills_and_suicides_are_not_eliminations() {
    let mut m = base(128, 2);
    let mut tk = kill(100, A, C);
    tk.is_teamkill = true;
    m.kills.push(tk);
    let mut s = kill(200, A, A);
    s.is_suicide = true;
    m.kills.push(s);
    assert_eq!(value(&m, A, "akpr"), (0.0, false));
    assert_eq!(value(&m, A, "bkp"), (0.0, true));
}

#[test]
fn one_tap_percentage() {
    let mut m = base(128, 1);
    let mut d = damage(500, A, B);
    d.hit_group = HitGroup::Head;
    d.hp_damage = 140;
    d.hp_damage_taken = 100;
    m.damages.push(d);
    m.damages.push(damage(100, A, D));
    let mut awp = damage(300, A, D);
    awp.weapon_class = "Sniper".into();
    m.damages.push(awp);
    let mut k = kill(500, A, B);
    k.is_headshot = true;
    m.kills.push(k);
    assert_eq!(value(&m, A, "otp"), (0.5, false));
}

// props

#[test]
fn flash_efficiency() {
    let mut m = base(128, 1);
    m.flashes.push(flash(100, A, B, 3.0));
    m.flashes.push(flash(100, A, D, 1.0));
    m.flashes.push(flash(100, A, C, 0.5));
    m.flashes.push(flash(100, A, A, 0.5));
    let (fei, miss) = value(&m, A, "fei");
    assert!(!miss);
    assert!(close(fei, 0.6, 1e-15), "{fei}");
    assert_eq!(value(&m, B, "fei"), (0.0, true));
}

#[test]
fn props_utilization() {
    let mut m = base(128, 2);
    for k in 5..11 {
        m.players.push(PlayerRef {
            steam_id: SteamId(k),
            side: if k % 2 == 1 { Side::CT } else { Side::T },
        });
    }
    for ty in [GrenadeType::HeGrenade, GrenadeType::Smoke, GrenadeType::Flashbang, GrenadeType::Molotov, GrenadeType::Decoy] {
        m.grenades.push(grenade(100, A, ty));
    }
    assert_eq!(value(&m, A, "pui"), (0.04, false));
}

#[test]
fn no_events_gives_missing_ratios() {
    let m = base(128, 3);
    let v = feature_vector(&m, A, &cfg()).unwrap();
    assert_eq!(v.values.len(), 28);
    assert!(v.values.iter().all(|x| *x == 0.0));
    for (i, name) in FEATURE_NAMES.iter().enumerate() {
        let denominators_are_rounds = ["fkp", "opi", "akpr", "pui"].contains(name);
        assert_eq!(v.mask[i], !denominators_are_rounds, "{name}");
    }
}

// synthetic data

fn random_match(seed: u64) -> (MatchRecord, LabelSet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=6);
    let kinds = [ProfileKind::Honest, ProfileKind::Aimbot, ProfileKind::Wallhack, ProfileKind::BoostingLike];
    let profiles: Vec<CheatProfile> = (0..n)
        .map(|_| CheatProfile::new(kinds[rng.random_range(0..4)], rng.random_range(0.0..1.0)))
        .collect();
    let rounds = rng.random_range(1..=3);
    let cfg = SynthConfig {
        live_secs: 30.0,
        ..SynthConfig::default()
    };
    generate_with_config(&profiles, rounds, seed, &cfg).unwrap()
}

fn check_against_oracle(m: &MatchRecord, c: &FeatureConfig, oc: &oracle::Cfg) {
    for p in &m.players {
        let got = feature_vector(m, p.steam_id, c).unwrap();
        let want = oracle::features(m, p.steam_id, oc);
        assert_eq!(want.len(), 28);
        for (k, (w, wm)) in want.iter().enumerate() {
            let g = got.values[k];
            assert_eq!(got.mask[k], *wm, "{} mask for {} in {}", FEATURE_NAMES[k], p.steam_id, m.match_id);
            assert!(
                g == *w || (g - w).abs() <= 1e-12 * g.abs().max(w.abs()),
                "{}: {g} vs oracle {w} for {} in {}",
                FEATURE_NAMES[k],
                p.steam_id,
                m.match_id
            );
        }
    }
}

#[test]
fn features_match_brute_force_oracle_on_200_matches() {
    let c = cfg();
    let oc = oracle::Cfg::default();
    let mut engaged = 0;
    for seed in 0..200u64 {
        let (m, _) = random_match(seed);
        check_against_oracle(&m, &c, &oc);
        engaged += m
            .players
            .iter()
            .filter(|p| !feature_vector(&m, p.steam_id, &c).unwrap().mask[0])
            .count();
    }
    assert!(engaged > 100, "oracle comparison exercised only {engaged} engaged players");
}

#[test]
fn engagements_match_oracle_segmentation() {
    let oc = oracle::Cfg::default();
    for seed in 0..40u64 {
        let (m, _) = random_match(1000 + seed);
        for p in &m.players {
            let got = segment_engagements(&m, p.steam_id, &cfg()).unwrap();
            let want = oracle::engagements(&m, p.steam_id, &oc);
            assert_eq!(got.len(), want.len(), "seed {seed}");
            for (g, (o, w)) in got.iter().zip(&want) {
                assert_eq!((g.opponent_id, g.t0_tick, g.t1_tick, g.t2_tick), (*o, w.t0, w.t1, w.t2));
            }
        }
    }
}

#[test]
fn blatant_aimbot_has_more_critical_hits() {
    let mut profiles = vec![CheatProfile::honest(); 6];
    profiles[0] = CheatProfile::new(ProfileKind::Aimbot, 0.0);
    let (m, _) = generate_synthetic_match(&profiles, 8, 21).unwrap();
    let chp: Vec<f64> = m
        .players
        .iter()
        .map(|p| feature_vector(&m, p.steam_id, &cfg()).unwrap().get("chp").unwrap())
        .collect();
    for (k, c) in chp.iter().enumerate().skip(1) {
        assert!(chp[0] > *c, "aimbot chp {} vs honest player {k} chp {c}", chp[0]);
    }
}

#[test]
fn honest_fixture_vector_is_finite_and_deterministic() {
    let (m, _) = generate_synthetic_match(&vec![CheatProfile::honest(); 4], 4, 5).unwrap();
    for p in &m.players {
        let a = feature_vector(&m, p.steam_id, &cfg()).unwrap();
        let b = feature_vector(&m, p.steam_id, &cfg()).unwrap();
        assert_eq!(a, b);
        assert!(a.values.iter().all(|x| x.is_finite()));
    }
}

#[test]
fn extracted_match_round_trips_through_json() {
    let (m, _) = random_match(77);
    let out = extract_match(&m, &cfg()).unwrap();
    assert_eq!(out.players.len(), m.players.len());
    let json = serde_json::to_string(&out).unwrap();
    let back: MatchFeatures = serde_json::from_str(&json).unwrap();
    assert_eq!(back, out);
    let p = &back.players[0];
    assert_eq!(p.temporal().unwrap(), extract_streams(&m, p.steam_id, &cfg()).unwrap());
    assert_eq!(p.structured().unwrap().values.len(), 28);
}

fn scale_time(m: &MatchRecord) -> MatchRecord {
    let mut s = m.clone();
    s.tick_rate *= 2;
    for r in &mut s.rounds {
        r.start_tick *= 2;
        r.freeze_time_end_tick *= 2;
        r.end_tick *= 2;
    }
    s.damages.iter_mut().for_each(|e| e.tick *= 2);
    s.kills.iter_mut().for_each(|e| e.tick *= 2);
    s.weapon_fires.iter_mut().for_each(|e| e.tick *= 2);
    s.flashes.iter_mut().for_each(|e| e.tick *= 2);
    s.frames.iter_mut().for_each(|e| e.tick *= 2);
    for g in &mut s.grenades {
        g.throw_tick *= 2;
        g.destroy_tick *= 2;
    }
    s
}

fn strip_player(m: &MatchRecord, id: SteamId) -> MatchRecord {
    let mut s = m.clone();
    s.damages.retain(|e| e.attacker_steam_id != id && e.victim_steam_id != id);
    s.kills.retain(|e| e.attacker_steam_id != id && e.victim_steam_id != id);
    s.weapon_fires.retain(|e| e.player_steam_id != id);
    s.flashes.retain(|e| e.attacker_steam_id != id && e.player_steam_id != id);
    s.grenades.retain(|e| e.thrower_steam_id != id);
    for f in &mut s.frames {
        f.players.retain(|p| p.steam_id != id);
    }
    s.economy.retain(|e| e.steam_id != id);
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn features_stay_in_range(seed in any::<u64>()) {
        let (m, _) = random_match(seed);
        for p in &m.players {
            let v = feature_vector(&m, p.steam_id, &cfg()).unwrap();
            prop_assert!(v.values.iter().all(|x| x.is_finite()));
            for r in RATIO_FEATURES {
                let x = v.get(r).unwrap();
                prop_assert!((0.0..=1.0).contains(&x), "{} = {}", r, x);
            }
            for (i, n) in FEATURE_NAMES.iter().enumerate() {
                if n.ends_with("-var") {
                    prop_assert!(v.values[i] >= 0.0);
                }
            }
            for n in ["raa-avg", "aja-avg"] {
                let x = v.get(n).unwrap();
                prop_assert!((0.0..=180.0).contains(&x));
            }
            let fei = v.get("fei").unwrap();
            prop_assert!((-1.0..=1.0).contains(&fei));
            for e in segment_engagements(&m, p.steam_id, &cfg()).unwrap() {
                for a in [e.raa, e.aja].into_iter().flatten() {
                    prop_assert!((0.0..=180.0).contains(&a));
                }
            }
        }
    }

    #[test]
    fn doubling_the_tick_rate_changes_nothing(seed in any::<u64>()) {
        let (m, _) = random_match(seed);
        let s = scale_time(&m);
        for p in &m.players {
            let a = feature_vector(&m, p.steam_id, &cfg()).unwrap();
            let b = feature_vector(&s, p.steam_id, &cfg()).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn removing_a_players_events_never_crashes(seed in any::<u64>(), pick in 0usize..6) {
        let (m, _) = random_match(seed);
        let id = m.players[pick % m.players.len()].steam_id;
        let s = strip_player(&m, id);
        let v = feature_vector(&s, id, &cfg()).unwrap();
        prop_assert!(v.values.iter().all(|x| *x == 0.0));
        for (i, n) in FEATURE_NAMES.iter().enumerate() {
            if !["fkp", "opi", "akpr", "pui"].contains(n) {
                prop_assert!(v.mask[i], "{} not missing", n);
            }
        }
        let t = extract_streams(&s, id, &cfg()).unwrap();
        prop_assert!(t.streams.iter().all(|x| x.is_empty()));
    }
}

#[test]
fn sense_and_perf_sets_are_consistent_with_names() {
    let g = SensePerfGrouping::default();
    for n in g.structured_sense.iter().chain(&g.structured_perf) {
        assert!(feature_index(n).is_some());
    }
}
