use hawk_replay::io::{load_dataset, write_dataset};
use hawk_replay::*;
use proptest::prelude::*;

const MINIMAL: &str = include_str!("fixtures/minimal.json");

fn mutate(f: impl FnOnce(&mut serde_json::Value)) -> Vec<u8> {
    let mut v: serde_json::Value = serde_json::from_str(MINIMAL).unwrap();
    f(&mut v);
    serde_json::to_vec(&v).unwrap()
}

#[test]
fn minimal_fixture_parses() {
    let m = parse_match_json(MINIMAL.as_bytes()).unwrap();
    assert_eq!(m.rounds.len(), 1);
    assert_eq!(m.players.len(), 2);
    assert_eq!(m.damages[0].hit_group, HitGroup::Chest);
    let again = parse_match_json(&match_to_json(&m)).unwrap();
    assert_eq!(m, again);
}

#[test]
fn yaw_365_normalizes_to_5() {
    let m = parse_match_json(MINIMAL.as_bytes()).unwrap();
    assert_eq!(m.damages[0].attacker_view_x, 5.0);
}

#[test]
fn tick_beyond_last_round_is_consistency_error() {
    let bytes = mutate(|v| v["damages"][0]["tick"] = 7000.into());
    match parse_match_json(&bytes) {
        Err(ReplayError::Consistency { path, .. }) => assert_eq!(path, "damages[0].tick"),
        other => panic!("expected consistency error, got {other:?}"),
    }
}

#[test]
fn unknown_steam_id_names_path() {
    let bytes = mutate(|v| v["damages"][0]["victimSteamID"] = 5u64.into());
    match parse_match_json(&bytes) {
        Err(ReplayError::Consistency { path, .. }) => assert_eq!(path, "damages[0].victimSteamID"),
        other => panic!("expected consistency error, got {other:?}"),
    }
}

#[test]
fn missing_field_is_schema_error_with_path() {
    let bytes = mutate(|v| {
        v["damages"][0].as_object_mut().unwrap().remove("hpDamage");
    });
    match parse_match_json(&bytes) {
        Err(ReplayError::Schema { path, message }) => {
            assert_eq!(path, "damages[0]");
            assert!(message.contains("hpDamage"), "{message}");
        }
        other => panic!("expected schema error, got {other:?}"),
    }
    let bytes = mutate(|v| v["rounds"][0]["endTick"] = "late".into());
    match parse_match_json(&bytes) {
        Err(ReplayError::Schema { path, .. }) => assert_eq!(path, "rounds[0].endTick"),
        other => panic!("expected schema error, got {other:?}"),
    }
}

#[test]
fn other_invariants_are_enforced() {
    let cases: Vec<(Vec<u8>, &str)> = vec![
        (mutate(|v| v["damages"][0]["hpDamageTaken"] = 31.into()), "damages[0].hpDamageTaken"),
        (mutate(|v| v["tickRate"] = 0.into()), "tickRate"),
        (mutate(|v| v["rounds"][0]["roundNum"] = 2.into()), "rounds[0].roundNum"),
        (mutate(|v| v["rounds"][0]["freezeTimeEndTick"] = 7000.into()), "rounds[0]"),
        (mutate(|v| v["economy"][0]["cash"] = (-5).into()), "economy[0].cash"),
    ];
    for (bytes, want) in cases {
        match parse_match_json(&bytes) {
            Err(ReplayError::Consistency { path, .. }) => assert_eq!(path, want),
            other => panic!("{want}: expected consistency error, got {other:?}"),
        }
    }
}

#[test]
fn tick_rate_defaults_to_128() {
    let bytes = mutate(|v| {
        v.as_object_mut().unwrap().remove("tickRate");
    });
    assert_eq!(parse_match_json(&bytes).unwrap().tick_rate, 128);
}

#[test]
fn labels_require_consistent_cheat_type() {
    let ok = br#"{"matchId":"m","labels":[{"steamId":1,"cheater":true,"cheatType":"aimbot"}]}"#;
    assert!(parse_labels_json(ok).is_ok());
    let bad = br#"{"matchId":"m","labels":[{"steamId":1,"cheater":true,"cheatType":"none"}]}"#;
    assert!(parse_labels_json(bad).is_err());
}

fn profiles(kinds: &[ProfileKind]) -> Vec<CheatProfile> {
    kinds.iter().map(|&k| CheatProfile::new(k, 0.0)).collect()
}

#[test]
fn generation_is_deterministic() {
    let p = vec![CheatProfile::honest(); 10];
    let (a, la) = generate_synthetic_match(&p, 5, 7).unwrap();
    let (b, lb) = generate_synthetic_match(&p, 5, 7).unwrap();
    assert_eq!(match_to_json(&a), match_to_json(&b));
    assert_eq!(la, lb);
    let (c, _) = generate_synthetic_match(&p, 5, 8).unwrap();
    assert_ne!(match_to_json(&a), match_to_json(&c));
}

#[test]
fn aimbot_reacts_faster_than_honest() {
    // delay from the first frame facing the opponent to the first shot of each burst
    let kinds = [
        ProfileKind::Aimbot,
        ProfileKind::Honest,
        ProfileKind::Honest,
        ProfileKind::Honest,
        ProfileKind::Honest,
        ProfileKind::Honest,
    ];
    let (m, labels) = generate_synthetic_match(&profiles(&kinds), 12, 21).unwrap();
    let cheater = labels.labels.iter().find(|l| l.cheater).unwrap().steam_id;
    let reaction = |id: SteamId| -> f64 {
        // a burst starts when a fire is more than 1 s after the previous one
        let mut prev: Option<i64> = None;
        let mut gaps = Vec::new();
        for f in m.weapon_fires.iter().filter(|f| f.player_steam_id == id) {
            if prev.is_none_or(|p| f.tick - p > 128) {
                // the duel script aligns the opponent's appearance with a frame
                let frame = m
                    .frames
                    .iter()
                    .filter(|fr| fr.tick <= f.tick)
                    .rev()
                    .take_while(|fr| {
                        fr.player(id).is_some_and(|p| p.view_y.abs() < 45.0)
                    })
                    .last()
                    .map(|fr| fr.tick)
                    .unwrap_or(f.tick);
                gaps.push((f.tick - frame) as f64 / m.tick_rate as f64);
            }
            prev = Some(f.tick);
        }
        gaps.iter().sum::<f64>() / gaps.len().max(1) as f64
    };
    let honest: Vec<f64> = labels.labels.iter().filter(|l| !l.cheater).map(|l| reaction(l.steam_id)).collect();
    let honest_mean = honest.iter().sum::<f64>() / honest.len() as f64;
    assert!(reaction(cheater) < honest_mean, "{} vs {}", reaction(cheater), honest_mean);
}

fn opi(m: &MatchRecord, id: SteamId) -> f64 {
    let mut s = 0.0;
    for k in m.kills.iter().filter(|k| k.attacker_steam_id == id && k.is_on_opponent()) {
        s += match k.penetrated_objects {
            0 => 0.0,
            1 => 0.5,
            2 => 1.0,
            _ => 2.0,
        };
        if k.thru_smoke {
            s += 0.5;
        }
    }
    s / m.rounds.len() as f64
}

#[test]
fn blatant_wallhack_has_higher_opi() {
    let kinds = [
        ProfileKind::Wallhack,
        ProfileKind::Honest,
        ProfileKind::Honest,
        ProfileKind::Honest,
        ProfileKind::Honest,
        ProfileKind::Honest,
    ];
    let (m, labels) = generate_synthetic_match(&profiles(&kinds), 12, 4).unwrap();
    let cheater = labels.labels.iter().find(|l| l.cheater).unwrap().steam_id;
    let best_honest = labels
        .labels
        .iter()
        .filter(|l| !l.cheater)
        .map(|l| opi(&m, l.steam_id))
        .fold(0.0, f64::max);
    assert!(opi(&m, cheater) > best_honest);
}

#[test]
fn labels_follow_profiles() {
    let kinds = [ProfileKind::Aimbot, ProfileKind::BoostingLike, ProfileKind::Wallhack, ProfileKind::Honest];
    let (_, labels) = generate_synthetic_match(&profiles(&kinds), 1, 3).unwrap();
    let types: Vec<CheatType> = labels.labels.iter().map(|l| l.cheat_type).collect();
    assert_eq!(types, vec![CheatType::Aimbot, CheatType::None, CheatType::Wallhack, CheatType::None]);
    assert!(labels.labels.iter().all(|l| l.cheater == (l.cheat_type != CheatType::None)));
}

#[test]
fn player_count_bounds() {
    assert!(generate_synthetic_match(&vec![CheatProfile::honest(); 11], 1, 1).is_err());
    assert!(generate_synthetic_match(&[CheatProfile::honest()], 1, 1).is_err());
    assert!(generate_synthetic_match(&vec![CheatProfile::honest(); 2], 1, 1).is_ok());
}

#[test]
fn dataset_directory_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let spec = CorpusSpec { matches: 3, rounds: 2, ..Default::default() };
    let data = generate_corpus(&spec, 5).unwrap();
    write_dataset(dir.path(), &data).unwrap();
    let mut back = load_dataset(dir.path()).unwrap();
    back.sort_by(|a, b| a.0.match_id.cmp(&b.0.match_id));
    let mut want = data.clone();
    want.sort_by(|a, b| a.0.match_id.cmp(&b.0.match_id));
    assert_eq!(back, want);
}

#[test]
fn split_partitions_matches() {
    let spec = CorpusSpec { matches: 10, rounds: 1, ..Default::default() };
    let data = generate_corpus(&spec, 2).unwrap();
    let ids: Vec<String> = data.iter().map(|(m, _)| m.match_id.clone()).collect();
    let s = split_dataset(data, SplitRatios::new(0.6, 0.2, 0.2), true, 0).unwrap();
    assert_eq!((s.train.len(), s.validation.len(), s.test.len()), (6, 2, 2));
    let mut all: Vec<String> = s.train.iter().chain(&s.validation).chain(&s.test).map(|(m, _)| m.match_id.clone()).collect();
    all.sort();
    let mut want = ids;
    want.sort();
    assert_eq!(all, want);
    let last_train = s.train.iter().map(|(m, _)| m.date_utc).max().unwrap();
    assert!(s.validation.iter().all(|(m, _)| m.date_utc >= last_train));
}

fn check_invariants(m: &MatchRecord) {
    hawk_replay::parse::validate(m).unwrap();
    let views = m
        .damages
        .iter()
        .flat_map(|d| [(d.attacker_view_x, d.attacker_view_y), (d.victim_view_x, d.victim_view_y)])
        .chain(m.kills.iter().map(|k| (k.attacker_view_x, k.attacker_view_y)))
        .chain(m.weapon_fires.iter().map(|f| (f.player_view_x, f.player_view_y)))
        .chain(m.frames.iter().flat_map(|f| f.players.iter().map(|p| (p.view_x, p.view_y))));
    for (x, y) in views {
        assert!((0.0..360.0).contains(&x), "yaw {x}");
        assert!((-90.0..=90.0).contains(&y), "pitch {y}");
    }
    for fr in &m.frames {
        for p in &fr.players {
            if !p.is_alive {
                assert_eq!(p.isolation_degree, 0.0);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn generated_matches_round_trip_and_hold_invariants(
        seed in any::<u64>(),
        n in 2usize..=10,
        rounds in 1u32..4,
        cheat in 0usize..3,
        soph in 0.0f64..=1.0,
    ) {
        let mut p = vec![CheatProfile::honest(); n];
        p[0] = CheatProfile::new([ProfileKind::Aimbot, ProfileKind::Wallhack, ProfileKind::BoostingLike][cheat], soph);
        let (m, l) = generate_synthetic_match(&p, rounds, seed).unwrap();
        check_invariants(&m);
        let back = parse_match_json(&match_to_json(&m)).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(parse_labels_json(&labels_to_json(&l)).unwrap(), l);
    }

    #[test]
    fn splits_partition_any_input(n in 0usize..60, seed in any::<u64>(), by_date in any::<bool>()) {
        let dates: Vec<_> = (0..n)
            .map(|i| chrono::DateTime::from_timestamp(((i * 37) % 11) as i64 * 3600, 0).unwrap())
            .collect();
        let s = split_indices(&dates, SplitRatios::new(0.7, 0.15, 0.15), by_date, seed).unwrap();
        let mut all: Vec<usize> = s.train.iter().chain(&s.validation).chain(&s.test).copied().collect();
        all.sort();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
    }
}
