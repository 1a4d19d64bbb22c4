use std::collections::BTreeMap;

use hothand::{
    build_sequences, read_events, segment_bounds, validate, write_events, Dataset, LoadMode,
    SequenceFilter, ShotEvent,
};
use proptest::prelude::*;

fn arb_event() -> impl Strategy<Value = ShotEvent> {
    (
        2010i32..2020,
        0u8..4,
        0u8..5,
        any::<bool>(),
        0u32..2_880_000,
        any::<bool>(),
        0u32..400,
    )
        .prop_map(|(season, g, p, is_home, t_ms, made, d)| ShotEvent {
            season,
            game_id: format!("g{g}"),
            player_id: format!("p{p}"),
            is_home,
            t: t_ms as f64 / 1000.0,
            made,
            distance_ft: d as f64 / 10.0,
        })
}

fn arb_dataset() -> impl Strategy<Value = Dataset> {
    prop::collection::vec(arb_event(), 1..80).prop_map(|mut events| {
        let mut seen = std::collections::HashSet::new();
        events.retain(|e| seen.insert((e.game_id.clone(), e.player_id.clone(), e.t.to_bits())));
        Dataset::new(events, Vec::new())
    })
}

fn arb_filter() -> impl Strategy<Value = SequenceFilter> {
    (
        prop::option::of(0u32..30),
        0u8..3,
        prop::option::of(1u32..600),
    )
        .prop_map(|(d, venue, gap)| SequenceFilter {
            min_distance_ft: d.map(f64::from),
            home_only: venue == 1,
            away_only: venue == 2,
            seasons: None,
            max_gap_s: gap.map(f64::from),
        })
}

proptest! {
    #[test]
    fn csv_round_trip_is_lossless(ds in arb_dataset()) {
        let mut bytes = Vec::new();
        write_events(&ds, &mut bytes).unwrap();
        let reloaded = read_events(bytes.as_slice(), LoadMode::Strict).unwrap();
        prop_assert!(reloaded.skipped.is_empty());
        prop_assert_eq!(&reloaded.dataset.events, &ds.events);
        prop_assert!(validate(&reloaded.dataset).is_clean());

        let mut again = Vec::new();
        write_events(&reloaded.dataset, &mut again).unwrap();
        prop_assert_eq!(bytes, again);
    }

    #[test]
    fn sequences_partition_the_filtered_shots(ds in arb_dataset(), filter in arb_filter()) {
        let seqs = build_sequences(&ds, &filter).unwrap();

        let mut expected: BTreeMap<(String, String), Vec<(u64, bool)>> = BTreeMap::new();
        for e in &ds.events {
            let venue_ok = !(filter.home_only && !e.is_home) && !(filter.away_only && e.is_home);
            let dist_ok = filter.min_distance_ft.map_or(true, |d| e.distance_ft > d);
            if venue_ok && dist_ok {
                expected
                    .entry((e.player_id.clone(), e.game_id.clone()))
                    .or_default()
                    .push((e.t.to_bits(), e.made));
            }
        }
        let mut got: BTreeMap<(String, String), Vec<(u64, bool)>> = BTreeMap::new();
        for s in &seqs {
            prop_assert_eq!(s.outcomes.len(), s.times.len());
            prop_assert!(!s.is_empty());
            for w in s.times.windows(2) {
                prop_assert!(w[0] < w[1]);
                if let Some(g) = filter.max_gap_s {
                    prop_assert!(w[1] - w[0] <= g);
                }
            }
            let entry = got.entry((s.player_id.clone(), s.game_id.clone())).or_default();
            entry.extend(s.times.iter().zip(&s.outcomes).map(|(t, &m)| (t.to_bits(), m)));
        }
        for v in expected.values_mut() {
            v.sort();
        }
        for v in got.values_mut() {
            v.sort();
        }
        prop_assert_eq!(got, expected);

        // canonical order
        let keys: Vec<(String, String, u64)> = seqs
            .iter()
            .map(|s| (s.player_id.clone(), s.game_id.clone(), s.times[0].to_bits()))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        prop_assert_eq!(keys, sorted);
    }

    #[test]
    fn segmentation_is_idempotent(
        gaps in prop::collection::vec(0.001f64..400.0, 0..40),
        max_gap in 1.0f64..300.0,
    ) {
        let times: Vec<f64> = gaps
            .iter()
            .scan(0.0, |t, g| {
                *t += g;
                Some(*t)
            })
            .collect();
        for range in segment_bounds(&times, Some(max_gap)) {
            let part = &times[range];
            prop_assert_eq!(segment_bounds(part, Some(max_gap)), std::iter::once(0..part.len()).collect::<Vec<_>>());
        }
        let identity: Vec<_> = if times.is_empty() { vec![] } else { std::iter::once(0..times.len()).collect() };
        prop_assert_eq!(segment_bounds(&times, Some(f64::INFINITY)), identity.clone());
        prop_assert_eq!(segment_bounds(&times, None), identity);
    }

    #[test]
    fn loader_is_deterministic(ds in arb_dataset()) {
        let mut bytes = Vec::new();
        write_events(&ds, &mut bytes).unwrap();
        let a = read_events(bytes.as_slice(), LoadMode::Strict).unwrap();
        let b = read_events(bytes.as_slice(), LoadMode::Strict).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn loader_never_panics(bytes in prop::collection::vec(any::<u8>(), 0..400)) {
        let mut input = b"season,game_id,player_id,is_home,t,made,distance_ft\n".to_vec();
        input.extend(bytes);
        for mode in [LoadMode::Strict, LoadMode::Lenient] {
            if let Ok(loaded) = read_events(input.as_slice(), mode) {
                prop_assert!(validate(&loaded.dataset).is_clean());
            }
        }
    }
}

#[test]
fn file_round_trip_records_provenance() {
    let ds = Dataset::new(
        vec![ShotEvent {
            season: 2015,
            game_id: "0021500001".into(),
            player_id: "curryst01".into(),
            is_home: true,
            t: 12.5,
            made: true,
            distance_ft: 26.0,
        }],
        Vec::new(),
    );
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("shots.csv");
    write_events(&ds, std::fs::File::create(&path).unwrap()).unwrap();
    let loaded = hothand::load_events(&path, LoadMode::Strict).unwrap();
    assert_eq!(loaded.events, ds.events);
    assert_eq!(loaded.provenance, vec![path]);
}
