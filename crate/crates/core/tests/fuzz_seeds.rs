//! Replays the checked-in fuzz seeds through the fuzz targets' invariants so they are
//! exercised on stable toolchains too.

use std::fs;
use std::path::PathBuf;

use hothand::correlogram::MAX_LAG;
use hothand::{parse_lags, read_events, validate, write_events, LoadMode};

fn seeds(target: &str) -> Vec<(PathBuf, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| {
            let path = entry.unwrap().path();
            let bytes = fs::read(&path).unwrap();
            (path, bytes)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn parse_events_seeds() {
    for (path, data) in seeds("parse_events") {
        let lenient = read_events(data.as_slice(), LoadMode::Lenient);
        if let Ok(strict) = read_events(data.as_slice(), LoadMode::Strict) {
            let lenient = lenient.unwrap();
            assert!(lenient.skipped.is_empty(), "{}", path.display());
            assert_eq!(strict.dataset.events, lenient.dataset.events);
            let _ = validate(&strict.dataset);
        }
    }
}

#[test]
fn event_roundtrip_seeds() {
    let mut accepted = 0;
    for (path, data) in seeds("event_roundtrip") {
        let Ok(first) = read_events(data.as_slice(), LoadMode::Lenient) else {
            continue;
        };
        accepted += 1;
        let mut buf = Vec::new();
        write_events(&first.dataset, &mut buf).unwrap();
        let second = read_events(buf.as_slice(), LoadMode::Strict).unwrap();
        assert_eq!(
            first.dataset.events,
            second.dataset.events,
            "{}",
            path.display()
        );
    }
    assert!(accepted >= 2);
}

#[test]
fn parse_lags_seeds() {
    for (_, data) in seeds("parse_lags") {
        if let Ok(lags) = parse_lags(&String::from_utf8_lossy(&data)) {
            assert!(!lags.is_empty());
            assert!(lags.windows(2).all(|w| w[0] < w[1]));
            assert!(lags.iter().all(|&k| k <= MAX_LAG));
        }
    }
}
