//! Canonical shot-event model and the CSV format it is exchanged in.
//!
//! The file holds field-goal attempts only, one per row, under the exact header
//! [`CSV_HEADER`]. Time is elapsed game seconds from tip-off, monotone across quarters
//! and overtime; converting quarter clocks is the producer's job.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "season,game_id,player_id,is_home,t,made,distance_ft";

const COLUMNS: [&str; 7] = [
    "season",
    "game_id",
    "player_id",
    "is_home",
    "t",
    "made",
    "distance_ft",
];

/// One field-goal attempt.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotEvent {
    /// Season label by starting year: 2014 is the 2014-15 season.
    pub season: i32,
    pub game_id: String,
    pub player_id: String,
    /// Whether the shooter's team is the home side.
    pub is_home: bool,
    /// Elapsed game seconds since tip-off.
    pub t: f64,
    pub made: bool,
    pub distance_ft: f64,
}

/// A loaded collection of shot events, sorted by `(game_id, player_id, t)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub events: Vec<ShotEvent>,
    pub provenance: Vec<PathBuf>,
}

impl Dataset {
    /// Builds a dataset, putting the events into canonical order.
    pub fn new(mut events: Vec<ShotEvent>, provenance: Vec<PathBuf>) -> Self {
        events.sort_by(|a, b| {
            a.game_id
                .cmp(&b.game_id)
                .then_with(|| a.player_id.cmp(&b.player_id))
                .then_with(|| a.t.total_cmp(&b.t))
        });
        Dataset { events, provenance }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Distinct season labels, ascending.
    pub fn seasons(&self) -> Vec<i32> {
        let mut seasons: Vec<i32> = self.events.iter().map(|e| e.season).collect();
        seasons.sort_unstable();
        seasons.dedup();
        seasons
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadMode {
    /// Any malformed or duplicate row aborts the load.
    Strict,
    /// Malformed rows are skipped and reported; of duplicate rows the first is kept.
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedRow {
    pub line: u64,
    pub reason: String,
}

impl fmt::Display for SkippedRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.reason)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub dataset: Dataset,
    pub skipped: Vec<SkippedRow>,
}

/// Loads a shot-event file. In lenient mode each skipped row is reported on stderr.
pub fn load_events(path: impl AsRef<Path>, mode: LoadMode) -> Result<Dataset> {
    let loaded = load_events_with_report(path, mode)?;
    for skip in &loaded.skipped {
        eprintln!("skipped {skip}");
    }
    Ok(loaded.dataset)
}

/// Like [`load_events`] but hands the skipped rows back instead of printing them.
pub fn load_events_with_report(path: impl AsRef<Path>, mode: LoadMode) -> Result<Loaded> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::FileNotReadable {
        path: path.to_path_buf(),
        source,
    })?;
    let mut loaded = read_events(BufReader::new(file), mode).map_err(|e| match e {
        Error::Io(source) => Error::FileNotReadable {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    })?;
    loaded.dataset.provenance.push(path.to_path_buf());
    Ok(loaded)
}

/// Parses shot events from any byte source. This is the entry point for untrusted input.
pub fn read_events<R: Read>(reader: R, mode: LoadMode) -> Result<Loaded> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);

    let mut record = csv::ByteRecord::new();
    if !read_record(&mut rdr, &mut record)? {
        return Err(Error::SchemaMismatch {
            expected: CSV_HEADER.to_string(),
            found: String::new(),
        });
    }
    check_header(&record)?;

    let mut events = Vec::new();
    let mut skipped = Vec::new();
    let mut seen: HashSet<(String, String, u64)> = HashSet::new();

    while read_record(&mut rdr, &mut record)? {
        let line = record.position().map_or(0, |p| p.line());
        let parsed = parse_row(&record).and_then(|event| {
            let key = (
                event.game_id.clone(),
                event.player_id.clone(),
                event.t.to_bits(),
            );
            if seen.insert(key) {
                Ok(event)
            } else {
                Err(format!(
                    "duplicate shot for player {} in game {} at t = {}",
                    event.player_id, event.game_id, event.t
                ))
            }
        });
        match (parsed, mode) {
            (Ok(event), _) => events.push(event),
            (Err(reason), LoadMode::Strict) => return Err(Error::RowParseError { line, reason }),
            (Err(reason), LoadMode::Lenient) => skipped.push(SkippedRow { line, reason }),
        }
    }

    if events.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(Loaded {
        dataset: Dataset::new(events, Vec::new()),
        skipped,
    })
}

fn read_record<R: Read>(rdr: &mut csv::Reader<R>, record: &mut csv::ByteRecord) -> Result<bool> {
    rdr.read_byte_record(record)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            kind => Error::Io(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!("{kind:?}"),
            )),
        })
}

fn check_header(record: &csv::ByteRecord) -> Result<()> {
    let found: Vec<String> = record
        .iter()
        .map(|f| String::from_utf8_lossy(f).into_owned())
        .collect();
    let mut matches = found.len() == COLUMNS.len();
    for (i, (got, want)) in found.iter().zip(COLUMNS).enumerate() {
        let got = if i == 0 {
            got.trim_start_matches('\u{feff}')
        } else {
            got.as_str()
        };
        matches &= got == want;
    }
    if matches {
        Ok(())
    } else {
        Err(Error::SchemaMismatch {
            expected: CSV_HEADER.to_string(),
            found: found.join(","),
        })
    }
}

fn parse_row(record: &csv::ByteRecord) -> std::result::Result<ShotEvent, String> {
    if record.len() != COLUMNS.len() {
        return Err(format!(
            "expected {} fields, found {}",
            COLUMNS.len(),
            record.len()
        ));
    }
    let mut fields = [""; 7];
    for (i, raw) in record.iter().enumerate() {
        fields[i] =
            std::str::from_utf8(raw).map_err(|_| format!("{} is not valid UTF-8", COLUMNS[i]))?;
    }
    let [season, game_id, player_id, is_home, t, made, distance_ft] = fields;

    let season = season
        .parse::<i32>()
        .map_err(|_| format!("season: `{season}` is not an integer"))?;
    if game_id.is_empty() {
        return Err("game_id is empty".to_string());
    }
    if player_id.is_empty() {
        return Err("player_id is empty".to_string());
    }
    Ok(ShotEvent {
        season,
        game_id: game_id.to_string(),
        player_id: player_id.to_string(),
        is_home: parse_flag("is_home", is_home)?,
        t: parse_non_negative("t", t)?,
        made: parse_flag("made", made)?,
        distance_ft: parse_non_negative("distance_ft", distance_ft)?,
    })
}

fn parse_flag(column: &str, raw: &str) -> std::result::Result<bool, String> {
    match raw {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(format!("{column}: `{raw}` is not 0 or 1")),
    }
}

fn parse_non_negative(column: &str, raw: &str) -> std::result::Result<f64, String> {
    let value: f64 = raw
        .parse()
        .map_err(|_| format!("{column}: `{raw}` is not a decimal number"))?;
    if !value.is_finite() || value < 0.0 {
        return Err(format!("{column}: `{raw}` must be finite and non-negative"));
    }
    // folds -0 into +0
    Ok(value + 0.0)
}

/// Writes the dataset in the canonical CSV format. Numbers use the shortest
/// representation that parses back to the same `f64`, so a reload is lossless.
pub fn write_events<W: Write>(ds: &Dataset, writer: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(writer);
    wtr.write_record(COLUMNS)?;
    for e in &ds.events {
        wtr.write_record([
            e.season.to_string(),
            e.game_id.clone(),
            e.player_id.clone(),
            u8::from(e.is_home).to_string(),
            e.t.to_string(),
            u8::from(e.made).to_string(),
            e.distance_ft.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// A single invariant violation found by [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Issue {
    Empty,
    Duplicate {
        game_id: String,
        player_id: String,
        t: f64,
    },
    TimeOutOfRange {
        index: usize,
        t: f64,
    },
    DistanceOutOfRange {
        index: usize,
        distance_ft: f64,
    },
    NonMonotone {
        index: usize,
        game_id: String,
        player_id: String,
        t: f64,
        previous_t: f64,
    },
}

impl Issue {
    pub fn kind(&self) -> &'static str {
        match self {
            Issue::Empty => "empty",
            Issue::Duplicate { .. } => "duplicate",
            Issue::TimeOutOfRange { .. } => "time_range",
            Issue::DistanceOutOfRange { .. } => "distance_range",
            Issue::NonMonotone { .. } => "non_monotone",
        }
    }
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::Empty => write!(f, "dataset has no events"),
            Issue::Duplicate {
                game_id,
                player_id,
                t,
            } => write!(f, "player {player_id} has two shots in game {game_id} at t = {t}"),
            Issue::TimeOutOfRange { index, t } => write!(f, "event {index}: t = {t} is negative or not finite"),
            Issue::DistanceOutOfRange { index, distance_ft } => {
                write!(f, "event {index}: distance_ft = {distance_ft} is negative or not finite")
            }
            Issue::NonMonotone {
                index,
                game_id,
                player_id,
                t,
                previous_t,
            } => write!(
                f,
                "event {index}: player {player_id} in game {game_id} goes back in time ({previous_t} -> {t})"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Checks every dataset invariant without modifying anything.
pub fn validate(ds: &Dataset) -> ValidationReport {
    let mut issues = Vec::new();
    if ds.events.is_empty() {
        issues.push(Issue::Empty);
    }
    let mut seen: HashSet<(&str, &str, u64)> = HashSet::new();
    let mut last_t: HashMap<(&str, &str), f64> = HashMap::new();

    for (index, e) in ds.events.iter().enumerate() {
        if !(e.t.is_finite() && e.t >= 0.0) {
            issues.push(Issue::TimeOutOfRange { index, t: e.t });
        }
        if !(e.distance_ft.is_finite() && e.distance_ft >= 0.0) {
            issues.push(Issue::DistanceOutOfRange {
                index,
                distance_ft: e.distance_ft,
            });
        }
        if !seen.insert((&e.game_id, &e.player_id, e.t.to_bits())) {
            issues.push(Issue::Duplicate {
                game_id: e.game_id.clone(),
                player_id: e.player_id.clone(),
                t: e.t,
            });
        }
        let group = (e.game_id.as_str(), e.player_id.as_str());
        if let Some(&previous_t) = last_t.get(&group) {
            if e.t < previous_t {
                issues.push(Issue::NonMonotone {
                    index,
                    game_id: e.game_id.clone(),
                    player_id: e.player_id.clone(),
                    t: e.t,
                    previous_t,
                });
            }
        }
        last_t.insert(group, e.t);
    }
    ValidationReport { issues }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str, mode: LoadMode) -> Result<Loaded> {
        read_events(text.as_bytes(), mode)
    }

    fn event(game: &str, player: &str, t: f64) -> ShotEvent {
        ShotEvent {
            season: 2014,
            game_id: game.into(),
            player_id: player.into(),
            is_home: true,
            t,
            made: true,
            distance_ft: 10.0,
        }
    }

    #[test]
    fn valid_file_is_loaded_sorted() {
        let text = "season,game_id,player_id,is_home,t,made,distance_ft\n\
                    2014,g1,p2,1,100.5,1,20\n\
                    2014,g1,p1,0,30,0,3.5\n\
                    2014,g1,p1,0,12,1,24\n";
        let loaded = load(text, LoadMode::Strict).unwrap();
        let ds = loaded.dataset;
        assert_eq!(ds.len(), 3);
        assert!(loaded.skipped.is_empty());
        let order: Vec<(&str, f64)> = ds
            .events
            .iter()
            .map(|e| (e.player_id.as_str(), e.t))
            .collect();
        assert_eq!(order, vec![("p1", 12.0), ("p1", 30.0), ("p2", 100.5)]);
        assert!(!ds.events[0].is_home);
        assert!(ds.events[0].made);
        assert_eq!(ds.events[1].distance_ft, 3.5);
    }

    #[test]
    fn crlf_line_endings_are_accepted() {
        let text = "season,game_id,player_id,is_home,t,made,distance_ft\r\n2015,g,p,1,1,1,1\r\n";
        assert_eq!(load(text, LoadMode::Strict).unwrap().dataset.len(), 1);
    }

    #[test]
    fn missing_made_column_is_schema_mismatch() {
        let text = "season,game_id,player_id,is_home,t,distance_ft\n2014,g,p,1,1,1\n";
        assert!(matches!(
            load(text, LoadMode::Strict),
            Err(Error::SchemaMismatch { .. })
        ));
    }

    #[test]
    fn reordered_header_is_schema_mismatch() {
        let text = "game_id,season,player_id,is_home,t,made,distance_ft\ng,2014,p,1,1,1,1\n";
        assert!(matches!(
            load(text, LoadMode::Lenient),
            Err(Error::SchemaMismatch { .. })
        ));
    }

    #[test]
    fn empty_input_is_schema_mismatch() {
        assert!(matches!(
            load("", LoadMode::Strict),
            Err(Error::SchemaMismatch { .. })
        ));
    }

    #[test]
    fn header_only_is_empty_dataset() {
        assert!(matches!(
            load(
                "season,game_id,player_id,is_home,t,made,distance_ft\n",
                LoadMode::Strict
            ),
            Err(Error::EmptyDataset)
        ));
    }

    #[test]
    fn lenient_skips_bad_distance() {
        let text = "season,game_id,player_id,is_home,t,made,distance_ft\n\
                    2014,g,p,1,1,1,10\n\
                    2014,g,p,1,2,0,10\n\
                    2014,g,p,1,3,1,abc\n\
                    2014,g,p,1,4,0,10\n\
                    2014,g,p,1,5,1,10\n";
        let loaded = load(text, LoadMode::Lenient).unwrap();
        assert_eq!(loaded.dataset.len(), 4);
        assert_eq!(loaded.skipped.len(), 1);
        assert_eq!(loaded.skipped[0].line, 4);
        assert!(loaded.skipped[0].reason.contains("distance_ft"));
    }

    #[test]
    fn strict_reports_line_of_bad_row() {
        let text = "season,game_id,player_id,is_home,t,made,distance_ft\n\
                    2014,g,p,1,1,1,10\n\
                    2014,g,p,1,2,yes,10\n";
        match load(text, LoadMode::Strict) {
            Err(Error::RowParseError { line, reason }) => {
                assert_eq!(line, 3);
                assert!(reason.contains("made"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negative_and_non_finite_numbers_are_rejected() {
        for bad in ["-1", "NaN", "inf", ""] {
            let text = format!(
                "season,game_id,player_id,is_home,t,made,distance_ft\n2014,g,p,1,{bad},1,10\n"
            );
            assert!(
                matches!(
                    load(&text, LoadMode::Strict),
                    Err(Error::RowParseError { .. })
                ),
                "t = {bad:?} accepted"
            );
        }
    }

    #[test]
    fn wrong_field_count_is_a_row_error() {
        let text = "season,game_id,player_id,is_home,t,made,distance_ft\n2014,g,p,1,1,1\n";
        assert!(matches!(
            load(text, LoadMode::Strict),
            Err(Error::RowParseError { line: 2, .. })
        ));
    }

    #[test]
    fn duplicate_timestamp_strict_errors_lenient_keeps_first() {
        let text = "season,game_id,player_id,is_home,t,made,distance_ft\n\
                    2014,g,p,1,7,1,10\n\
                    2014,g,p,1,7,0,20\n";
        assert!(matches!(
            load(text, LoadMode::Strict),
            Err(Error::RowParseError { line: 3, .. })
        ));
        let loaded = load(text, LoadMode::Lenient).unwrap();
        assert_eq!(loaded.dataset.len(), 1);
        assert!(loaded.dataset.events[0].made);
        assert_eq!(loaded.skipped[0].line, 3);
    }

    #[test]
    fn missing_file_is_not_readable() {
        let err = load_events("/nonexistent/shots.csv", LoadMode::Strict).unwrap_err();
        assert!(matches!(err, Error::FileNotReadable { .. }));
    }

    #[test]
    fn clean_dataset_validates() {
        let ds = Dataset::new(
            vec![
                event("g", "p", 1.0),
                event("g", "p", 2.0),
                event("g", "q", 1.0),
            ],
            vec![],
        );
        assert!(validate(&ds).is_clean());
    }

    #[test]
    fn duplicate_triple_is_one_issue() {
        let ds = Dataset::new(vec![event("g", "p", 5.0), event("g", "p", 5.0)], vec![]);
        let report = validate(&ds);
        assert_eq!(report.issues.len(), 1);
        assert_eq!(report.issues[0].kind(), "duplicate");
    }

    #[test]
    fn negative_distance_is_one_issue() {
        let mut e = event("g", "p", 5.0);
        e.distance_ft = -3.0;
        let report = validate(&Dataset::new(vec![e], vec![]));
        assert_eq!(report.issues.len(), 1);
        assert!(matches!(report.issues[0], Issue::DistanceOutOfRange { .. }));
    }

    #[test]
    fn unsorted_group_is_non_monotone() {
        let ds = Dataset {
            events: vec![event("g", "p", 5.0), event("g", "p", 4.0)],
            provenance: vec![],
        };
        let report = validate(&ds);
        assert_eq!(report.issues.len(), 1);
        assert_eq!(report.issues[0].kind(), "non_monotone");
    }

    #[test]
    fn empty_dataset_is_reported() {
        assert_eq!(validate(&Dataset::default()).issues, vec![Issue::Empty]);
    }
}
