//! Field-goal percentage of a shot against the time until the same player's next attempt.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sequence::{build_sequences, build_with, SequenceFilter, ShotSequence};
use crate::shot_data::Dataset;

pub const DEFAULT_MAX_GAP_MINUTES: u32 = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GapMode {
    /// Every adjacent pair is bucketed by its own gap.
    #[default]
    PerPair,
    /// Every non-final shot of a sequence is bucketed by the sequence's mean gap.
    SequenceAverage,
}

/// Which shots of a pair the minimum-distance filter applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceScope {
    #[default]
    BothShots,
    FirstShot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct GapOptions {
    pub mode: GapMode,
    pub distance_scope: DistanceScope,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bucket {
    pub attempts: u64,
    pub makes: u64,
    pub fg_pct: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapBucketTable {
    /// Rounded-minute gap to the bucket's tallies. Empty buckets are absent.
    pub buckets: BTreeMap<u32, Bucket>,
    pub filter_echo: SequenceFilter,
    pub options: GapOptions,
    pub max_gap_minutes: u32,
}

impl GapBucketTable {
    pub fn total_attempts(&self) -> u64 {
        self.buckets.values().map(|b| b.attempts).sum()
    }

    pub fn fg_pct(&self, bucket: u32) -> Option<f64> {
        self.buckets.get(&bucket).map(|b| b.fg_pct)
    }
}

/// Rounds a gap in seconds to whole minutes, halves going up.
pub fn minute_bucket(gap_s: f64) -> u32 {
    let minutes = (gap_s / 60.0 + 0.5).floor();
    if minutes <= 0.0 {
        0
    } else if minutes >= u32::MAX as f64 {
        u32::MAX
    } else {
        minutes as u32
    }
}

/// Midpoint, in seconds, of the gaps that round to `bucket`: 15 s for bucket 0, whose
/// range is [0, 30 s), and `60 * bucket` otherwise.
pub fn bucket_center_s(bucket: u32) -> f64 {
    if bucket == 0 {
        15.0
    } else {
        60.0 * f64::from(bucket)
    }
}

/// Tallies the first shot of each adjacent same-player same-game pair into the bucket of
/// the gap to the next shot. Pairs whose bucket exceeds `max_gap_minutes` are dropped.
pub fn fg_by_gap(
    ds: &Dataset,
    filter: &SequenceFilter,
    max_gap_minutes: u32,
    options: GapOptions,
) -> Result<GapBucketTable> {
    if max_gap_minutes < 1 {
        return Err(Error::InvalidParameter(
            "max_gap_minutes must be at least 1".to_string(),
        ));
    }
    filter.validate()?;

    let min_distance = filter.min_distance_ft;
    let (seqs, first_shot_ok): (Vec<ShotSequence>, Box<dyn Fn(f64) -> bool>) =
        match options.distance_scope {
            DistanceScope::BothShots => (build_sequences(ds, filter)?, Box::new(|_| true)),
            DistanceScope::FirstShot => {
                let unfiltered_distance = SequenceFilter {
                    min_distance_ft: None,
                    ..filter.clone()
                };
                (
                    build_with(ds, filter, |e| unfiltered_distance.admits(e))?,
                    Box::new(move |d| min_distance.map_or(true, |m| d > m)),
                )
            }
        };

    let mut tallies: BTreeMap<u32, (u64, u64)> = BTreeMap::new();
    let mut tally = |bucket: u32, made: bool| {
        if bucket <= max_gap_minutes {
            let entry = tallies.entry(bucket).or_default();
            entry.0 += 1;
            entry.1 += u64::from(made);
        }
    };

    for s in seqs.iter().filter(|s| s.len() >= 2) {
        match options.mode {
            GapMode::PerPair => {
                for i in 0..s.len() - 1 {
                    if first_shot_ok(s.distances[i]) {
                        tally(minute_bucket(s.times[i + 1] - s.times[i]), s.outcomes[i]);
                    }
                }
            }
            GapMode::SequenceAverage => {
                let mean_gap = (s.times[s.len() - 1] - s.times[0]) / (s.len() - 1) as f64;
                let bucket = minute_bucket(mean_gap);
                for i in 0..s.len() - 1 {
                    if first_shot_ok(s.distances[i]) {
                        tally(bucket, s.outcomes[i]);
                    }
                }
            }
        }
    }

    let buckets = tallies
        .into_iter()
        .map(|(bucket, (attempts, makes))| {
            (
                bucket,
                Bucket {
                    attempts,
                    makes,
                    fg_pct: makes as f64 / attempts as f64,
                },
            )
        })
        .collect();
    Ok(GapBucketTable {
        buckets,
        filter_echo: filter.clone(),
        options,
        max_gap_minutes,
    })
}
