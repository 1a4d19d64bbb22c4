//! Per-player, per-game make/miss signals.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::shot_data::{Dataset, ShotEvent};

/// Row filters and segmentation applied before any statistic is computed.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SequenceFilter {
    /// Keep shots strictly longer than this many feet.
    pub min_distance_ft: Option<f64>,
    pub home_only: bool,
    pub away_only: bool,
    pub seasons: Option<BTreeSet<i32>>,
    /// Split a game's shots wherever two consecutive attempts are further apart than this.
    pub max_gap_s: Option<f64>,
}

impl SequenceFilter {
    pub fn validate(&self) -> Result<()> {
        if self.home_only && self.away_only {
            return Err(Error::ConflictingFilter);
        }
        if let Some(d) = self.min_distance_ft {
            if d.is_nan() || d < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "min_distance_ft must be >= 0, got {d}"
                )));
            }
        }
        if let Some(g) = self.max_gap_s {
            if g.is_nan() || g <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "max_gap_s must be > 0, got {g}"
                )));
            }
        }
        Ok(())
    }

    /// Season and venue checks, which hold for a whole player-game at once.
    fn admits_game(&self, e: &ShotEvent) -> bool {
        if self.home_only && !e.is_home {
            return false;
        }
        if self.away_only && e.is_home {
            return false;
        }
        self.seasons
            .as_ref()
            .map_or(true, |seasons| seasons.contains(&e.season))
    }

    fn admits_distance(&self, e: &ShotEvent) -> bool {
        self.min_distance_ft.map_or(true, |d| e.distance_ft > d)
    }

    pub(crate) fn admits(&self, e: &ShotEvent) -> bool {
        self.admits_game(e) && self.admits_distance(e)
    }
}

/// Ordered make/miss signal of one player inside one game.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotSequence {
    pub player_id: String,
    pub game_id: String,
    pub season: i32,
    pub is_home: bool,
    pub outcomes: Vec<bool>,
    pub times: Vec<f64>,
    pub distances: Vec<f64>,
}

impl ShotSequence {
    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn makes(&self) -> usize {
        self.outcomes.iter().filter(|&&m| m).count()
    }
}

/// Splits `times` into maximal runs whose consecutive differences are all `<= max_gap`.
/// Returns half-open index ranges covering every element in order.
pub fn segment_bounds(times: &[f64], max_gap: Option<f64>) -> Vec<std::ops::Range<usize>> {
    if times.is_empty() {
        return Vec::new();
    }
    let Some(max_gap) = max_gap else {
        return std::iter::once(0..times.len()).collect();
    };
    let mut bounds = Vec::new();
    let mut start = 0;
    for i in 1..times.len() {
        if times[i] - times[i - 1] > max_gap {
            bounds.push(start..i);
            start = i;
        }
    }
    bounds.push(start..times.len());
    bounds
}

/// Builds make/miss sequences, one per player-game, or one per gap-bounded segment when
/// `max_gap_s` is set. Distance filtering happens before segmentation, so gaps are
/// measured between surviving shots. Output is ordered by `(player_id, game_id, first t)`.
pub fn build_sequences(ds: &Dataset, filter: &SequenceFilter) -> Result<Vec<ShotSequence>> {
    filter.validate()?;
    build_with(ds, filter, |e| filter.admits(e))
}

pub(crate) fn build_with<F>(
    ds: &Dataset,
    filter: &SequenceFilter,
    keep: F,
) -> Result<Vec<ShotSequence>>
where
    F: Fn(&ShotEvent) -> bool + Sync,
{
    let mut groups: BTreeMap<(&str, &str), Vec<&ShotEvent>> = BTreeMap::new();
    for e in ds.events.iter().filter(|e| keep(e)) {
        groups
            .entry((e.player_id.as_str(), e.game_id.as_str()))
            .or_default()
            .push(e);
    }
    let groups: Vec<Vec<&ShotEvent>> = groups.into_values().collect();

    let per_group: Vec<Vec<ShotSequence>> = groups
        .into_par_iter()
        .map(|mut shots| {
            shots.sort_by(|a, b| a.t.total_cmp(&b.t));
            shots.dedup_by(|b, a| a.t == b.t);
            let times: Vec<f64> = shots.iter().map(|e| e.t).collect();
            segment_bounds(&times, filter.max_gap_s)
                .into_iter()
                .map(|range| {
                    let part = &shots[range];
                    ShotSequence {
                        player_id: part[0].player_id.clone(),
                        game_id: part[0].game_id.clone(),
                        season: part[0].season,
                        is_home: part[0].is_home,
                        outcomes: part.iter().map(|e| e.made).collect(),
                        times: part.iter().map(|e| e.t).collect(),
                        distances: part.iter().map(|e| e.distance_ft).collect(),
                    }
                })
                .collect()
        })
        .collect();
    Ok(per_group.into_iter().flatten().collect())
}
