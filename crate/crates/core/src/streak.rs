//! Per-season streakiness and whether it carries over from one season to the next.

use std::collections::{BTreeMap, BTreeSet};

use crate::correlogram::PairStats;
use crate::error::{Error, Result};
use crate::sequence::{build_sequences, SequenceFilter, ShotSequence};
use crate::shot_data::Dataset;
use crate::stats::pearson;

pub const DEFAULT_SEASON_MIN_PAIRS: u64 = 100;

/// A player's pooled lag-k correlation over one season.
#[derive(Debug, Clone, PartialEq)]
pub struct SeasonStreakMetric {
    pub player_id: String,
    pub season: i32,
    pub k: usize,
    pub r: Option<f64>,
    pub n_pairs: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterPoint {
    pub player_id: String,
    pub r_a: f64,
    pub r_b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossSeasonScatter {
    pub k: usize,
    pub points: Vec<ScatterPoint>,
    pub r_across: f64,
    pub n_players: usize,
}

/// One metric per player with at least `min_pairs` in-game lag-`k` pairs during `season`,
/// ordered by player id. The filter's own season set is replaced by `season`.
pub fn season_metrics(
    ds: &Dataset,
    season: i32,
    k: usize,
    filter: &SequenceFilter,
    min_pairs: u64,
) -> Result<Vec<SeasonStreakMetric>> {
    if min_pairs < 2 {
        return Err(Error::InvalidParameter(format!(
            "min_pairs must be at least 2, got {min_pairs}"
        )));
    }
    if !ds.events.iter().any(|e| e.season == season) {
        return Err(Error::UnknownSeason(season));
    }
    let filter = SequenceFilter {
        seasons: Some(BTreeSet::from([season])),
        ..filter.clone()
    };
    let seqs = build_sequences(ds, &filter)?;

    let mut by_player: BTreeMap<&str, Vec<&ShotSequence>> = BTreeMap::new();
    for s in &seqs {
        by_player.entry(s.player_id.as_str()).or_default().push(s);
    }
    Ok(by_player
        .into_iter()
        .filter_map(|(player_id, seqs)| {
            let stats = PairStats::from_signals(seqs.iter().map(|s| s.outcomes.as_slice()), k);
            (stats.n >= min_pairs).then(|| SeasonStreakMetric {
                player_id: player_id.to_string(),
                season,
                k,
                r: stats.correlation(),
                n_pairs: stats.n,
            })
        })
        .collect())
}

fn common_lag(metrics: &[SeasonStreakMetric]) -> Result<Option<usize>> {
    let Some(first) = metrics.first() else {
        return Ok(None);
    };
    match metrics.iter().find(|m| m.k != first.k) {
        Some(other) => Err(Error::LagMismatch(first.k, other.k)),
        None => Ok(Some(first.k)),
    }
}

/// Joins two seasons' metrics on player id and correlates the matched values.
pub fn cross_season(
    a: &[SeasonStreakMetric],
    b: &[SeasonStreakMetric],
) -> Result<CrossSeasonScatter> {
    let k = match (common_lag(a)?, common_lag(b)?) {
        (Some(ka), Some(kb)) if ka != kb => return Err(Error::LagMismatch(ka, kb)),
        (Some(k), _) | (None, Some(k)) => k,
        (None, None) => return Err(Error::TooFewPlayers(0)),
    };
    let b_by_player: BTreeMap<&str, f64> = b
        .iter()
        .filter_map(|m| m.r.map(|r| (m.player_id.as_str(), r)))
        .collect();
    let mut points: Vec<ScatterPoint> = a
        .iter()
        .filter_map(|m| {
            let r_a = m.r?;
            let r_b = *b_by_player.get(m.player_id.as_str())?;
            Some(ScatterPoint {
                player_id: m.player_id.clone(),
                r_a,
                r_b,
            })
        })
        .collect();
    points.sort_by(|x, y| x.player_id.cmp(&y.player_id));
    points.dedup_by(|x, y| x.player_id == y.player_id);

    if points.len() < 3 {
        return Err(Error::TooFewPlayers(points.len()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.r_a).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.r_b).collect();
    let r_across = pearson(&xs, &ys).ok_or(Error::ZeroVariance)?;
    Ok(CrossSeasonScatter {
        k,
        n_players: points.len(),
        points,
        r_across,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shot_data::ShotEvent;

    fn metric(player: &str, k: usize, r: Option<f64>) -> SeasonStreakMetric {
        SeasonStreakMetric {
            player_id: player.into(),
            season: 2014,
            k,
            r,
            n_pairs: 500,
        }
    }

    fn game(
        player: &str,
        season: i32,
        game: &str,
        bits: impl Iterator<Item = bool>,
    ) -> Vec<ShotEvent> {
        bits.enumerate()
            .map(|(i, made)| ShotEvent {
                season,
                game_id: game.into(),
                player_id: player.into(),
                is_home: true,
                t: i as f64 * 20.0,
                made,
                distance_ft: 18.0,
            })
            .collect()
    }

    #[test]
    fn alternating_season_is_minus_one() {
        let ds = Dataset::new(game("p", 2014, "g", (0..100).map(|i| i % 2 == 0)), vec![]);
        let m = season_metrics(&ds, 2014, 1, &SequenceFilter::default(), 50).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].r, Some(-1.0));
        assert_eq!(m[0].n_pairs, 99);
    }

    #[test]
    fn sparse_players_are_omitted() {
        let mut events = game("busy", 2014, "g", (0..100).map(|i| i % 3 == 0));
        events.extend(game("sparse", 2014, "g", (0..11).map(|i| i % 2 == 0)));
        let ds = Dataset::new(events, vec![]);
        let m = season_metrics(&ds, 2014, 1, &SequenceFilter::default(), 50).unwrap();
        let players: Vec<&str> = m.iter().map(|m| m.player_id.as_str()).collect();
        assert_eq!(players, vec!["busy"]);
    }

    #[test]
    fn unknown_season_errors() {
        let ds = Dataset::new(game("p", 2014, "g", (0..10).map(|i| i % 2 == 0)), vec![]);
        assert!(matches!(
            season_metrics(&ds, 2016, 1, &SequenceFilter::default(), 2),
            Err(Error::UnknownSeason(2016))
        ));
    }

    #[test]
    fn copy_correlates_perfectly() {
        let a = vec![
            metric("a", 1, Some(0.1)),
            metric("b", 1, Some(-0.05)),
            metric("c", 1, Some(0.02)),
            metric("d", 1, Some(-0.11)),
        ];
        let scatter = cross_season(&a, &a).unwrap();
        assert_eq!(scatter.r_across, 1.0);
        assert_eq!(scatter.n_players, 4);
    }

    #[test]
    fn join_keeps_players_defined_in_both() {
        let a = vec![
            metric("a", 2, Some(0.1)),
            metric("b", 2, None),
            metric("c", 2, Some(0.3)),
            metric("d", 2, Some(-0.2)),
            metric("e", 2, Some(0.0)),
        ];
        let b = vec![
            metric("a", 2, Some(0.2)),
            metric("b", 2, Some(0.2)),
            metric("c", 2, Some(0.1)),
            metric("e", 2, Some(-0.1)),
        ];
        let scatter = cross_season(&a, &b).unwrap();
        let players: Vec<&str> = scatter
            .points
            .iter()
            .map(|p| p.player_id.as_str())
            .collect();
        assert_eq!(players, vec!["a", "c", "e"]);
        assert_eq!(scatter.k, 2);
    }

    #[test]
    fn swapping_seasons_keeps_r() {
        let a = vec![
            metric("a", 1, Some(0.1)),
            metric("b", 1, Some(0.3)),
            metric("c", 1, Some(-0.2)),
        ];
        let b = vec![
            metric("a", 1, Some(0.05)),
            metric("b", 1, Some(-0.1)),
            metric("c", 1, Some(0.2)),
        ];
        assert_eq!(
            cross_season(&a, &b).unwrap().r_across,
            cross_season(&b, &a).unwrap().r_across
        );
    }

    #[test]
    fn mismatched_lags_error() {
        let a = vec![metric("a", 1, Some(0.1))];
        let b = vec![metric("a", 2, Some(0.1))];
        assert!(matches!(
            cross_season(&a, &b),
            Err(Error::LagMismatch(1, 2))
        ));
    }

    #[test]
    fn too_few_players_error() {
        let a = vec![metric("a", 1, Some(0.1)), metric("b", 1, Some(0.2))];
        assert!(matches!(cross_season(&a, &a), Err(Error::TooFewPlayers(2))));
    }
}
