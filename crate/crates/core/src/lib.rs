//! Streak analytics over play-by-play field-goal attempts.
//!
//! The pipeline is:
//!
//! 1. [`shot_data`] loads and validates a canonical shot-event CSV into a [`Dataset`].
//! 2. [`sequence`] turns the dataset into per-player, per-game make/miss signals,
//!    optionally filtered by distance, venue, season and maximum inter-shot gap.
//! 3. [`correlogram`] computes lag-k autocorrelations of those signals, per player and
//!    averaged across players, with permutation significance.
//! 4. [`gap`] tabulates field-goal percentage against the time until the next attempt.
//! 5. [`streak`] measures per-season streakiness and its persistence across seasons.
//!
//! [`synth`] generates leagues of synthetic shooters with known statistics. They are used
//! throughout the test suites as ground truth for the estimators above.

pub mod correlogram;
pub mod error;
pub mod gap;
pub mod sequence;
pub mod shot_data;
pub mod stats;
pub mod streak;
pub mod synth;

pub use correlogram::{
    aggregate_correlogram, lag_pairs, league_correlogram, parse_lags, pearson_r, permutation_test,
    player_correlogram, Band, CorrPoint, Correlogram, LagPairs, PairStats, PermutationResult,
    Pooling, Scope, Weighting,
};
pub use error::{Error, Result};
pub use gap::{
    bucket_center_s, fg_by_gap, minute_bucket, Bucket, DistanceScope, GapBucketTable, GapMode,
    GapOptions,
};
pub use sequence::{build_sequences, segment_bounds, SequenceFilter, ShotSequence};
pub use shot_data::{
    load_events, load_events_with_report, read_events, validate, write_events, Dataset, Issue,
    LoadMode, Loaded, ShotEvent, SkippedRow, ValidationReport, CSV_HEADER,
};
pub use streak::{
    cross_season, season_metrics, CrossSeasonScatter, ScatterPoint, SeasonStreakMetric,
};
pub use synth::{
    gap_coupled_fg_curve, generate, markov_acf, LeagueSpec, PlayerModels, ShooterKind,
    ShooterModel, GAME_LENGTH_S,
};
