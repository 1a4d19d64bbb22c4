//! Lag-k autocorrelation of make/miss signals.
//!
//! A make is 1 and a miss is 0. For lag `k`, every sequence of length `L > k`
//! contributes the pairs `(outcome[i], outcome[i + k])` for `i < L - k`. Pairs are pooled
//! over a player's sequences and reduced to the mean-centered Pearson correlation. Pairs
//! never cross a sequence boundary, so they never cross games either.
//!
//! Mean-centering matters: for a random signal the statistic is zero at every lag `k >= 1`,
//! whereas the raw mean of `x * y` products would converge to the squared make rate.
//!
//! Because outcomes are binary, all sums are integer counts and the correlation is
//! computed from them directly. Lag 0 therefore yields exactly 1.0.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sequence::ShotSequence;
use crate::stats::quantile_sorted;

/// Default lower bound on pooled pairs before a per-player correlation is reported.
pub const DEFAULT_MIN_PAIRS: u64 = 50;

/// Upper bound accepted by [`parse_lags`].
pub const MAX_LAG: usize = 1000;

/// The `(outcome_t, outcome_{t+k})` pairs at one lag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LagPairs {
    pub lag: usize,
    pub xs: Vec<bool>,
    pub ys: Vec<bool>,
}

impl LagPairs {
    pub fn from_bits(lag: usize, xs: &[u8], ys: &[u8]) -> Self {
        LagPairs {
            lag,
            xs: xs.iter().map(|&b| b != 0).collect(),
            ys: ys.iter().map(|&b| b != 0).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn stats(&self) -> PairStats {
        let mut stats = PairStats::default();
        for (&x, &y) in self.xs.iter().zip(&self.ys) {
            stats.push(x, y);
        }
        stats
    }
}

/// Sufficient statistics of a set of binary pairs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PairStats {
    pub n: u64,
    pub sum_x: u64,
    pub sum_y: u64,
    pub sum_xy: u64,
}

impl PairStats {
    pub fn push(&mut self, x: bool, y: bool) {
        self.n += 1;
        self.sum_x += u64::from(x);
        self.sum_y += u64::from(y);
        self.sum_xy += u64::from(x && y);
    }

    pub fn merge(&mut self, other: &PairStats) {
        self.n += other.n;
        self.sum_x += other.sum_x;
        self.sum_y += other.sum_y;
        self.sum_xy += other.sum_xy;
    }

    /// Pools lag-`lag` pairs over `outcomes` slices without materializing them.
    pub fn from_signals<'a, I>(signals: I, lag: usize) -> Self
    where
        I: IntoIterator<Item = &'a [bool]>,
    {
        let mut stats = PairStats::default();
        for s in signals {
            if s.len() <= lag {
                continue;
            }
            for (&x, &y) in s.iter().zip(&s[lag..]) {
                stats.push(x, y);
            }
        }
        stats
    }

    pub fn from_sequences(seqs: &[ShotSequence], lag: usize) -> Self {
        Self::from_signals(seqs.iter().map(|s| s.outcomes.as_slice()), lag)
    }

    /// Pearson correlation, or `None` if a side has zero variance or `n < 2`.
    pub fn correlation(&self) -> Option<f64> {
        if self.n < 2 {
            return None;
        }
        // n * Σ(x - x̄)(y - ȳ) etc.; exact integers since x² = x for binary data
        let n = i128::from(self.n);
        let (sx, sy, sxy) = (
            i128::from(self.sum_x),
            i128::from(self.sum_y),
            i128::from(self.sum_xy),
        );
        let cov = n * sxy - sx * sy;
        let var_x = n * sx - sx * sx;
        let var_y = n * sy - sy * sy;
        if var_x == 0 || var_y == 0 {
            return None;
        }
        let r = if var_x == var_y {
            cov as f64 / var_x as f64
        } else {
            cov as f64 / ((var_x as f64).sqrt() * (var_y as f64).sqrt())
        };
        Some(r.clamp(-1.0, 1.0))
    }
}

/// Collects the lag-`k` pairs of every sequence longer than `k`.
pub fn lag_pairs(seqs: &[ShotSequence], k: usize) -> LagPairs {
    let mut pairs = LagPairs {
        lag: k,
        xs: Vec::new(),
        ys: Vec::new(),
    };
    for s in seqs.iter().filter(|s| s.len() > k) {
        pairs.xs.extend_from_slice(&s.outcomes[..s.len() - k]);
        pairs.ys.extend_from_slice(&s.outcomes[k..]);
    }
    pairs
}

/// Correlation of the pooled pairs; `Ok(None)` when there are fewer than `min_pairs`
/// pairs or a side is constant.
pub fn pearson_r(pairs: &LagPairs, min_pairs: u64) -> Result<Option<f64>> {
    check_min_pairs(min_pairs)?;
    if (pairs.len() as u64) < min_pairs {
        return Ok(None);
    }
    Ok(pairs.stats().correlation())
}

fn check_min_pairs(min_pairs: u64) -> Result<()> {
    if min_pairs < 2 {
        return Err(Error::InvalidParameter(format!(
            "min_pairs must be at least 2, got {min_pairs}"
        )));
    }
    Ok(())
}

fn thresholded(stats: &PairStats, min_pairs: u64) -> Option<f64> {
    if stats.n < min_pairs {
        None
    } else {
        stats.correlation()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scope {
    Player(String),
    PlayerGame { player_id: String, game_id: String },
    Aggregate,
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Player(id) => f.write_str(id),
            Scope::PlayerGame { player_id, game_id } => write!(f, "{player_id}/{game_id}"),
            Scope::Aggregate => f.write_str("aggregate"),
        }
    }
}

/// Two-sided significance band for a correlation at one lag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    /// 95% band of a null correlation under the normal approximation, ±1.96/√n.
    pub fn normal(n_pairs: u64) -> Option<Band> {
        if n_pairs == 0 {
            return None;
        }
        let half = 1.96 / (n_pairs as f64).sqrt();
        Some(Band {
            lo: -half,
            hi: half,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrPoint {
    pub r: Option<f64>,
    pub n_pairs: u64,
    pub band: Option<Band>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Correlogram {
    pub scope: Scope,
    pub points: BTreeMap<usize, CorrPoint>,
}

impl Correlogram {
    pub fn r(&self, lag: usize) -> Option<f64> {
        self.points.get(&lag).and_then(|p| p.r)
    }

    pub fn n_pairs(&self, lag: usize) -> u64 {
        self.points.get(&lag).map_or(0, |p| p.n_pairs)
    }

    /// Attaches the normal-approximation band to every lag >= 1 that has pairs.
    pub fn with_normal_band(mut self) -> Self {
        for (&lag, point) in self.points.iter_mut() {
            if lag > 0 {
                point.band = Band::normal(point.n_pairs);
            }
        }
        self
    }
}

/// Correlogram of one player, pooling pairs across all of their sequences.
pub fn player_correlogram(
    seqs: &[ShotSequence],
    lags: &[usize],
    min_pairs: u64,
) -> Result<Correlogram> {
    check_min_pairs(min_pairs)?;
    let first = seqs.first().ok_or(Error::EmptyInput)?;
    if let Some(other) = seqs.iter().find(|s| s.player_id != first.player_id) {
        return Err(Error::MixedPlayers {
            first: first.player_id.clone(),
            other: other.player_id.clone(),
        });
    }
    let points = lags
        .iter()
        .map(|&k| {
            let stats = PairStats::from_sequences(seqs, k);
            (
                k,
                CorrPoint {
                    r: thresholded(&stats, min_pairs),
                    n_pairs: stats.n,
                    band: None,
                },
            )
        })
        .collect();
    Ok(Correlogram {
        scope: Scope::Player(first.player_id.clone()),
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weighting {
    /// Every contributing player counts once.
    #[default]
    Equal,
    /// Players weighted by their pair count at that lag.
    ByPairs,
}

/// Averages the defined per-player correlations lag by lag.
///
/// Players without a defined value at a lag are left out of that lag. The aggregate pair
/// count is the sum over contributors. Inputs are reduced in the order given.
pub fn aggregate_correlogram(
    per_player: &[Correlogram],
    weighting: Weighting,
) -> Result<Correlogram> {
    if per_player.is_empty() {
        return Err(Error::EmptyInput);
    }
    let lags: BTreeSet<usize> = per_player
        .iter()
        .flat_map(|c| c.points.keys().copied())
        .collect();

    let mut any_defined = false;
    let mut points = BTreeMap::new();
    for lag in lags {
        let (mut weighted, mut total_weight, mut n_pairs) = (0.0, 0.0, 0u64);
        for point in per_player.iter().filter_map(|c| c.points.get(&lag)) {
            let Some(r) = point.r else { continue };
            let w = match weighting {
                Weighting::Equal => 1.0,
                Weighting::ByPairs => point.n_pairs as f64,
            };
            weighted += w * r;
            total_weight += w;
            n_pairs += point.n_pairs;
        }
        let r = (total_weight > 0.0).then(|| (weighted / total_weight).clamp(-1.0, 1.0));
        any_defined |= r.is_some();
        points.insert(
            lag,
            CorrPoint {
                r,
                n_pairs,
                band: None,
            },
        );
    }
    if !any_defined {
        return Err(Error::NoDefinedPoints);
    }
    Ok(Correlogram {
        scope: Scope::Aggregate,
        points,
    })
}

/// Unit over which pairs are pooled before averaging across units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pooling {
    /// One correlation per player, pooled over all of the player's games.
    #[default]
    Player,
    /// One correlation per player-game.
    PlayerGame,
}

/// Per-unit correlograms, ordered by player id (and game id for [`Pooling::PlayerGame`]).
pub fn unit_correlograms(
    seqs: &[ShotSequence],
    lags: &[usize],
    min_pairs: u64,
    pooling: Pooling,
) -> Result<Vec<Correlogram>> {
    check_min_pairs(min_pairs)?;
    let mut units: BTreeMap<(&str, &str), Vec<ShotSequence>> = BTreeMap::new();
    for s in seqs {
        let game = match pooling {
            Pooling::Player => "",
            Pooling::PlayerGame => s.game_id.as_str(),
        };
        units
            .entry((s.player_id.as_str(), game))
            .or_default()
            .push(s.clone());
    }
    let units: Vec<((&str, &str), Vec<ShotSequence>)> = units.into_iter().collect();
    units
        .into_par_iter()
        .map(|((player_id, game_id), unit)| {
            let mut c = player_correlogram(&unit, lags, min_pairs)?;
            if pooling == Pooling::PlayerGame {
                c.scope = Scope::PlayerGame {
                    player_id: player_id.to_string(),
                    game_id: game_id.to_string(),
                };
            }
            Ok(c)
        })
        .collect()
}

/// League-wide correlogram: per-unit correlations averaged with `weighting`.
pub fn league_correlogram(
    seqs: &[ShotSequence],
    lags: &[usize],
    min_pairs: u64,
    pooling: Pooling,
    weighting: Weighting,
) -> Result<Correlogram> {
    let units = unit_correlograms(seqs, lags, min_pairs, pooling)?;
    aggregate_correlogram(&units, weighting)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PermutationResult {
    pub lag: usize,
    pub r_obs: f64,
    pub n_pairs: u64,
    pub p_two_sided: f64,
    pub band_95: Band,
}

/// Permutation test of one player's lag-`k` correlation.
///
/// Each replicate shuffles outcomes uniformly within every sequence, which keeps sequence
/// lengths, make counts and timestamps fixed. Replicate `i` draws from ChaCha8 seeded with
/// `seed` on stream `i`, so results do not depend on thread count. A replicate whose
/// correlation is undefined counts as 0.
pub fn permutation_test(
    seqs: &[ShotSequence],
    k: usize,
    n_perm: usize,
    seed: u64,
    min_pairs: u64,
) -> Result<PermutationResult> {
    check_min_pairs(min_pairs)?;
    if n_perm < 100 {
        return Err(Error::InvalidParameter(format!(
            "at least 100 permutations are required, got {n_perm}"
        )));
    }
    if let (Some(first), Some(other)) = (
        seqs.first(),
        seqs.iter().find(|s| seqs[0].player_id != s.player_id),
    ) {
        return Err(Error::MixedPlayers {
            first: first.player_id.clone(),
            other: other.player_id.clone(),
        });
    }
    let observed = PairStats::from_sequences(seqs, k);
    if observed.n < min_pairs {
        return Err(Error::TooFewPairs {
            lag: k,
            n_pairs: observed.n,
            min_pairs,
        });
    }
    let r_obs = observed.correlation().ok_or(Error::ZeroVariance)?;

    let useful: Vec<&[bool]> = seqs
        .iter()
        .map(|s| s.outcomes.as_slice())
        .filter(|o| o.len() > k)
        .collect();
    let mut r_perm: Vec<f64> = (0..n_perm as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let mut stats = PairStats::default();
            let mut buf = Vec::new();
            for outcomes in &useful {
                buf.clear();
                buf.extend_from_slice(outcomes);
                buf.shuffle(&mut rng);
                stats.merge(&PairStats::from_signals([buf.as_slice()], k));
            }
            stats.correlation().unwrap_or(0.0)
        })
        .collect();

    // ties within rounding noise count as extreme
    let threshold = r_obs.abs() - 1e-12;
    let extreme = r_perm.iter().filter(|r| r.abs() >= threshold).count();
    let p_two_sided = (1 + extreme) as f64 / (n_perm + 1) as f64;

    r_perm.sort_by(f64::total_cmp);
    let band_95 = Band {
        lo: quantile_sorted(&r_perm, 0.025).unwrap_or(f64::NAN),
        hi: quantile_sorted(&r_perm, 0.975).unwrap_or(f64::NAN),
    };
    Ok(PermutationResult {
        lag: k,
        r_obs,
        n_pairs: observed.n,
        p_two_sided,
        band_95,
    })
}

/// Parses a lag list such as `0..10`, `1,2,5` or `0..3,7`. Ranges are inclusive.
/// The result is sorted and free of duplicates.
pub fn parse_lags(spec: &str) -> Result<Vec<usize>> {
    let invalid = |why: String| Error::InvalidParameter(format!("lags `{spec}`: {why}"));
    let parse_one = |s: &str| -> Result<usize> {
        let s = s.trim();
        let lag: usize = s
            .parse()
            .map_err(|_| invalid(format!("`{s}` is not a non-negative integer")))?;
        if lag > MAX_LAG {
            return Err(invalid(format!("{lag} exceeds the maximum lag {MAX_LAG}")));
        }
        Ok(lag)
    };

    let mut lags = BTreeSet::new();
    for item in spec.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err(invalid("empty item".to_string()));
        }
        if let Some((lo, hi)) = item.split_once("..") {
            let hi = hi.strip_prefix('=').unwrap_or(hi);
            let (lo, hi) = (parse_one(lo)?, parse_one(hi)?);
            if lo > hi {
                return Err(invalid(format!("range {lo}..{hi} is reversed")));
            }
            lags.extend(lo..=hi);
        } else {
            lags.insert(parse_one(item)?);
        }
    }
    Ok(lags.into_iter().collect())
}
