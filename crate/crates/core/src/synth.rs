//! Synthetic leagues of shooters with known statistical structure.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`), a portable, seedable stream cipher.
//! Player `i` draws from the stream `i` of a generator seeded with the league seed, so
//! players can be generated in any order or in parallel with identical results.
//!
//! Per player and game: the shot count is Poisson around `shots_per_game_mean`, the first
//! attempt comes one gap after tip-off, and later attempts follow cumulative gap draws.
//! Attempts past [`GAME_LENGTH_S`] are dropped. Timestamps are kept at millisecond
//! resolution and distances at tenth-of-a-foot resolution.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Poisson};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::shot_data::{Dataset, ShotEvent};

/// Regulation length of a game in seconds.
pub const GAME_LENGTH_S: f64 = 2880.0;

/// How a shooter's outcomes and inter-shot gaps are produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShooterKind {
    /// Independent makes with probability `p`; exponential gaps of mean `mu_s`.
    Bernoulli { p: f64, mu_s: f64 },
    /// Two-state chain: `P(make | make) = a`, `P(make | miss) = b`.
    Markov { a: f64, b: f64, mu_s: f64 },
    /// Independent makes with probability `p`; the gap after a make has mean `mu_make_s`,
    /// after a miss `mu_miss_s`.
    GapCoupled {
        p: f64,
        mu_make_s: f64,
        mu_miss_s: f64,
    },
    /// Markov dependence that fades with the time since the previous attempt:
    /// `P(make | prev, gap) = π + (m_prev − π)·exp(−gap / tau_s)` where `m_prev` is `a`
    /// after a make and `b` after a miss. The stationary make rate stays at `π`.
    RelaxingMarkov {
        a: f64,
        b: f64,
        tau_s: f64,
        mu_s: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShooterModel {
    pub kind: ShooterKind,
    pub shots_per_game_mean: f64,
    pub games_per_season: u32,
}

fn check_probability(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!(
            "{name} must lie in (0, 1), got {v}"
        )))
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

impl ShooterModel {
    pub fn new(kind: ShooterKind, shots_per_game_mean: f64, games_per_season: u32) -> Self {
        ShooterModel {
            kind,
            shots_per_game_mean,
            games_per_season,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            ShooterKind::Bernoulli { p, mu_s } => {
                check_probability("p", p)?;
                check_positive("mu_s", mu_s)?;
            }
            ShooterKind::Markov { a, b, mu_s } => {
                check_probability("a", a)?;
                check_probability("b", b)?;
                check_positive("mu_s", mu_s)?;
            }
            ShooterKind::GapCoupled {
                p,
                mu_make_s,
                mu_miss_s,
            } => {
                check_probability("p", p)?;
                check_positive("mu_make_s", mu_make_s)?;
                check_positive("mu_miss_s", mu_miss_s)?;
            }
            ShooterKind::RelaxingMarkov { a, b, tau_s, mu_s } => {
                check_probability("a", a)?;
                check_probability("b", b)?;
                check_positive("tau_s", tau_s)?;
                check_positive("mu_s", mu_s)?;
            }
        }
        check_positive("shots_per_game_mean", self.shots_per_game_mean)?;
        if self.games_per_season == 0 {
            return Err(Error::InvalidSpec(
                "games_per_season must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Long-run make probability π.
    pub fn make_rate(&self) -> f64 {
        match self.kind {
            ShooterKind::Bernoulli { p, .. } | ShooterKind::GapCoupled { p, .. } => p,
            ShooterKind::Markov { a, b, .. } | ShooterKind::RelaxingMarkov { a, b, .. } => {
                b / (1.0 - a + b)
            }
        }
    }

    fn mean_gap(&self) -> f64 {
        match self.kind {
            ShooterKind::Bernoulli { mu_s, .. }
            | ShooterKind::Markov { mu_s, .. }
            | ShooterKind::RelaxingMarkov { mu_s, .. } => mu_s,
            ShooterKind::GapCoupled {
                p,
                mu_make_s,
                mu_miss_s,
            } => p * mu_make_s + (1.0 - p) * mu_miss_s,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlayerModels {
    /// Every player shares one model.
    Same(ShooterModel),
    /// Model `i` belongs to player `i`; the length must equal `n_players`.
    PerPlayer(Vec<ShooterModel>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeagueSpec {
    pub n_players: usize,
    pub models: PlayerModels,
    pub seasons: Vec<i32>,
    pub seed: u64,
    pub distance_range_ft: (f64, f64),
}

impl LeagueSpec {
    pub fn new(n_players: usize, models: PlayerModels, seasons: Vec<i32>, seed: u64) -> Self {
        LeagueSpec {
            n_players,
            models,
            seasons,
            seed,
            distance_range_ft: (1.0, 30.0),
        }
    }

    pub fn model(&self, player: usize) -> &ShooterModel {
        match &self.models {
            PlayerModels::Same(m) => m,
            PlayerModels::PerPlayer(ms) => &ms[player],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_players == 0 {
            return Err(Error::InvalidSpec("n_players must be at least 1".into()));
        }
        if self.seasons.is_empty() {
            return Err(Error::InvalidSpec("at least one season is required".into()));
        }
        let (lo, hi) = self.distance_range_ft;
        if !(lo >= 0.0 && hi >= lo && hi.is_finite()) {
            return Err(Error::InvalidSpec(format!("bad distance range {lo}..{hi}")));
        }
        match &self.models {
            PlayerModels::Same(m) => m.validate(),
            PlayerModels::PerPlayer(ms) => {
                if ms.len() != self.n_players {
                    return Err(Error::InvalidSpec(format!(
                        "{} player models for {} players",
                        ms.len(),
                        self.n_players
                    )));
                }
                ms.iter().try_for_each(ShooterModel::validate)
            }
        }
    }
}

pub fn player_id(index: usize) -> String {
    format!("p{index:04}")
}

fn game_id(season: i32, game: u32) -> String {
    format!("{season}-{game:04}")
}

/// Rounds to `1 / per_unit` resolution; dividing keeps the result the nearest `f64`
/// to the decimal value.
fn round_to(v: f64, per_unit: f64) -> f64 {
    (v * per_unit).round() / per_unit
}

/// Generates a league. Fully determined by `spec`, seed included.
pub fn generate(spec: &LeagueSpec) -> Result<Dataset> {
    spec.validate()?;
    let per_player: Vec<Vec<ShotEvent>> = (0..spec.n_players)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(i as u64);
            generate_player(spec, i, &mut rng)
        })
        .collect();
    Ok(Dataset::new(
        per_player.into_iter().flatten().collect(),
        Vec::new(),
    ))
}

fn generate_player(spec: &LeagueSpec, index: usize, rng: &mut ChaCha8Rng) -> Vec<ShotEvent> {
    let model = spec.model(index);
    let pid = player_id(index);
    let pi = model.make_rate();
    // parameters were validated, so the constructors cannot fail
    let shot_count = Poisson::new(model.shots_per_game_mean).expect("positive mean");
    let gap_dist = |mean: f64| Exp::new(1.0 / mean).expect("positive mean");
    let opening = gap_dist(model.mean_gap());
    let (d_lo, d_hi) = spec.distance_range_ft;

    let mut events = Vec::new();
    for &season in &spec.seasons {
        for game in 0..model.games_per_season {
            let gid = game_id(season, game);
            let is_home = rng.random_bool(0.5);
            let count = shot_count.sample(rng) as u64;
            let mut t = opening.sample(rng);
            let mut last_recorded = f64::NEG_INFINITY;
            let mut previous: Option<(bool, f64)> = None;

            for _ in 0..count {
                if t > GAME_LENGTH_S {
                    break;
                }
                let p_make = match (model.kind, previous) {
                    (ShooterKind::Bernoulli { p, .. } | ShooterKind::GapCoupled { p, .. }, _) => p,
                    (ShooterKind::Markov { .. } | ShooterKind::RelaxingMarkov { .. }, None) => pi,
                    (ShooterKind::Markov { a, b, .. }, Some((made, _))) => {
                        if made {
                            a
                        } else {
                            b
                        }
                    }
                    (ShooterKind::RelaxingMarkov { a, b, tau_s, .. }, Some((made, gap))) => {
                        let m = if made { a } else { b };
                        pi + (m - pi) * (-gap / tau_s).exp()
                    }
                };
                let made = rng.random_bool(p_make);

                let mut recorded = round_to(t, 1000.0);
                if recorded <= last_recorded {
                    recorded = round_to(last_recorded + 0.001, 1000.0);
                }
                last_recorded = recorded;
                let distance_ft = round_to(rng.random_range(d_lo..=d_hi), 10.0).clamp(d_lo, d_hi);
                events.push(ShotEvent {
                    season,
                    game_id: gid.clone(),
                    player_id: pid.clone(),
                    is_home,
                    t: recorded,
                    made,
                    distance_ft,
                });

                let gap = match model.kind {
                    ShooterKind::GapCoupled {
                        mu_make_s,
                        mu_miss_s,
                        ..
                    } => gap_dist(if made { mu_make_s } else { mu_miss_s }).sample(rng),
                    _ => gap_dist(model.mean_gap()).sample(rng),
                };
                previous = Some((made, gap));
                t += gap;
            }
        }
    }
    events
}

/// Lag-`k` autocorrelation of the stationary two-state chain: `(a − b)^k`.
pub fn markov_acf(a: f64, b: f64, k: usize) -> Result<f64> {
    for (name, v) in [("a", a), ("b", b)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "{name} must lie in (0, 1), got {v}"
            )));
        }
    }
    let k = i32::try_from(k).unwrap_or(i32::MAX);
    Ok((a - b).powi(k))
}

/// Probability that a gap-coupled shooter made a shot, given the next attempt came `t`
/// seconds later: `πf₁(t) / (πf₁(t) + (1 − π)f₀(t))` with exponential densities `f₁`, `f₀`
/// of means `mu_make_s`, `mu_miss_s`.
pub fn gap_coupled_fg_curve(model: &ShooterModel, t: f64) -> Result<f64> {
    let ShooterKind::GapCoupled {
        p,
        mu_make_s,
        mu_miss_s,
    } = model.kind
    else {
        return Err(Error::WrongModelKind);
    };
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "gap must be non-negative, got {t}"
        )));
    }
    // f₀/f₁ in log space so that large t gives 0 rather than 0/0
    let log_density_ratio = (mu_make_s / mu_miss_s).ln() + t / mu_make_s - t / mu_miss_s;
    let odds_against = (1.0 - p) / p * log_density_ratio.exp();
    Ok(1.0 / (1.0 + odds_against))
}
