use std::collections::BTreeSet;

use hothand::correlogram::unit_correlograms;
use hothand::{
    aggregate_correlogram, build_sequences, cross_season, fg_by_gap, generate, load_events,
    permutation_test, player_correlogram, season_metrics, validate, write_events, Band,
    Correlogram, Dataset, DistanceScope, GapMode, GapOptions, LeagueSpec, LoadMode, PlayerModels,
    Pooling, SequenceFilter, ShooterKind, ShooterModel, Weighting,
};
use serde::Serialize;

use crate::args::{
    BandArg, CorrelogramArgs, FgtimeArgs, FilterArgs, GapModeArg, InputArgs, ModelArg, OutputArgs,
    PoolingArg, SimulateArgs, StreakyearArgs, ValidateArgs, WeightingArg,
};
use crate::output::render;
use crate::CliError;

/// Rendered command output and where it should go.
pub struct Emit {
    pub bytes: Vec<u8>,
    pub path: Option<std::path::PathBuf>,
}

fn load(input: &InputArgs) -> Result<Dataset, CliError> {
    let mode = if input.lenient {
        LoadMode::Lenient
    } else {
        LoadMode::Strict
    };
    Ok(load_events(&input.input, mode)?)
}

fn emit<T: Serialize>(rows: &[T], header: &[&str], output: &OutputArgs) -> Result<Emit, CliError> {
    Ok(Emit {
        bytes: render(rows, header, output.format)?,
        path: output.output.clone(),
    })
}

fn base_filter(f: &FilterArgs) -> SequenceFilter {
    SequenceFilter {
        min_distance_ft: f.min_distance,
        home_only: f.home,
        away_only: f.away,
        seasons: f.seasons.clone(),
        max_gap_s: None,
    }
}

#[derive(Debug, Serialize)]
struct CorrelogramRow {
    variant: String,
    scope: String,
    lag: usize,
    r: Option<f64>,
    n_pairs: u64,
    band_lo: Option<f64>,
    band_hi: Option<f64>,
    p_value: Option<f64>,
}

const CORRELOGRAM_HEADER: &[&str] = &[
    "variant", "scope", "lag", "r", "n_pairs", "band_lo", "band_hi", "p_value",
];

pub fn correlogram(args: &CorrelogramArgs) -> Result<Emit, CliError> {
    let ds = load(&args.input)?;
    let variants: Vec<Option<f64>> = if args.max_gap.is_empty() {
        vec![None]
    } else {
        args.max_gap.iter().copied().map(Some).collect()
    };

    let mut rows = Vec::new();
    for max_gap in variants {
        let variant = match max_gap {
            None => "all".to_string(),
            Some(g) => format!("max_gap_s={g}"),
        };
        let filter = SequenceFilter {
            max_gap_s: max_gap,
            ..base_filter(&args.filter)
        };
        let mut seqs = build_sequences(&ds, &filter)?;
        if let Some(player) = &args.player {
            seqs.retain(|s| &s.player_id == player);
            if seqs.is_empty() {
                return Err(CliError::Data(format!(
                    "no shots for player {player} after filtering"
                )));
            }
        }
        if seqs.is_empty() {
            return Err(CliError::Data("no shots left after filtering".into()));
        }

        let mut p_values = std::collections::BTreeMap::new();
        let mut curve: Correlogram = if args.player.is_some() {
            player_correlogram(&seqs, &args.lags.0, args.min_pairs)?
        } else {
            let pooling = match args.pooling {
                PoolingArg::Player => Pooling::Player,
                PoolingArg::PlayerGame => Pooling::PlayerGame,
            };
            let weighting = match args.weighting {
                WeightingArg::Equal => Weighting::Equal,
                WeightingArg::ByPairs => Weighting::ByPairs,
            };
            let units = unit_correlograms(&seqs, &args.lags.0, args.min_pairs, pooling)?;
            aggregate_correlogram(&units, weighting)?
        };
        if args.band == BandArg::Normal {
            curve = curve.with_normal_band();
        }
        if let Some(n_perm) = args.permutations {
            for (&lag, point) in curve.points.iter_mut() {
                if lag == 0 || point.r.is_none() {
                    continue;
                }
                let res = permutation_test(&seqs, lag, n_perm as usize, args.seed, args.min_pairs)?;
                point.band = Some(res.band_95);
                p_values.insert(lag, res.p_two_sided);
            }
        }

        let scope = curve.scope.to_string();
        rows.extend(curve.points.iter().map(|(&lag, point)| CorrelogramRow {
            variant: variant.clone(),
            scope: scope.clone(),
            lag,
            r: point.r,
            n_pairs: point.n_pairs,
            band_lo: point.band.map(|b: Band| b.lo),
            band_hi: point.band.map(|b: Band| b.hi),
            p_value: p_values.get(&lag).copied(),
        }));
    }
    emit(&rows, CORRELOGRAM_HEADER, &args.output)
}

#[derive(Debug, Serialize)]
struct FgtimeRow {
    bucket: u32,
    attempts: u64,
    makes: u64,
    fg_pct: f64,
}

const FGTIME_HEADER: &[&str] = &["bucket", "attempts", "makes", "fg_pct"];

pub fn fgtime(args: &FgtimeArgs) -> Result<Emit, CliError> {
    let ds = load(&args.input)?;
    let filter = SequenceFilter {
        min_distance_ft: (!args.all_distances).then_some(args.min_distance),
        home_only: args.home,
        away_only: args.away,
        seasons: args.seasons.clone(),
        max_gap_s: args.max_gap,
    };
    let options = GapOptions {
        mode: match args.gap_mode {
            GapModeArg::Pair => GapMode::PerPair,
            GapModeArg::SequenceAverage => GapMode::SequenceAverage,
        },
        distance_scope: if args.first_shot_only {
            DistanceScope::FirstShot
        } else {
            DistanceScope::BothShots
        },
    };
    let table = fg_by_gap(&ds, &filter, args.max_gap_minutes, options)?;
    if table.buckets.is_empty() {
        return Err(CliError::Data(
            "no shot pairs left after filtering".to_string(),
        ));
    }
    let rows: Vec<FgtimeRow> = table
        .buckets
        .iter()
        .map(|(&bucket, b)| FgtimeRow {
            bucket,
            attempts: b.attempts,
            makes: b.makes,
            fg_pct: b.fg_pct,
        })
        .collect();
    emit(&rows, FGTIME_HEADER, &args.output)
}

#[derive(Debug, Serialize)]
struct StreakRow {
    record: &'static str,
    lag: usize,
    player_id: Option<String>,
    r_a: Option<f64>,
    r_b: Option<f64>,
    r_across: Option<f64>,
    n_players: Option<usize>,
}

const STREAK_HEADER: &[&str] = &[
    "record",
    "lag",
    "player_id",
    "r_a",
    "r_b",
    "r_across",
    "n_players",
];

pub fn streakyear(args: &StreakyearArgs) -> Result<Emit, CliError> {
    let ds = load(&args.input)?;
    let filter = SequenceFilter {
        min_distance_ft: args.min_distance,
        home_only: args.home,
        away_only: args.away,
        seasons: None,
        max_gap_s: args.max_gap,
    };
    let mut rows = Vec::new();
    for &k in &args.lags.0 {
        let a = season_metrics(&ds, args.season_a, k, &filter, args.min_pairs)?;
        let b = season_metrics(&ds, args.season_b, k, &filter, args.min_pairs)?;
        let scatter = cross_season(&a, &b)?;
        rows.extend(scatter.points.iter().map(|p| StreakRow {
            record: "point",
            lag: k,
            player_id: Some(p.player_id.clone()),
            r_a: Some(p.r_a),
            r_b: Some(p.r_b),
            r_across: None,
            n_players: None,
        }));
        rows.push(StreakRow {
            record: "summary",
            lag: k,
            player_id: None,
            r_a: None,
            r_b: None,
            r_across: Some(scatter.r_across),
            n_players: Some(scatter.n_players),
        });
    }
    emit(&rows, STREAK_HEADER, &args.output)
}

pub fn simulate(args: &SimulateArgs) -> Result<Emit, CliError> {
    let kind = match args.model {
        ModelArg::Bernoulli => ShooterKind::Bernoulli {
            p: args.p,
            mu_s: args.mu,
        },
        ModelArg::Markov => ShooterKind::Markov {
            a: required(args.a, "--a")?,
            b: required(args.b, "--b")?,
            mu_s: args.mu,
        },
        ModelArg::GapCoupled => ShooterKind::GapCoupled {
            p: args.p,
            mu_make_s: args.mu_make,
            mu_miss_s: args.mu_miss,
        },
        ModelArg::RelaxingMarkov => ShooterKind::RelaxingMarkov {
            a: required(args.a, "--a")?,
            b: required(args.b, "--b")?,
            tau_s: args.tau,
            mu_s: args.mu,
        },
    };
    let model = ShooterModel::new(kind, args.shots_per_game, args.games);
    let n_players = usize::try_from(args.players)
        .map_err(|_| CliError::Usage("--players is too large".into()))?;
    let spec = LeagueSpec::new(
        n_players,
        PlayerModels::Same(model),
        args.seasons.iter().copied().collect(),
        args.seed,
    );
    spec.validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let ds = generate(&spec)?;
    let mut bytes = Vec::new();
    write_events(&ds, &mut bytes)?;
    Ok(Emit {
        bytes,
        path: args.output.clone(),
    })
}

fn required(v: Option<f64>, flag: &str) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("{flag} is required for this model")))
}

#[derive(Debug, Serialize)]
struct IssueRow {
    kind: String,
    detail: String,
}

const ISSUE_HEADER: &[&str] = &["kind", "detail"];

/// Returns the report and whether the file was clean.
pub fn validate_file(args: &ValidateArgs) -> Result<(Emit, bool), CliError> {
    let loaded = hothand::load_events_with_report(&args.input, LoadMode::Lenient)?;
    let mut rows: Vec<IssueRow> = loaded
        .skipped
        .iter()
        .map(|s| IssueRow {
            kind: "skipped_row".into(),
            detail: s.to_string(),
        })
        .collect();
    rows.extend(validate(&loaded.dataset).issues.iter().map(|i| IssueRow {
        kind: i.kind().into(),
        detail: i.to_string(),
    }));
    let seasons: BTreeSet<i32> = loaded.dataset.events.iter().map(|e| e.season).collect();
    eprintln!(
        "{} events, {} seasons, {} issues",
        loaded.dataset.len(),
        seasons.len(),
        rows.len()
    );
    let clean = rows.is_empty();
    Ok((emit(&rows, ISSUE_HEADER, &args.output)?, clean))
}
