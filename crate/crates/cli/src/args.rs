use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "hothand",
    version,
    about = "Streak analytics for play-by-play shot data"
)]
pub struct Cli {
    /// Worker threads (0 = one per core). Output does not depend on this value.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Autocorrelogram of make/miss sequences, per player or averaged over players.
    Correlogram(CorrelogramArgs),
    /// Field-goal percentage against the time until the shooter's next attempt.
    Fgtime(FgtimeArgs),
    /// Per-player streakiness in two seasons and its correlation across them.
    Streakyear(StreakyearArgs),
    /// Generate a synthetic league in the canonical CSV format.
    Simulate(SimulateArgs),
    /// Check an event file against the data invariants.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Shot-event CSV file.
    #[arg(long)]
    pub input: PathBuf,

    /// Skip malformed rows (reported on stderr) instead of failing.
    #[arg(long)]
    pub lenient: bool,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    /// Keep only shots longer than this many feet.
    #[arg(long, value_parser = non_negative)]
    pub min_distance: Option<f64>,

    /// Home games only.
    #[arg(long, conflicts_with = "away")]
    pub home: bool,

    /// Away games only.
    #[arg(long)]
    pub away: bool,

    /// Comma-separated season labels, e.g. `2014,2015`.
    #[arg(long, value_parser = parse_seasons)]
    pub seasons: Option<BTreeSet<i32>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightingArg {
    Equal,
    ByPairs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PoolingArg {
    Player,
    PlayerGame,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BandArg {
    None,
    Normal,
}

#[derive(Debug, Args)]
pub struct CorrelogramArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub filter: FilterArgs,

    /// Maximum seconds between consecutive shots of a sequence. Repeat to emit one curve
    /// per threshold.
    #[arg(long = "max-gap", value_parser = positive)]
    pub max_gap: Vec<f64>,

    /// Lags, e.g. `0..10` or `1,2,5`.
    #[arg(long, default_value = "0..10", value_parser = parse_lags)]
    pub lags: Lags,

    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(2..))]
    pub min_pairs: u64,

    #[arg(long, value_enum, default_value_t = WeightingArg::Equal)]
    pub weighting: WeightingArg,

    #[arg(long, value_enum, default_value_t = PoolingArg::Player)]
    pub pooling: PoolingArg,

    /// Restrict to one player.
    #[arg(long)]
    pub player: Option<String>,

    /// Significance band added to lags >= 1.
    #[arg(long, value_enum, default_value_t = BandArg::None)]
    pub band: BandArg,

    /// Permutation replicates per lag; adds a permutation band and p-value.
    #[arg(long, requires = "player", value_parser = clap::value_parser!(u64).range(100..))]
    pub permutations: Option<u64>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct FgtimeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,

    /// Keep only shots longer than this many feet.
    #[arg(long, default_value_t = 15.0, value_parser = non_negative, conflicts_with = "all_distances")]
    pub min_distance: f64,

    /// Disable the distance filter.
    #[arg(long)]
    pub all_distances: bool,

    #[arg(long, conflicts_with = "away")]
    pub home: bool,

    #[arg(long)]
    pub away: bool,

    #[arg(long, value_parser = parse_seasons)]
    pub seasons: Option<BTreeSet<i32>>,

    /// Split sequences at gaps longer than this many seconds before pairing shots.
    #[arg(long = "max-gap", value_parser = positive)]
    pub max_gap: Option<f64>,

    /// Largest bucket (whole minutes) kept in the table.
    #[arg(long, default_value_t = 15, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_gap_minutes: u32,

    /// Bucket each pair by its own gap, or each sequence by its mean gap.
    #[arg(long, value_enum, default_value_t = GapModeArg::Pair)]
    pub gap_mode: GapModeArg,

    /// Apply the distance filter to the first shot of each pair only.
    #[arg(long)]
    pub first_shot_only: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GapModeArg {
    Pair,
    SequenceAverage,
}

#[derive(Debug, Args)]
pub struct StreakyearArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,

    #[arg(long, value_parser = non_negative)]
    pub min_distance: Option<f64>,

    #[arg(long, conflicts_with = "away")]
    pub home: bool,

    #[arg(long)]
    pub away: bool,

    #[arg(long = "max-gap", value_parser = positive)]
    pub max_gap: Option<f64>,

    #[arg(long, allow_hyphen_values = true)]
    pub season_a: i32,

    #[arg(long, allow_hyphen_values = true)]
    pub season_b: i32,

    #[arg(long, default_value = "1,2", value_parser = parse_lags)]
    pub lags: Lags,

    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(2..))]
    pub min_pairs: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Bernoulli,
    Markov,
    GapCoupled,
    RelaxingMarkov,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,

    /// Make probability (bernoulli, gap-coupled).
    #[arg(long, default_value_t = 0.45, value_parser = probability)]
    pub p: f64,

    /// P(make | previous make) (markov kinds).
    #[arg(long, value_parser = probability, required_if_eq_any = [("model", "markov"), ("model", "relaxing-markov")])]
    pub a: Option<f64>,

    /// P(make | previous miss) (markov kinds).
    #[arg(long, value_parser = probability, required_if_eq_any = [("model", "markov"), ("model", "relaxing-markov")])]
    pub b: Option<f64>,

    /// Mean seconds between attempts.
    #[arg(long, default_value_t = 90.0, value_parser = positive)]
    pub mu: f64,

    /// Mean seconds to the next attempt after a make (gap-coupled).
    #[arg(long, default_value_t = 60.0, value_parser = positive)]
    pub mu_make: f64,

    /// Mean seconds to the next attempt after a miss (gap-coupled).
    #[arg(long, default_value_t = 120.0, value_parser = positive)]
    pub mu_miss: f64,

    /// Seconds over which dependence on the previous shot fades (relaxing-markov).
    #[arg(long, default_value_t = 60.0, value_parser = positive)]
    pub tau: f64,

    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub players: u64,

    /// Games per player per season.
    #[arg(long, default_value_t = 82, value_parser = clap::value_parser!(u32).range(1..))]
    pub games: u32,

    #[arg(long, default_value_t = 15.0, value_parser = positive)]
    pub shots_per_game: f64,

    #[arg(long, default_value = "2014", value_parser = parse_seasons)]
    pub seasons: BTreeSet<i32>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output CSV; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_number(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    let v = parse_number(s)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} is negative"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v = parse_number(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} is not positive"))
    }
}

fn probability(s: &str) -> Result<f64, String> {
    let v = parse_number(s)?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is not strictly between 0 and 1"))
    }
}

/// A parsed lag list; a newtype so clap treats it as one value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lags(pub Vec<usize>);

fn parse_lags(s: &str) -> Result<Lags, String> {
    hothand::parse_lags(s).map(Lags).map_err(|e| e.to_string())
}

pub fn parse_seasons(s: &str) -> Result<BTreeSet<i32>, String> {
    s.split(',')
        .map(|item| {
            let item = item.trim();
            item.parse::<i32>()
                .map_err(|_| format!("`{item}` is not a season year"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn seasons_list() {
        assert_eq!(
            parse_seasons("2015, 2014").unwrap(),
            BTreeSet::from([2014, 2015])
        );
        assert!(parse_seasons("2014,").is_err());
    }

    #[test]
    fn home_and_away_conflict() {
        let res = Cli::try_parse_from([
            "hothand",
            "correlogram",
            "--input",
            "x.csv",
            "--home",
            "--away",
        ]);
        assert!(res.is_err());
    }

    #[test]
    fn max_gap_repeats() {
        let cli = Cli::try_parse_from([
            "hothand",
            "correlogram",
            "--input",
            "x.csv",
            "--max-gap",
            "60",
            "--max-gap",
            "300",
        ])
        .unwrap();
        let Command::Correlogram(args) = cli.command else {
            panic!()
        };
        assert_eq!(args.max_gap, vec![60.0, 300.0]);
        assert_eq!(args.lags.0, (0..=10).collect::<Vec<_>>());
    }

    #[test]
    fn markov_needs_both_probabilities() {
        assert!(
            Cli::try_parse_from(["hothand", "simulate", "--model", "markov", "--a", "0.6"])
                .is_err()
        );
        assert!(Cli::try_parse_from([
            "hothand", "simulate", "--model", "markov", "--a", "1.2", "--b", "0.4"
        ])
        .is_err());
        assert!(Cli::try_parse_from([
            "hothand", "simulate", "--model", "markov", "--a", "0.6", "--b", "0.4"
        ])
        .is_ok());
    }

    #[test]
    fn permutations_need_a_player() {
        assert!(Cli::try_parse_from([
            "hothand",
            "correlogram",
            "--input",
            "x.csv",
            "--permutations",
            "200",
        ])
        .is_err());
    }
}
