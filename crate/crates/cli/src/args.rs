use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use synthbh::{Mode, SynthNull};

#[derive(Debug, Parser)]
#[command(name = "synthbh", version, about = "Synthetic-powered FDR control")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run SynthBH on a CSV of real and synthetic-pooled p-values.
    Test(TestArgs),
    /// Conformal outlier detection from calibration and test scores.
    Outliers(OutlierArgs),
    /// Monte Carlo FDR and power experiments.
    Simulate(SimulateArgs),
    /// Time the fast and naive step-up paths.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Naive,
    #[default]
    Fast,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Naive => Mode::Naive,
            ModeArg::Fast => Mode::Fast,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct LevelArgs {
    /// Target FDR level.
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    /// Admission cost for using synthetic data.
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
}

#[derive(Debug, Clone, Args)]
pub struct TestArgs {
    /// CSV with columns id,p_real,p_synth and an optional weight column.
    #[arg(long, short)]
    pub input: PathBuf,
    #[command(flatten)]
    pub levels: LevelArgs,
    /// CSV with a weight column (and optionally id), one row per hypothesis.
    #[arg(long)]
    pub weights_file: Option<PathBuf>,
    /// Rescale weights to sum to m instead of rejecting other sums.
    #[arg(long)]
    pub normalize_weights: bool,
    #[arg(long, value_enum, default_value_t)]
    pub mode: ModeArg,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct OutlierArgs {
    /// CSV with columns role,score where role is real, synth or test.
    #[arg(long, conflicts_with_all = ["real", "synth", "test"])]
    pub scores: Option<PathBuf>,
    /// CSV with a score column of real calibration scores.
    #[arg(long, requires = "test")]
    pub real: Option<PathBuf>,
    /// CSV with a score column of synthetic or auxiliary scores.
    #[arg(long)]
    pub synth: Option<PathBuf>,
    /// CSV with a score column of test scores.
    #[arg(long, requires = "real")]
    pub test: Option<PathBuf>,
    #[command(flatten)]
    pub levels: LevelArgs,
    /// Fraction of the largest synthetic scores to drop.
    #[arg(long, default_value_t = 0.0)]
    pub rho: f64,
    /// Add seeded tie-breaking noise to every score.
    #[arg(long)]
    pub jitter: bool,
    /// Seed for the jitter noise.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t)]
    pub mode: ModeArg,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    #[default]
    Bernoulli,
    Outlier,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value_t)]
    pub experiment: Experiment,
    /// Real samples per hypothesis (bernoulli) or calibration scores (outlier).
    #[arg(long)]
    pub n_real: Option<u64>,
    /// Synthetic samples per hypothesis or auxiliary scores.
    #[arg(long)]
    pub n_synth: Option<u64>,
    /// Number of hypotheses or test points.
    #[arg(long)]
    pub m: Option<usize>,
    /// Fraction of alternatives (bernoulli).
    #[arg(long)]
    pub frac_alt: Option<f64>,
    /// Success probability of real alternatives.
    #[arg(long)]
    pub q_alt: Option<f64>,
    /// Success probability of synthetic nulls, or `mirror-alt`.
    #[arg(long)]
    pub q_synth_null: Option<SynthNull>,
    /// Success probability of synthetic alternatives.
    #[arg(long)]
    pub q_synth_alt: Option<f64>,
    /// Fraction of outliers among test points (outlier).
    #[arg(long)]
    pub outlier_frac: Option<f64>,
    /// Fraction of outliers in the auxiliary scores (outlier).
    #[arg(long)]
    pub contamination: Option<f64>,
    /// Trimming fraction for auxiliary scores (outlier).
    #[arg(long)]
    pub rho: Option<f64>,
    /// Mean score of outliers (outlier).
    #[arg(long)]
    pub mu_out: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Master seed; drawn from entropy and reported when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Parameter sweep, `name=start:stop:step` or `name=v1,v2,...`.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Directory for trials.csv, summary.csv and summary.json.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Format of the summary printed to stdout.
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Comma-separated problem sizes.
    #[arg(long, value_delimiter = ',', default_value = "1000,100000,1000000")]
    pub sizes: Vec<usize>,
    /// Largest size at which the naive path is also timed.
    #[arg(long, default_value_t = 20_000)]
    pub naive_max: usize,
    /// Timings per size; the minimum is reported.
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}
