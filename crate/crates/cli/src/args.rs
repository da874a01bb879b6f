use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "hmr",
    version,
    about = "Hyperbox mixture regression for culture time series"
)]
pub struct Cli {
    /// Print machine-readable JSON instead of text tables.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic culture dataset.
    Synth(SynthArgs),
    /// Fit a model on a culture file and save it.
    Train(TrainArgs),
    /// Predict with one model, or a chain of two for horizon 2.
    Predict(PredictArgs),
    /// Culture-grouped k-fold cross-validation.
    Cv(CvArgs),
    /// Grid search over θ with grouped cross-validation.
    Tune(TuneArgs),
    /// Correlation ranking, forward selection and consensus per outer fold.
    Featsel(FeatselArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Generator {
    /// Fed-batch culture simulation with 23 process parameters.
    Culture,
    /// Two-variable benchmark with piecewise-linear dynamics.
    Piecewise,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 106, value_parser = clap::value_parser!(u64).range(1..=100_000))]
    pub cultures: u64,
    #[arg(long, default_value_t = 15, value_parser = clap::value_parser!(u64).range(3..=10_000))]
    pub days: u64,
    /// Relative observation noise (absolute for the piecewise generator).
    #[arg(long, default_value_t = 0.02)]
    pub noise: f64,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Generator::Culture)]
    pub generator: Generator,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Missing {
    /// Fail on empty or `NA` cells.
    Reject,
    /// Fill from the previous day of the same culture.
    CarryForward,
}

/// Dataset and windowing options shared by the modelling commands.
#[derive(Debug, Args)]
pub struct DataArgs {
    /// Long-format culture CSV.
    #[arg(long)]
    pub data: PathBuf,
    /// Parameter to forecast.
    #[arg(long)]
    pub target: String,
    /// Comma-separated input parameters; all parameters when omitted.
    #[arg(long, value_delimiter = ',')]
    pub features: Vec<String>,
    /// Days ahead: 1, or 2 for the chained model.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub horizon: u8,
    #[arg(long, value_enum, default_value_t = Missing::Reject)]
    pub missing: Missing,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Expansion coefficient.
    #[arg(long, default_value_t = 0.3)]
    pub theta: f64,
    /// Winners tested for expansion per sample.
    #[arg(long, default_value_t = 3)]
    pub top_k: usize,
    /// Fraction of dimensions that must satisfy the expansion bound.
    #[arg(long, default_value_t = 0.6)]
    pub expansion_fraction: f64,
    /// Membership sensitivity, used for every dimension.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Seed for the fold assignment.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Worker threads; 0 uses all cores, 1 runs serially.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Include wall-clock fit times in reports.
    #[arg(long)]
    pub timings: bool,
    /// Also write the report to this file.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Model file to write.
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Day-ahead model.
    #[arg(long)]
    pub model: PathBuf,
    /// Second model of the chain; required for horizon 2.
    #[arg(long)]
    pub model2: Option<PathBuf>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub horizon: u8,
    #[arg(long, value_enum, default_value_t = Missing::Reject)]
    pub missing: Missing,
    /// Predictions CSV to write.
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct CvArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// Tune θ inside each training fold over `--grid` instead of using `--theta`.
    #[arg(long)]
    pub nested: bool,
    /// θ candidates for `--nested`.
    #[arg(long, value_delimiter = ',', default_values_t = default_grid())]
    pub grid: Vec<f64>,
    /// Inner folds for `--nested`.
    #[arg(long, default_value_t = 5)]
    pub inner_folds: usize,
    /// Also cross-validate a global linear model on the same folds.
    #[arg(long)]
    pub baseline: bool,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long, value_delimiter = ',', default_values_t = default_grid())]
    pub grid: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct FeatselArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value_t = 0.7)]
    pub theta: f64,
    #[arg(long, default_value_t = 3)]
    pub top_k: usize,
    #[arg(long, default_value_t = 0.6)]
    pub expansion_fraction: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long, default_value_t = 5)]
    pub inner_folds: usize,
    /// Folds a feature must be selected in to enter the consensus.
    #[arg(long, default_value_t = 3)]
    pub min_folds: usize,
}

fn default_grid() -> Vec<f64> {
    hmr_core::selection::GridSpec::default_grid()
        .values()
        .to_vec()
}
