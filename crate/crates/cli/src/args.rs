use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "maxvolkit", version, about = "Maximal-volume submatrix selection and its applications")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Square maxvol on the rows of a tall matrix
    Maxvol(MaxvolArgs),
    /// Rectangular maxvol on the rows of a tall matrix
    Rectmaxvol(RectArgs),
    /// Pseudo-skeleton (CUR) approximation
    Cur(CurArgs),
    /// Maximal-element search in random low-rank matrices
    Maxelem(MaxelemArgs),
    /// Preconditioning of an overdetermined least-squares problem
    Precond(PrecondArgs),
    /// Representative users or items of a ratings file
    Recsys(RecsysArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Square,
    Rect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodOrBoth {
    Square,
    Rect,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SideArg {
    Users,
    Items,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    Csv,
    Dat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Coverage,
    Diversity,
}

#[derive(Debug, Args, Serialize)]
pub struct MaxvolArgs {
    /// Matrix Market file with N >= r
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = maxvolkit::maxvol::DEFAULT_EPS)]
    pub eps: f64,
    /// Swap budget, 10 r by default
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Write the JSON report here instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct RectArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = maxvolkit::rect_maxvol::DEFAULT_TAU)]
    pub tau: f64,
    #[arg(long)]
    pub min_k: Option<usize>,
    #[arg(long)]
    pub max_k: Option<usize>,
    /// Use unit rows instead of projector rows for the selected coefficients
    #[arg(long)]
    pub identity_hat: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CurArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub rank: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Rect)]
    pub method: MethodArg,
    #[arg(long, default_value_t = maxvolkit::rect_maxvol::DEFAULT_TAU)]
    pub tau: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct MaxelemArgs {
    #[arg(long)]
    pub rank: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Trial t draws from the generator seeded with seed + t
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = MethodOrBoth::Both)]
    pub method: MethodOrBoth,
    #[arg(long, default_value_t = maxvolkit::rect_maxvol::DEFAULT_TAU)]
    pub tau: f64,
    /// Histogram bins over [0, 1]
    #[arg(long, default_value_t = 10)]
    pub bins: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct PrecondArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodOrBoth::Both)]
    pub method: MethodOrBoth,
    #[arg(long, default_value_t = maxvolkit::rect_maxvol::DEFAULT_TAU)]
    pub tau: f64,
    /// Right-hand side as an N x 1 Matrix Market file
    #[arg(long)]
    pub rhs: Option<PathBuf>,
    /// Include wall-clock times; the report is then no longer reproducible
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct RecsysArgs {
    #[arg(long)]
    pub ratings: PathBuf,
    /// Defaults to dat for *.dat files and csv otherwise
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = SideArg::Items)]
    pub side: SideArg,
    #[arg(long, value_enum, default_value_t = MethodArg::Rect)]
    pub method: MethodArg,
    #[arg(long, default_value_t = maxvolkit::rect_maxvol::DEFAULT_TAU)]
    pub tau: f64,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Metric::Coverage, Metric::Diversity])]
    pub metrics: Vec<Metric>,
    /// Held-out ratings; without it a seeded per-user split of --ratings is used
    #[arg(long)]
    pub test: Option<PathBuf>,
    #[arg(long)]
    pub precision_at: Option<usize>,
    #[arg(long, default_value_t = maxvolkit::recsys::DEFAULT_GOOD_THRESHOLD)]
    pub good_threshold: f64,
    #[arg(long, default_value_t = 0.2)]
    pub test_fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}
