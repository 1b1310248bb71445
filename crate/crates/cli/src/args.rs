use std::path::PathBuf;

use arboreal::enumeration::DEFAULT_ENUMERATION_CAP;
use arboreal::statistics::DEFAULT_K_MAX;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exact recursions, enumeration and sampling for the arboreal gas on wired
/// d-ary trees.
///
/// Exit codes: 0 success, 1 a verification check failed, 2 usage or
/// configuration error.
#[derive(Debug, Parser)]
#[command(name = "arboreal", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate Z^S, Z^x, K, q and the block kernels for m = 0..n.
    Recursion(RecursionArgs),
    /// Brute-force the partition functions over every forest.
    Enumerate(EnumerateArgs),
    /// Draw replicas as NDJSON, or stream them through a statistic.
    Sample(SampleArgs),
    /// Run a verification suite and print a JSON report.
    Verify(VerifyArgs),
    /// Summarize NDJSON produced by `sample`.
    Stats(StatsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct RecursionArgs {
    #[arg(long)]
    pub d: u32,
    /// Edge probability: "a/b" in exact mode, "a/b" or a decimal in float mode.
    #[arg(long)]
    pub p: String,
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub d: u32,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub p: String,
    /// Largest edge count enumerated.
    #[arg(long, env = "ARBOREAL_ENUM_CAP", default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: u32,
    /// Add the probability of every forest.
    #[arg(long)]
    pub dump_measure: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SampleKind {
    /// Exact law on the wired tree of depth n.
    Finite,
    /// Limiting law on a window of the infinite tree.
    Limit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    States,
    Forest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StreamStat {
    /// Edge totals by state and one-endedness violations.
    Edges,
    /// Histogram of finite-cluster sizes.
    Clusters,
    /// Finite-cluster sizes against the critical Galton-Watson law.
    Gw,
    /// Root-to-boundary frequency (finite only).
    Survival,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(value_enum)]
    pub kind: SampleKind,
    #[arg(long)]
    pub d: u32,
    /// Depth: n of the wired tree, or the window depth.
    #[arg(long, visible_alias = "depth")]
    pub n: u32,
    #[arg(long)]
    pub p: String,
    #[arg(long, default_value_t = 1)]
    pub replicas: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `forest` adds the decoded open/closed bit string to every record.
    #[arg(long, value_enum, default_value_t = Emit::States)]
    pub emit: Emit,
    /// Worker threads; output does not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Generate depth-first without materializing replicas. Needs --stats.
    #[arg(long)]
    pub stream: bool,
    #[arg(long, value_enum)]
    pub stats: Option<StreamStat>,
    #[command(flatten)]
    pub clusters: ClusterArgs,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ClusterArgs {
    /// Sizes above this share the tail bin.
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    pub k_max: usize,
    /// Deepest level at which collection sites are taken; default all.
    #[arg(long)]
    pub site_level: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Recursion,
    Kernels,
    Pushforward,
    SamplerGof,
    Gw,
    Bernoulli,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long, visible_alias = "depth")]
    pub n: Option<u32>,
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long)]
    pub replicas: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, env = "ARBOREAL_ENUM_CAP", default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: u32,
    /// Largest total progeny compared in the `gw` suite.
    #[arg(long, default_value_t = 30)]
    pub k_max: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Report {
    Survival,
    Clusters,
    Gw,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// NDJSON from `sample`; `-` reads standard input.
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub report: Report,
    #[command(flatten)]
    pub clusters: ClusterArgs,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}
