//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ecplan_core::Scheme;

#[derive(Debug, Parser)]
#[command(
    name = "ecplan",
    version,
    about = "Plan and compare replication and erasure-coding schemes"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Significant figures for numbers in table output.
    #[arg(long, global = true, default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=17))]
    pub precision: u8,
    /// Seed for every random choice the command makes.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for simulations (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub threads: Option<u32>,
    /// Exit nonzero when a simulation disagrees with the analytic value (|z| > 4).
    #[arg(long, global = true)]
    pub check: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Smallest replica count or parity count that meets a loss target.
    Plan(PlanArgs),
    /// Side-by-side comparison of schemes.
    Compare(CompareArgs),
    /// Monte Carlo estimate next to its analytic value.
    Simulate(SimulateArgs),
    /// Encode, decode, or report on erasure-coded fragments.
    #[command(subcommand)]
    Codec(CodecCommand),
    /// Comparison rows over a sweep of one parameter.
    Curve(CurveArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlanMode {
    Replication,
    Ec,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long, value_enum)]
    pub mode: PlanMode,
    /// Acceptable loss probability.
    #[arg(long)]
    pub epsilon: f64,
    /// Per-disk failure probability.
    #[arg(long)]
    pub p: f64,
    /// Data fragments (ec mode).
    #[arg(long, required_if_eq("mode", "ec"))]
    pub m: Option<u32>,
    /// Largest parity count the ec solver tries.
    #[arg(long, default_value_t = ecplan_core::prob::DEFAULT_PARITY_CAP)]
    pub cap: u32,
}

/// Parameters shared by `compare` and `curve`.
#[derive(Debug, Clone, Args)]
pub struct ScenarioArgs {
    /// Per-disk failure probability.
    #[arg(long, default_value_t = 0.005)]
    pub p: f64,
    /// Loss target; adds a meets_target column.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Data centers the fragments are spread over.
    #[arg(long, default_value_t = 3)]
    pub dcs: usize,
    /// Probability that a data center is unreachable.
    #[arg(long, default_value_t = 0.0)]
    pub q: f64,
    /// Per-disk unavailability (defaults to --p).
    #[arg(long)]
    pub p_unavail: Option<f64>,
    /// Site latencies, nearest first, e.g. 1,100.
    #[arg(long, value_delimiter = ',')]
    pub latency: Option<Vec<f64>>,
    /// Replicated latency averaged over served requests only.
    #[arg(long)]
    pub conditional: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Schemes to compare, e.g. rep:3,ec:8+3,lrc:6+2+2,hybrid:2x4+1.
    #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "rep:3,ec:8+3")]
    pub schemes: Vec<Scheme>,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(subcommand)]
    pub scenario: SimScenario,
    /// Number of trials.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub trials: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LatencyKind {
    Replication,
    Ec,
}

#[derive(Debug, Subcommand)]
pub enum SimScenario {
    /// More than n of m+n disks dead.
    Loss {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
    },
    /// Object unreadable under data-center outages and disk unavailability.
    Availability {
        #[arg(long)]
        scheme: Scheme,
        #[arg(long, default_value_t = 3)]
        dcs: usize,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        p_unavail: f64,
    },
    /// Read latency with failover to farther sites.
    Latency {
        #[arg(long, value_enum)]
        mode: LatencyKind,
        #[arg(long)]
        p: f64,
        /// Site latencies, nearest first.
        #[arg(long, value_delimiter = ',', default_value = "1,100")]
        latency: Vec<f64>,
        /// Fragments read from the nearest site (ec mode).
        #[arg(long, required_if_eq("mode", "ec"))]
        m: Option<u32>,
    },
}

#[derive(Debug, Subcommand)]
pub enum CodecCommand {
    /// Split a file into fragment files.
    Encode {
        #[arg(long)]
        input: PathBuf,
        /// Directory for the fragment files (created if missing).
        #[arg(long)]
        out_dir: PathBuf,
        /// rs:M+N (alias ec:M+N) or lrc-6-2-2.
        #[arg(long)]
        scheme: Scheme,
    },
    /// Rebuild a file from fragment files.
    Decode {
        /// Fragment files, or directories holding them.
        #[arg(required = true)]
        fragments: Vec<PathBuf>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Exhaustive recoverability by number of failed fragments.
    Report {
        #[arg(long)]
        scheme: Scheme,
        #[arg(long, default_value_t = 4)]
        max_t: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    /// Per-disk failure probability.
    P,
    /// Data fragments of every ec scheme.
    M,
    /// Parity fragments of every ec scheme.
    N,
    /// Data-center outage probability.
    Q,
    /// Multiplier k turning ec:M+N into ec:kM+kN.
    Scale,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long = "x", value_enum)]
    pub axis: Axis,
    /// Explicit sweep points.
    #[arg(
        long,
        value_delimiter = ',',
        conflicts_with = "range",
        required_unless_present = "range"
    )]
    pub values: Option<Vec<f64>>,
    /// START:END for integer axes, START:END:COUNT (log spaced) for p and q.
    #[arg(long)]
    pub range: Option<String>,
    #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "rep:3,ec:8+3")]
    pub schemes: Vec<Scheme>,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
}
