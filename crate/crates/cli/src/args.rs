use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use qsera::{IterationRule, OracleKind, RescaleMode};

#[derive(Debug, Parser)]
#[command(
    name = "qsera",
    version,
    about = "Grover search for extrema and roots of discrete objectives"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one search and print the result as JSON.
    Run(RunArgs),
    /// Probability of the optimum as a function of the power n (CSV `n,probability`).
    SweepN(SweepArgs),
    /// Coefficients of f, its rescaling g and the oracle polynomial g^n.
    Expand(ExpandArgs),
    /// Single marked state with an ideal oracle: simulation next to the recursion.
    GroverDemo(DemoArgs),
    /// Return, volatility and objective value of every asset selection.
    PortfolioScan(ScanArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Built-in problem (`paper-portfolio`).
    #[arg(long)]
    pub preset: Option<String>,
    /// JSON config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct Overrides {
    /// Rescaling mode: min, max or root.
    #[arg(long)]
    pub mode: Option<RescaleMode>,
    /// Grover iterations: auto-floor, auto-ceil or a count.
    #[arg(long)]
    pub iterations: Option<IterationRule>,
    /// Oracle backend: circuit or exact.
    #[arg(long)]
    pub oracle: Option<OracleKind>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub overrides: Overrides,
    /// Power n of the oracle polynomial.
    #[arg(long)]
    pub n: Option<u32>,
    /// Sample this many measurements from the final distribution.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file (defaults to stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Include the final statevector in the JSON output.
    #[arg(long)]
    pub dump_state: bool,
    /// Also write the distribution as CSV `bitstring,probability`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub overrides: Overrides,
    #[arg(long, default_value_t = 1)]
    pub n_min: u32,
    #[arg(long, default_value_t = 100)]
    pub n_max: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long)]
    pub mode: Option<RescaleMode>,
    #[arg(long)]
    pub n: Option<u32>,
    /// Print a plain-text coefficient table instead of JSON.
    #[arg(long)]
    pub table: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    /// Register size.
    #[arg(long)]
    pub k: usize,
    /// Marked state.
    #[arg(long)]
    pub target: usize,
    /// Iterations (defaults to the rounded-down optimum).
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
