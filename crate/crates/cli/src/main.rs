//! `flexstop`: solve, benchmark and simulate optimal stopping problems on
//! finite Markov chains.

mod commands;
mod error;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "flexstop", version, about = "Forward improvement iteration for Markovian optimal stopping")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the optimal stopping set and its value.
    Solve(SolveArgs),
    /// Time full runs over a sweep of constant window sizes.
    Bench(BenchArgs),
    /// Monte Carlo estimate of a stopping rule's value.
    Simulate(SimulateArgs),
    /// Write a grid model as a JSON model file.
    Gridgen(GridgenArgs),
}

#[derive(Args, Clone)]
pub struct ModelArgs {
    /// JSON model file.
    #[arg(long, conflicts_with = "grid", required_unless_present = "grid")]
    pub model: Option<PathBuf>,
    /// JSON grid specification.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    /// Candidate stopping set: `all` or comma-separated states.
    #[arg(long)]
    pub initial_set: Option<String>,
    /// Window schedule: `k`, `k1,k2,...` or `D:{1,3};{1,2}`.
    #[arg(long, default_value = "1")]
    pub kappa: String,
    /// Use Jacobi sweeps with this step tolerance instead of sparse LU.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Comma-separated constant window sizes.
    #[arg(long, default_value = "1,2,5,10")]
    pub sweep: String,
    /// Repetitions per window size.
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Start state (index or label).
    #[arg(long)]
    pub start: String,
    /// `stop`, `F` (first entrance into the solved stopping set) or
    /// `set:<states>` (first entrance into the given states).
    #[arg(long, default_value = "F")]
    pub rule: String,
    #[arg(long, default_value_t = 10_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Path length cap; defaults to a discount-based horizon.
    #[arg(long)]
    pub horizon: Option<usize>,
}

#[derive(Args)]
pub struct GridgenArgs {
    /// JSON grid specification.
    #[arg(long)]
    pub grid: PathBuf,
    /// Model file to write.
    #[arg(long)]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Solve(args) => commands::solve(&args),
        Command::Bench(args) => commands::bench(&args),
        Command::Simulate(args) => commands::simulate(&args),
        Command::Gridgen(args) => commands::gridgen(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
