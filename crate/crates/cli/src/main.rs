//! `peg`: generate partially erased graphs, run the testers and estimators
//! over seeded trials, and query the exact oracles.
//!
//! Exit codes: 0 success, 1 a `--self-check` found a violation, 2 usage,
//! input or infeasible-parameter error.

mod bench;
mod exact_cmd;
mod gen;
mod output;
mod trials;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use peg_core::{parse_rational, Rational};

#[derive(Parser, Debug)]
#[command(name = "peg", version, about = "Sublinear algorithms on partially erased graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate an instance as a PEG file plus a JSON manifest.
    Gen(gen::GenArgs),
    /// Erase entries of an erasure-free PEG file.
    Erase(gen::EraseArgs),
    /// Run a connectedness tester over repeated trials.
    TestConn(trials::TestConnArgs),
    /// Run the average-degree estimator over repeated trials.
    Estimate(trials::EstimateArgs),
    /// Exact brute-force quantities of a small graph.
    Exact(exact_cmd::ExactArgs),
    /// Sweep one parameter and emit one CSV row per trial.
    Bench(bench::BenchArgs),
}

/// Flags shared by the trial-running subcommands.
#[derive(Args, Debug, Clone)]
pub struct RunFlags {
    /// Master seed; trial `i` uses `split(seed, i)`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Also write the summary as JSON to this file.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Worker threads (default: all cores). Output order does not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Record per-trial wall time. Makes output nonreproducible.
    #[arg(long)]
    pub timing: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Parses `p/q`, an integer or a decimal.
pub fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// Result of a subcommand that ran to completion.
pub enum Status {
    Ok,
    Violations(usize),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen::run_gen(&a),
        Command::Erase(a) => gen::run_erase(&a),
        Command::TestConn(a) => trials::run_test_conn(&a),
        Command::Estimate(a) => trials::run_estimate(&a),
        Command::Exact(a) => exact_cmd::run_exact(&a),
        Command::Bench(a) => bench::run_bench(&a),
    };
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Violations(k)) => {
            eprintln!("self-check: {k} violation(s)");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
