//! `qpar`: build functions, measure them, solve and simulate parallel query
//! algorithms, evaluate adversary witnesses, and run verification suites.
//!
//! Exit codes: 0 success (every checked case passed), 1 failure, 2 usage.

mod cache;
mod commands;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "qpar", version, about = "Parallel query complexity workbench")]
pub struct Cli {
    /// Master seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build or inspect function descriptors.
    #[command(subcommand)]
    Fn(FnCommand),
    /// CSV of certificate complexity, block sensitivity and spectral sensitivity.
    Measure(MeasureArgs),
    /// Exact parallel decision-tree depth.
    #[command(subcommand)]
    Dtree(DtreeCommand),
    /// Statevector simulation.
    #[command(subcommand)]
    Sim(SimCommand),
    /// Adversary witness lower bounds.
    #[command(subcommand)]
    Adv(AdvCommand),
    /// Run a verification suite (`list` shows them, `all` runs every one).
    Verify(VerifyArgs),
    /// Combine JSON-lines reports.
    #[command(subcommand)]
    Report(ReportCommand),
}

#[derive(Subcommand, Debug)]
pub enum FnCommand {
    /// Descriptor for a registered generator, e.g. `fn build and-or --blocks 2 --block-size 2`.
    Build {
        generator: String,
        /// Write a truth table instead of the generator record.
        #[arg(long)]
        table: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Generator parameters as `--name value`.
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        params: Vec<String>,
    },
    /// Summary of a descriptor file.
    Show { file: PathBuf },
}

#[derive(Args, Debug)]
pub struct MeasureArgs {
    /// Descriptor files.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum GranularityArg {
    Bit,
    Block,
}

#[derive(Subcommand, Debug)]
pub enum DtreeCommand {
    /// Minimum number of p-parallel query rounds.
    Solve {
        #[arg(long = "fn")]
        file: PathBuf,
        #[arg(long)]
        p: usize,
        #[arg(long, value_enum, default_value_t = GranularityArg::Bit)]
        granularity: GranularityArg,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ProgramArg {
    Grover,
    Forrelation,
    Dj,
}

#[derive(Subcommand, Debug)]
pub enum SimCommand {
    /// Runs a built-in program and prints the outcome distribution as CSV.
    Quantum {
        #[arg(long, value_enum)]
        program: ProgramArg,
        /// Input length for Grover and DJ; table size exponent for Forrelation.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value_t = 1)]
        rounds: usize,
        /// Input as a 0/1 string, bit 0 first.
        #[arg(long)]
        input: String,
        /// Print sampled outcome counts instead of the exact distribution.
        #[arg(long)]
        shots: Option<usize>,
        /// Write the per-gate JSON-lines trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum WitnessArg {
    Adjacency,
    Symmetric,
    Tensor,
}

#[derive(Subcommand, Debug)]
pub enum AdvCommand {
    /// ‖Γ‖ / max_{|S|=p} ‖Γ_S‖ for a constructed witness.
    Ratio {
        #[arg(long = "fn")]
        file: PathBuf,
        /// Second component for `--witness tensor` (the witness is for COR(fn, fn2)).
        #[arg(long = "fn2")]
        file2: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = WitnessArg::Adjacency)]
        witness: WitnessArg,
        #[arg(long)]
        p: usize,
        /// Write the witness matrix as CSV.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// √(⌈C0/p⌉·⌈C1/p⌉), the cap on the combinatorial bound.
    Barrier {
        #[arg(long = "fn")]
        file: PathBuf,
        #[arg(long)]
        p: usize,
    },
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub suite: String,
    /// Write the JSON-lines records here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write tidy long-format CSV for plotting.
    #[arg(long)]
    pub csv_for_plot: Option<PathBuf>,
    /// Suite grid parameters as `--name value`.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
    pub grid: Vec<String>,
}

#[derive(Subcommand, Debug)]
pub enum ReportCommand {
    /// Merge JSON-lines files into one canonical report.
    Merge {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.downcast_ref::<commands::Usage>().is_some() { 2 } else { 1 })
        }
    }
}
