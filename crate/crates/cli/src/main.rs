use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

/// Support-constrained sum-rank codes and distributed network code design.
#[derive(Debug, Parser)]
#[command(name = "lrsnet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the zero-pattern condition for a pattern file.
    Check {
        pattern: PathBuf,
        /// Code length; defaults to the largest column in the pattern.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Synthesize a code whose generator meets a zero pattern.
    Construct(ConstructArgs),
    /// Design source lengths and a distributed code for a network instance.
    Design(DesignArgs),
    /// Monte-Carlo simulation of the adversarial network for a design.
    Simulate(SimulateArgs),
    /// Reproduce the parameter tables for the four-message toy network.
    Tables {
        /// Largest block count in the sweep.
        #[arg(long, default_value_t = 4)]
        ell: usize,
    },
}

#[derive(Debug, Args)]
struct ConstructArgs {
    pattern: PathBuf,
    #[arg(long)]
    n: Option<usize>,
    /// Base field size; chosen from the block count when omitted.
    #[arg(long)]
    q: Option<u64>,
    /// Extension degree; chosen from the dimension when omitted.
    #[arg(long)]
    m: Option<u32>,
    /// Number of blocks, split as evenly as possible.
    #[arg(long, default_value_t = 1, conflicts_with = "parts")]
    ell: usize,
    /// Explicit block lengths, comma separated.
    #[arg(long, value_delimiter = ',')]
    parts: Option<Vec<usize>>,
    /// Fall back to the first rows of a higher-dimensional code when the condition fails.
    #[arg(long)]
    subcode: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = lrsnet::construct::DEFAULT_BUDGET)]
    budget: usize,
    /// Write the code record here (JSON, or CSV when the name ends in .csv).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DesignArgs {
    instance: PathBuf,
    /// Override the block count from the instance.
    #[arg(long)]
    ell: Option<usize>,
    /// Sweep the block count from 1 to this value and print a table.
    #[arg(long)]
    table: Option<usize>,
    /// Skip code synthesis.
    #[arg(long)]
    params_only: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    design: PathBuf,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check { pattern, n } => commands::check(&pattern, n),
        Command::Construct(args) => commands::construct(&args),
        Command::Design(args) => commands::design(&args),
        Command::Simulate(args) => commands::simulate(&args),
        Command::Tables { ell } => commands::tables(ell),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {:#}", err.inner);
            ExitCode::from(err.code)
        }
    }
}
