//! `graph-al`: run active-learning experiments from a config file.
//!
//! Exit status 0 on success, 1 when a run or an output write fails, 2 on
//! usage, config or dataset errors.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, config or input files.
    Usage(String),
    /// Failure while running or writing results.
    Runtime(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "graph-al", version, about = "Active-learning experiments on node-classification graphs")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Experiment config (TOML), or a manifest.json from an earlier run.
    #[arg(long)]
    pub config: PathBuf,
    /// Strategy name; repeat for several, `all` for the whole registry.
    #[arg(long)]
    pub strategy: Vec<String>,
    /// Repetitions under the fraction-budget protocol.
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory; overrides `[output] dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write `ranks.csv` next to the curves.
    #[arg(long)]
    pub dump_ranks: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run one strategy.
    Run(RunArgs),
    /// Run every configured strategy on shared seeds.
    Sweep(RunArgs),
    /// Mean distance from unsampled nodes to a random sample, per fraction.
    AnalyzeDistance {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Load a dataset directory and compare it with the registry.
    Validate {
        dir: PathBuf,
        /// Registry name; defaults to the directory name.
        #[arg(long)]
        name: Option<String>,
    },
    /// Write a planted-partition graph as a dataset directory.
    GenSbm {
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated block sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        blocks: Vec<usize>,
        #[arg(long)]
        p_within: f64,
        #[arg(long)]
        p_between: f64,
        #[arg(long)]
        directed: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();

    let result = match cli.command {
        Command::Run(args) => commands::run(&args, false),
        Command::Sweep(args) => commands::run(&args, true),
        Command::AnalyzeDistance { config, seed, out } => commands::analyze_distance(&config, seed, out),
        Command::Validate { dir, name } => commands::validate(&dir, name),
        Command::GenSbm {
            out,
            blocks,
            p_within,
            p_between,
            directed,
            seed,
        } => commands::gen_sbm(&out, blocks, p_within, p_between, directed, seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
