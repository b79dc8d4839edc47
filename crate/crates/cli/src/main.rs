//! `stefan-lab`: constants verification, single solves and ε-sweeps from a TOML config.

// Negated comparisons are deliberate: they reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod checks;
mod config;
mod error;
mod output;
mod solve;
mod sweep;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{Resolved, RunConfig};
use crate::error::CliError;

#[derive(Parser)]
#[command(
    name = "stefan-lab",
    version,
    about = "Numerical lab for the two-phase Stefan problem"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the iteration constants and check their recursions.
    VerifyConstants(RunArgs),
    /// Solve once and run the configured checks on the solution.
    Solve(RunArgs),
    /// Solve for every width in `experiments.eps_list` and compare.
    Sweep(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `experiments.out`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed; overrides `experiments.seed`.
    #[arg(long)]
    seed: Option<u64>,
}

impl RunArgs {
    fn resolve(&self) -> Result<Resolved, CliError> {
        let (config, base) = RunConfig::load(&self.config)?;
        config.resolve(&base, self.out.clone(), self.seed)
    }
}

fn thread_pool() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("STEFAN_LAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        CliError::Config(format!(
            "STEFAN_LAB_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot size the thread pool: {e}")))
}

fn run(cli: Cli) -> Result<u8, CliError> {
    thread_pool()?;
    match cli.command {
        Command::VerifyConstants(args) => verify::run(&args.resolve()?),
        Command::Solve(args) => solve::run(&args.resolve()?),
        Command::Sweep(args) => sweep::run(&args.resolve()?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("stefan-lab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
