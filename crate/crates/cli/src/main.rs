//! `fracmus`: batch driver for the verification suites, the mountain-pass
//! solver and the convergence studies.
//!
//! Exit codes: 0 ok, 1 failed checks, 2 configuration error, 3 geometry
//! failure, 4 non-convergence, 5 numerical or i/o failure.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::RunConfig;
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "fracmus", version, about = "Fractional Musielak-space toolkit")]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output` in the config; default `.`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized suites (overrides `seed` in the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Treat a non-convex `t ↦ Φ_x(√t)` as a configuration error.
    #[arg(long, global = true, value_enum, default_value_t = StrictConvexity::Warn)]
    strict_convexity: StrictConvexity,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrictConvexity {
    Warn,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Operator {
    IntegralLeft,
    IntegralRight,
    RlLeft,
    RlRight,
    HilferLeft,
    HilferRight,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the inequality checks and write verify.csv.
    Verify,
    /// Solve the boundary value problem; writes solution.csv and diagnostics.csv.
    Solve,
    /// Grid-refinement study; writes study.csv.
    Study,
    /// Print the modular, Luxemburg norm, seminorm and K-norm of a `t,u` CSV.
    Norm {
        #[arg(long)]
        input: PathBuf,
    },
    /// Apply a fractional operator to a `t,u` CSV; writes fracop.csv.
    Fracop {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        op: Operator,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let path = cli.config.ok_or_else(|| CliError::Config("--config is required".into()))?;
    let mut cfg = RunConfig::load(&path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out = cli.out.or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("."));
    match cli.command {
        Command::Verify => commands::verify(&cfg, &out, cli.strict_convexity),
        Command::Solve => commands::solve(&cfg, &out),
        Command::Study => commands::study(&cfg, &out),
        Command::Norm { input } => commands::norm(&cfg, &input),
        Command::Fracop { input, op } => commands::fracop(&cfg, &input, op, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
