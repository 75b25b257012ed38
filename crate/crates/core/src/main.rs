use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use qacontrol::cli::{error_json, run, BackendChoice, Command, Overrides, RunConfig, OUT_ENV};
use qacontrol::primitives::Execution;
use qacontrol::Result;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExecutionArg {
    Serial,
    Parallel,
}

/// Overlap and transition-amplitude estimation with Krotov, GRAPE and CRAB control loops.
#[derive(Debug, Parser)]
#[command(name = "qacontrol", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Shots per experiment for the sampled backend.
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long, value_enum)]
    backend: Option<BackendChoice>,
    /// Output directory.
    #[arg(long, env = OUT_ENV)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    execution: Option<ExecutionArg>,
}

fn main_inner(cli: Cli) -> Result<()> {
    let text = std::fs::read_to_string(&cli.config)?;
    let overrides = Overrides {
        seed: cli.seed,
        shots: cli.shots,
        backend: cli.backend,
        out: cli.out,
        execution: cli.execution.map(|e| match e {
            ExecutionArg::Serial => Execution::Serial,
            ExecutionArg::Parallel => Execution::Parallel,
        }),
    };
    let cfg = overrides.apply(RunConfig::from_json(&text)?)?;
    let report = run(cli.command, &cfg)?;
    print!("{}", report.to_json()?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_json(&e));
            ExitCode::from(e.code() as u8)
        }
    }
}
