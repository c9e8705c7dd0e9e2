use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use pslab_cli::config::{ScenarioConfig, ScenarioKind};
use pslab_cli::{output_dir, run_scenario, write_outcome, Status};

/// Verification reports for rearrangement stability bounds.
#[derive(Parser)]
#[command(name = "pslab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a config file.
    Run(RunArgs),
    /// Run the oracle cross-checks, whatever scenario the config names.
    Oracle(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    config: PathBuf,
    /// Output directory (default: config `output`, then $PSLAB_OUT, then ./pslab-out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn execute(args: RunArgs, oracle: bool) -> Result<Status> {
    let mut config = ScenarioConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if oracle {
        config.scenario = ScenarioKind::OracleSuite;
    }
    if let Some(jobs) = args.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()?;
    }
    let dir = output_dir(args.out, &config);
    let outcome = run_scenario(&config)?;
    write_outcome(&outcome, &dir)?;
    for line in &outcome.lines {
        println!("{line}");
    }
    for (name, _) in &outcome.files {
        println!("wrote {}", dir.join(name).display());
    }
    Ok(if outcome.violated {
        Status::Violated
    } else {
        Status::Holds
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => execute(args, false),
        Command::Oracle(args) => execute(args, true),
    };
    match result {
        Ok(status) => ExitCode::from(status.code() as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
