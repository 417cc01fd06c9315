use std::path::PathBuf;
use std::process::ExitCode;

use advt_core::Budget;
use advt_harness::run::{run_by_id, Overrides, RunSpec};
use advt_harness::{read_runs, run_experiment, summarize, write_summary, HarnessError};
use clap::{Parser, Subcommand};

/// Online POMDP planning experiments with ADVT.
#[derive(Parser)]
#[command(name = "advt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment of a manifest and write runs.csv, steps.csv and summary.csv.
    Run {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Run one episode and print the step log.
    Single {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        variant: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        iterations: u64,
        #[arg(long, default_value_t = 50)]
        step_cap: usize,
        /// Directory with replacement problem configuration files.
        #[arg(long)]
        config_dir: Option<PathBuf>,
    },
    /// Recompute summary.csv from a runs.csv file.
    Summarize {
        #[arg(long)]
        runs: PathBuf,
    },
}

fn execute(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Run { manifest, out, workers } => {
            let summary = run_experiment(&manifest, &out, workers)?;
            write_summary(&summary, std::io::stdout())
        }
        Command::Single {
            problem,
            variant,
            seed,
            iterations,
            step_cap,
            config_dir,
        } => {
            let spec = RunSpec {
                problem: problem.parse()?,
                variant: variant.parse()?,
                seed,
                budget: Budget::Iterations(iterations),
                step_cap,
                overrides: Overrides::default(),
            };
            let record = run_by_id(&spec, config_dir.as_deref())?;
            for (t, s) in record.log.iter().enumerate() {
                let action: Vec<String> = s.action.iter().map(|x| format!("{x:.4}")).collect();
                println!("{t:>3}  a=[{}]  o={}  r={}", action.join(", "), s.observation, s.reward);
            }
            println!(
                "return={} success={} steps={} depleted={}",
                advt_harness::format::sig6(record.discounted_return),
                record.success,
                record.steps(),
                record.depleted
            );
            Ok(())
        }
        Command::Summarize { runs } => {
            let file = std::fs::File::open(&runs)
                .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", runs.display())))?;
            let rows = read_runs(file)?;
            write_summary(&summarize(&rows)?, std::io::stdout())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("advt: {e}");
            if e.is_config() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
