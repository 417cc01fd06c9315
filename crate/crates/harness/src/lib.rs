//! Seeded experiment runner for the ADVT planner and its ablations.
//!
//! A run interleaves planning, execution in the true environment and root
//! advancement until a terminal state or the step cap. Each run seed gives
//! two ChaCha8 streams, one for the environment and one for the planner, so
//! a run is reproducible on its own and independent of the worker count.
//!
//! [`run_experiment`] reads a manifest (see [`manifest`]) and writes
//! `runs.csv`, `steps.csv` and `summary.csv`.

pub mod format;
pub mod manifest;
pub mod run;
pub mod summary;
mod variant;

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use advt_core::SolverError;
use advt_problems::ProblemError;
use thiserror::Error;

pub use manifest::{parse_manifest, Experiment};
pub use run::{run_by_id, run_single, RunRecord, RunSpec, StepLog};
pub use summary::{read_runs, summarize, write_runs, write_summary, RunRow, SummaryRow};
pub use variant::Variant;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("solver error: {0}")]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// Errors caused by the user's input rather than by a run.
    pub fn is_config(&self) -> bool {
        match self {
            HarnessError::Config(_) | HarnessError::Problem(_) => true,
            HarnessError::Solver(SolverError::InvalidConfig(_)) => true,
            _ => false,
        }
    }
}

/// Runs every experiment of a manifest on `workers` threads.
pub fn run_experiments(experiments: &[Experiment], workers: usize) -> Result<Vec<RunRecord>, HarnessError> {
    if workers == 0 {
        return Err(HarnessError::Config("at least one worker is needed".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    let mut records = Vec::new();
    for e in experiments {
        records.extend(run::run_batch(e.problem, e.config_dir.as_deref(), &e.specs(), &pool)?);
    }
    Ok(records)
}

pub fn write_steps<W: std::io::Write>(records: &[RunRecord], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["problem", "variant", "seed", "t", "action", "observation", "reward"])?;
    for r in records {
        for (t, s) in r.log.iter().enumerate() {
            let action = s.action.iter().map(|x| format::sig6(*x)).collect::<Vec<_>>().join(";");
            w.write_record([
                r.problem.to_string(),
                r.variant.to_string(),
                r.seed.to_string(),
                t.to_string(),
                action,
                s.observation.clone(),
                format::sig6(s.reward),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads the manifest, runs it and writes the CSV files into `out`.
pub fn run_experiment(manifest: &Path, out: &Path, workers: usize) -> Result<Vec<SummaryRow>, HarnessError> {
    let text = std::fs::read_to_string(manifest)
        .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", manifest.display())))?;
    let experiments = parse_manifest(&text)?;
    let records = run_experiments(&experiments, workers)?;
    let rows: Vec<RunRow> = records.iter().map(RunRow::from_record).collect();
    let summary = summarize(&rows)?;
    std::fs::create_dir_all(out)?;
    write_runs(&rows, BufWriter::new(File::create(out.join("runs.csv"))?))?;
    write_steps(&records, BufWriter::new(File::create(out.join("steps.csv"))?))?;
    write_summary(&summary, BufWriter::new(File::create(out.join("summary.csv"))?))?;
    Ok(summary)
}
