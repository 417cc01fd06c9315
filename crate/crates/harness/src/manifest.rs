//! Experiment manifests.
//!
//! ```toml
//! [[experiment]]
//! problem = "pushbox2d"
//! variant = "advt"
//! runs = 100
//! iterations = 2000
//! base_seed = 0
//! ```
//!
//! `millis = 1000` replaces `iterations` for wall-clock budgets. Optional
//! keys: `step_cap` (default 50), `config_dir` and a `[experiment.solver]`
//! table overriding `exploration`, `lipschitz`, `refinement` or
//! `particle_capacity`.

use std::path::PathBuf;

use advt_core::Budget;
use advt_problems::ProblemId;
use serde::Deserialize;

use crate::run::{Overrides, RunSpec};
use crate::{HarnessError, Variant};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    experiment: Vec<RawExperiment>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    problem: String,
    variant: String,
    runs: usize,
    iterations: Option<u64>,
    millis: Option<u64>,
    base_seed: u64,
    #[serde(default = "default_step_cap")]
    step_cap: usize,
    config_dir: Option<PathBuf>,
    #[serde(default)]
    solver: Overrides,
}

fn default_step_cap() -> usize {
    50
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub problem: ProblemId,
    pub variant: Variant,
    pub runs: usize,
    pub budget: Budget,
    pub base_seed: u64,
    pub step_cap: usize,
    pub config_dir: Option<PathBuf>,
    pub overrides: Overrides,
}

impl Experiment {
    /// Run `i` uses seed `base_seed + i`.
    pub fn specs(&self) -> Vec<RunSpec> {
        (0..self.runs as u64)
            .map(|i| RunSpec {
                problem: self.problem,
                variant: self.variant,
                seed: self.base_seed.wrapping_add(i),
                budget: self.budget,
                step_cap: self.step_cap,
                overrides: self.overrides,
            })
            .collect()
    }
}

pub fn parse_manifest(text: &str) -> Result<Vec<Experiment>, HarnessError> {
    let raw: RawManifest = toml::from_str(text).map_err(|e| HarnessError::Config(format!("manifest: {e}")))?;
    raw.experiment
        .into_iter()
        .enumerate()
        .map(|(i, e)| {
            let key = |k: &str| format!("experiment[{i}].{k}");
            let problem = e
                .problem
                .parse()
                .map_err(|err| HarnessError::Config(format!("{}: {err}", key("problem"))))?;
            let variant = e
                .variant
                .parse()
                .map_err(|err| HarnessError::Config(format!("{}: {err}", key("variant"))))?;
            let budget = match (e.iterations, e.millis) {
                (Some(n), None) => Budget::Iterations(n),
                (None, Some(ms)) => Budget::Millis(ms),
                _ => {
                    return Err(HarnessError::Config(format!(
                        "{}: give exactly one of `iterations` and `millis`",
                        key("iterations")
                    )))
                }
            };
            if e.runs < 2 {
                return Err(HarnessError::Config(format!("{}: at least two runs are needed", key("runs"))));
            }
            if e.step_cap == 0 {
                return Err(HarnessError::Config(format!("{}: must be at least 1", key("step_cap"))));
            }
            Ok(Experiment {
                problem,
                variant,
                runs: e.runs,
                budget,
                base_seed: e.base_seed,
                step_cap: e.step_cap,
                config_dir: e.config_dir,
                overrides: e.solver,
            })
        })
        .collect()
}
