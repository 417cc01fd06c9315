//! A single seeded run: plan, execute, advance until terminal or the step cap.

use std::path::Path;

use advt_core::{Budget, FinalActionRule, Observation, Planner, SolverConfig};
use advt_problems::{with_problem, Benchmark, ProblemId, ProblemVisitor};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::format::sig6;
use crate::{HarnessError, Variant};

/// Solver constants that replace the problem defaults for one experiment.
#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub exploration: Option<f64>,
    pub lipschitz: Option<f64>,
    pub refinement: Option<f64>,
    pub particle_capacity: Option<usize>,
    /// `true` returns the most visited root action instead of the best valued.
    pub max_visits: Option<bool>,
}

impl Overrides {
    pub fn apply(&self, c: &mut SolverConfig<f64>) {
        if let Some(v) = self.exploration {
            c.exploration = v;
        }
        if let Some(v) = self.lipschitz {
            c.lipschitz = v;
        }
        if let Some(v) = self.refinement {
            c.refinement = v;
        }
        if let Some(v) = self.particle_capacity {
            c.particle_capacity = v;
        }
        if let Some(true) = self.max_visits {
            c.final_action = FinalActionRule::MaxVisits;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepLog {
    pub action: Vec<f64>,
    pub observation: String,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub problem: ProblemId,
    pub variant: Variant,
    pub seed: u64,
    pub discount: f64,
    pub log: Vec<StepLog>,
    pub discounted_return: f64,
    pub success: bool,
    pub depleted: bool,
}

impl RunRecord {
    pub fn steps(&self) -> usize {
        self.log.len()
    }

    /// `Σ γ^t r_t` over the step log.
    pub fn recomputed_return(&self) -> f64 {
        let mut total = 0.0;
        let mut weight = 1.0;
        for s in &self.log {
            total += weight * s.reward;
            weight *= self.discount;
        }
        total
    }
}

/// Everything that identifies one run apart from the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSpec {
    pub problem: ProblemId,
    pub variant: Variant,
    pub seed: u64,
    pub budget: Budget,
    pub step_cap: usize,
    pub overrides: Overrides,
}

pub fn observation_key(o: &Observation<f64>) -> String {
    match o {
        Observation::Discrete(k) => k.to_string(),
        Observation::Continuous(v) => v.iter().map(|x| sig6(*x)).collect::<Vec<_>>().join(";"),
    }
}

/// Two independent ChaCha8 streams from one seed: environment and planner.
pub fn rng_pair(seed: u64) -> (ChaCha8Rng, ChaCha8Rng) {
    let env = ChaCha8Rng::seed_from_u64(seed);
    let mut planner = ChaCha8Rng::seed_from_u64(seed);
    planner.set_stream(1);
    (env, planner)
}

pub fn solver_config<M: Benchmark>(model: &M, spec: &RunSpec) -> SolverConfig<f64> {
    let mut c = spec.variant.solver_config(model.solver_defaults(), spec.budget);
    spec.overrides.apply(&mut c);
    c
}

/// Runs the plan / execute / advance loop on `model`.
pub fn run_single<M: Benchmark>(model: &M, spec: &RunSpec) -> Result<RunRecord, HarnessError> {
    if spec.step_cap == 0 {
        return Err(HarnessError::Config("step cap must be at least 1".into()));
    }
    let (mut env, mut rng) = rng_pair(spec.seed);
    let config = solver_config(model, spec);
    let mut state = model.sample_initial_state(&mut env);
    let mut planner = Planner::new(model, config, &mut rng)?;
    let gamma = model.discount();
    let mut log = Vec::new();
    let mut total = 0.0;
    let mut weight = 1.0;
    let mut depleted = false;
    while log.len() < spec.step_cap && !model.is_terminal(&state) {
        let (id, action) = planner.plan(&mut rng)?;
        let step = model.step(&state, &action, &mut env);
        total += weight * step.reward;
        weight *= gamma;
        log.push(StepLog {
            action,
            observation: observation_key(&step.observation),
            reward: step.reward,
        });
        state = step.next_state;
        if model.is_terminal(&state) || log.len() == spec.step_cap {
            break;
        }
        depleted |= planner.advance(id, &step.observation, &mut rng)?.depleted;
    }
    Ok(RunRecord {
        problem: spec.problem,
        variant: spec.variant,
        seed: spec.seed,
        discount: gamma,
        log,
        discounted_return: total,
        success: model.is_success(&state),
        depleted,
    })
}

struct Batch<'a> {
    specs: &'a [RunSpec],
    pool: &'a rayon::ThreadPool,
}

impl ProblemVisitor for Batch<'_> {
    type Output = Result<Vec<RunRecord>, HarnessError>;

    fn visit<M: Benchmark>(self, model: M) -> Self::Output {
        use rayon::prelude::*;
        self.pool
            .install(|| self.specs.par_iter().map(|s| run_single(&model, s)).collect())
    }
}

/// Runs all `specs` of one problem on `pool`. Results keep the order of
/// `specs` whatever the number of workers.
pub fn run_batch(
    problem: ProblemId,
    config_dir: Option<&Path>,
    specs: &[RunSpec],
    pool: &rayon::ThreadPool,
) -> Result<Vec<RunRecord>, HarnessError> {
    with_problem(problem, config_dir, Batch { specs, pool })?
}

/// Single run of a problem by id.
pub fn run_by_id(spec: &RunSpec, config_dir: Option<&Path>) -> Result<RunRecord, HarnessError> {
    struct One<'a>(&'a RunSpec);
    impl ProblemVisitor for One<'_> {
        type Output = Result<RunRecord, HarnessError>;
        fn visit<M: Benchmark>(self, model: M) -> Self::Output {
            run_single(&model, self.0)
        }
    }
    with_problem(spec.problem, config_dir, One(spec))?
}
