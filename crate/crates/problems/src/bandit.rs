//! One-step continuous bandit on `[0, 1]` with a single peak.

use std::sync::Arc;

use advt_core::{BoundedMetricSpace, Observation, ObservationMode, PomdpModel, Step};
use rand::Rng;
use serde::Deserialize;

use crate::config::{ensure, ProblemError, SolverDefaults};
use crate::Benchmark;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BanditConfig {
    pub discount: f64,
    /// Maximiser of the reward `1 - |a - peak|`.
    pub peak: f64,
    pub solver: SolverDefaults,
}

#[derive(Debug, Clone)]
pub struct Bandit {
    config: BanditConfig,
    space: Arc<BoundedMetricSpace<f64>>,
}

impl Bandit {
    pub fn new(config: BanditConfig) -> Result<Self, ProblemError> {
        ensure((0.0..=1.0).contains(&config.peak), "peak must lie in [0, 1]")?;
        Ok(Self {
            config,
            space: Arc::new(BoundedMetricSpace::unit_cube(1).map_err(|e| ProblemError::Invalid(e.to_string()))?),
        })
    }

    pub fn peak(&self) -> f64 {
        self.config.peak
    }

    pub fn reward(&self, a: f64) -> f64 {
        1.0 - (a - self.config.peak).abs()
    }
}

impl PomdpModel<f64> for Bandit {
    /// Whether the single pull has happened.
    type State = bool;

    fn action_space(&self) -> &Arc<BoundedMetricSpace<f64>> {
        &self.space
    }

    fn discount(&self) -> f64 {
        self.config.discount
    }

    fn observation_mode(&self) -> ObservationMode<f64> {
        ObservationMode::Discrete
    }

    fn sample_initial_state<R: Rng + ?Sized>(&self, _rng: &mut R) -> bool {
        false
    }

    fn step<R: Rng + ?Sized>(&self, _s: &bool, a: &[f64], _rng: &mut R) -> Step<bool, f64> {
        Step {
            next_state: true,
            observation: Observation::Discrete(0),
            reward: self.reward(a[0]),
        }
    }

    fn is_terminal(&self, s: &bool) -> bool {
        *s
    }

    fn is_success(&self, s: &bool) -> bool {
        *s
    }
}

impl Benchmark for Bandit {
    fn solver_defaults(&self) -> &SolverDefaults {
        &self.config.solver
    }
}
