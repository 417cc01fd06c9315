//! Generative POMDP interface and particle beliefs.

use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::geometry::{squared_distance, BoundedMetricSpace};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PomdpError {
    #[error("particle filter produced no particle after {attempts} attempts")]
    ParticleDepletion { attempts: usize },
    #[error("belief has no particles")]
    EmptyBelief,
    #[error("action has dimension {actual}, expected {expected}")]
    ActionDimension { expected: usize, actual: usize },
}

/// Observation emitted by the model. Discrete observations are compared
/// exactly; continuous ones by a distance threshold.
#[derive(Debug, Clone, PartialEq)]
pub enum Observation<T> {
    Discrete(u64),
    Continuous(Vec<T>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObservationMode<T> {
    Discrete,
    /// Two continuous observations share a belief child when their distance
    /// is strictly below `threshold`.
    Continuous { threshold: T },
}

impl<T: Scalar> Observation<T> {
    /// Whether `self` falls into the child keyed by `key`.
    pub fn matches(&self, key: &Self, mode: ObservationMode<T>) -> bool {
        match (self, key, mode) {
            (Observation::Discrete(a), Observation::Discrete(b), _) => a == b,
            (Observation::Continuous(a), Observation::Continuous(b), ObservationMode::Continuous { threshold }) => {
                a.len() == b.len() && squared_distance(a, b) < threshold * threshold
            }
            (Observation::Continuous(a), Observation::Continuous(b), ObservationMode::Discrete) => a == b,
            _ => false,
        }
    }
}

/// Index of the first key (insertion order) that `observation` matches.
pub fn match_observation_edge<'a, T: Scalar, I>(
    observation: &Observation<T>,
    keys: I,
    mode: ObservationMode<T>,
) -> Option<usize>
where
    I: IntoIterator<Item = &'a Observation<T>>,
{
    keys.into_iter().position(|k| observation.matches(k, mode))
}

/// Outcome of one generative-model call.
#[derive(Debug, Clone, PartialEq)]
pub struct Step<S, T> {
    pub next_state: S,
    pub observation: Observation<T>,
    pub reward: T,
}

/// Generative model `(s, a) ↦ (s', o, r)` with a continuous action box.
pub trait PomdpModel<T: Scalar>: Send + Sync {
    type State: Clone + Send + Sync + std::fmt::Debug;

    fn action_space(&self) -> &Arc<BoundedMetricSpace<T>>;

    fn discount(&self) -> T;

    fn observation_mode(&self) -> ObservationMode<T>;

    fn sample_initial_state<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::State;

    fn step<R: Rng + ?Sized>(&self, state: &Self::State, action: &[T], rng: &mut R) -> Step<Self::State, T>;

    fn is_terminal(&self, state: &Self::State) -> bool;

    /// Value estimate used for new beliefs and rollouts. `None` lets the
    /// solver fall back to a random-action rollout.
    fn rollout_heuristic<R: Rng + ?Sized>(&self, _state: &Self::State, _rng: &mut R) -> Option<T> {
        None
    }

    /// Whether a terminal state counts as task success.
    fn is_success(&self, _state: &Self::State) -> bool {
        false
    }
}

/// Unweighted particle approximation of a belief.
#[derive(Debug, Clone)]
pub struct ParticleSet<S> {
    states: Vec<S>,
}

impl<S: Clone> ParticleSet<S> {
    pub fn new(states: Vec<S>) -> Self {
        Self { states }
    }

    pub fn from_initial<T: Scalar, M: PomdpModel<T, State = S>, R: Rng + ?Sized>(
        model: &M,
        count: usize,
        rng: &mut R,
    ) -> Self {
        Self {
            states: (0..count).map(|_| model.sample_initial_state(rng)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn push(&mut self, state: S) {
        self.states.push(state);
    }

    /// Uniformly drawn particle.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<&S> {
        if self.states.is_empty() {
            None
        } else {
            Some(&self.states[rng.random_range(0..self.states.len())])
        }
    }
}

/// Rejection filter: propagate uniformly drawn particles through `action` and
/// keep successors whose observation matches `observation`, until `capacity`
/// particles are collected or `max_attempts` propagations are spent.
pub fn filter_particles<T, M, R>(
    model: &M,
    belief: &ParticleSet<M::State>,
    action: &[T],
    observation: &Observation<T>,
    capacity: usize,
    max_attempts: usize,
    rng: &mut R,
) -> Result<ParticleSet<M::State>, PomdpError>
where
    T: Scalar,
    M: PomdpModel<T>,
    R: Rng + ?Sized,
{
    if belief.is_empty() {
        return Err(PomdpError::EmptyBelief);
    }
    let mode = model.observation_mode();
    let mut states = Vec::with_capacity(capacity);
    let mut attempts = 0;
    while states.len() < capacity && attempts < max_attempts {
        attempts += 1;
        let s = belief.sample(rng).expect("non-empty");
        let step = model.step(s, action, rng);
        if step.observation.matches(observation, mode) {
            states.push(step.next_state);
        }
    }
    if states.is_empty() {
        Err(PomdpError::ParticleDepletion { attempts })
    } else {
        Ok(ParticleSet::new(states))
    }
}
