//! The planner: belief tree search with per-belief adaptive action sets.

mod actions;
mod belief;
mod config;
mod planner;

pub use actions::ActionSet;
pub use belief::{BeliefId, BeliefNode, BeliefTree};
pub use config::{ActionSetKind, BackupMode, Budget, FinalActionRule, SolverConfig};
pub use planner::{AdvanceOutcome, Episode, EpisodeEntry, Planner};

use rand::Rng;
use thiserror::Error;

use crate::geometry::{sample_uniform_box, GeometryError};
use crate::pomdp::{PomdpError, PomdpModel};
use crate::voronoi::VoronoiError;
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("no root action has been visited; the planning budget produced no episode")]
    NoVisitedAction,
    #[error("action {0} is not a candidate at the root")]
    UnknownAction(usize),
    #[error(transparent)]
    Pomdp(#[from] PomdpError),
    #[error(transparent)]
    Voronoi(#[from] VoronoiError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Diameter-aware upper confidence bound. Infinite for unvisited actions.
/// Visit counts are taken as scalars so the bound can be evaluated at
/// non-integer `N(b)`.
pub fn ucb_value<T: Scalar>(
    belief_visits: T,
    action_visits: T,
    q: T,
    exploration: T,
    lipschitz: T,
    diameter: T,
) -> T {
    if action_visits <= T::zero() {
        return T::infinity();
    }
    let log_n = belief_visits.ln().max(T::zero());
    q + exploration * (log_n / action_visits).sqrt() + lipschitz * diameter
}

/// Stochastic Bellman update with the post-increment visit count.
pub fn bellman_update<T: Scalar>(q: T, visits: u64, reward: T, discount: T, next_value: T) -> T {
    q + (reward + discount * next_value - q) / T::from_count(visits)
}

/// Running-mean update towards an episode's discounted tail return.
pub fn monte_carlo_update<T: Scalar>(q: T, visits: u64, tail_return: T) -> T {
    q + (tail_return - q) / T::from_count(visits)
}

/// Discounted return of one uniformly random trajectory from `state`.
pub fn default_rollout<T, M, R>(model: &M, state: &M::State, depth: usize, rng: &mut R) -> T
where
    T: Scalar,
    M: PomdpModel<T>,
    R: Rng + ?Sized,
{
    let gamma = model.discount();
    let space = model.action_space().clone();
    let mut total = T::zero();
    let mut weight = T::one();
    let mut s = state.clone();
    for _ in 0..depth {
        if model.is_terminal(&s) {
            break;
        }
        let a = sample_uniform_box(&space, rng);
        let step = model.step(&s, &a, rng);
        total += weight * step.reward;
        weight *= gamma;
        s = step.next_state;
    }
    total
}
