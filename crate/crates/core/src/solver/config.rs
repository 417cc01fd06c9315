use crate::geometry::{BoundedMetricSpace, GeometryParams};
use crate::voronoi::PartitionMode;
use crate::Scalar;

use super::SolverError;

/// Planning budget per call to [`Planner::plan`](super::Planner::plan).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    Iterations(u64),
    Millis(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BackupMode {
    /// Stochastic Bellman backup towards `r + γ V̂*(b')`.
    #[default]
    Bellman,
    /// Running mean of the discounted tail return of each episode.
    MonteCarlo,
}

/// How the candidate actions of a belief are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ActionSetKind {
    #[default]
    Voronoi,
    Rectangular,
    /// Fixed uniform grid of `per_dim` cell centres per dimension, plain UCB1.
    FixedGrid { per_dim: usize },
}

impl ActionSetKind {
    pub fn partition_mode(self) -> Option<PartitionMode> {
        match self {
            ActionSetKind::Voronoi => Some(PartitionMode::Voronoi),
            ActionSetKind::Rectangular => Some(PartitionMode::Rectangular),
            ActionSetKind::FixedGrid { .. } => None,
        }
    }
}

/// Which root action [`Planner::plan`](super::Planner::plan) returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FinalActionRule {
    #[default]
    MaxValue,
    MaxVisits,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig<T> {
    /// Exploration constant `C`.
    pub exploration: T,
    /// Lipschitz constant `L`.
    pub lipschitz: T,
    /// Refinement constant `C_r`.
    pub refinement: T,
    /// Geometry parameters; `None` uses [`GeometryParams::defaults_for`].
    pub geometry: Option<GeometryParams<T>>,
    pub max_depth: usize,
    pub budget: Budget,
    pub backup: BackupMode,
    pub action_set: ActionSetKind,
    /// Horizon of the default random rollout.
    pub rollout_depth: usize,
    pub final_action: FinalActionRule,
    /// Particles kept by the execution-time belief update.
    pub particle_capacity: usize,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            exploration: T::one(),
            lipschitz: T::one(),
            refinement: T::one(),
            geometry: None,
            max_depth: 50,
            budget: Budget::Iterations(1000),
            backup: BackupMode::Bellman,
            action_set: ActionSetKind::Voronoi,
            rollout_depth: 50,
            final_action: FinalActionRule::MaxValue,
            particle_capacity: 2000,
        }
    }
}

impl<T: Scalar> SolverConfig<T> {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.exploration >= T::zero()) {
            return Err(SolverError::InvalidConfig("exploration constant must be non-negative"));
        }
        if !(self.lipschitz >= T::zero()) {
            return Err(SolverError::InvalidConfig("Lipschitz constant must be non-negative"));
        }
        if !(self.refinement > T::zero()) {
            return Err(SolverError::InvalidConfig("refinement constant must be positive"));
        }
        if self.max_depth == 0 {
            return Err(SolverError::InvalidConfig("max depth must be at least 1"));
        }
        if self.particle_capacity == 0 {
            return Err(SolverError::InvalidConfig("particle capacity must be positive"));
        }
        if let ActionSetKind::FixedGrid { per_dim: 0 } = self.action_set {
            return Err(SolverError::InvalidConfig("grid needs at least one action per dimension"));
        }
        if let Some(g) = &self.geometry {
            g.validate()?;
        }
        Ok(())
    }

    pub fn geometry_for(&self, space: &BoundedMetricSpace<T>) -> GeometryParams<T> {
        self.geometry.unwrap_or_else(|| GeometryParams::defaults_for(space))
    }
}
