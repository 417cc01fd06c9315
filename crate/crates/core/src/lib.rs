//! # advt-core
//!
//! Online planning for POMDPs with continuous action spaces. Each belief in
//! the search tree owns a *Voronoi tree*: a binary space partition of the
//! action space whose splits are the Voronoi diagram of two anchors sampled
//! from the parent cell. Cells are never materialised; membership is decided
//! by replaying anchor comparisons from the root, and cell diameters are
//! estimated by probing the boundary and fitting a minimum enclosing ball.
//!
//! The crate is generic over the scalar type ([`Scalar`], implemented for
//! `f32` and `f64`). Both instantiations are re-exported as type aliases
//! below; the benchmark problems and the harness use `f64`.
//!
//! Modules:
//!
//! - [`geometry`]: bounded Euclidean action spaces, boundary probing by
//!   bisection, enclosing balls, Hit & Run sampling inside implicit cells.
//! - [`voronoi`]: the per-belief action partition (Voronoi or rectangular
//!   splits) with refinement rule and leaf statistics.
//! - [`pomdp`]: the generative model interface, observation keys and
//!   particle beliefs.
//! - [`solver`]: belief tree, episode sampling, diameter-aware UCB,
//!   stochastic Bellman / Monte Carlo backups and root advancement.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod geometry;
pub mod pomdp;
mod scalar;
pub mod solver;
pub mod voronoi;

pub use scalar::Scalar;

pub use geometry::{BoundedMetricSpace, CellMembership, GeometryError, GeometryParams};
pub use pomdp::{Observation, ObservationMode, ParticleSet, PomdpError, PomdpModel, Step};
pub use solver::{
    ActionSetKind, BackupMode, Budget, FinalActionRule, Planner, SolverConfig, SolverError,
};
pub use voronoi::{ActionId, ActionStats, NodeId, PartitionMode, VoronoiError, VoronoiTree};

/// Action space over `f64`.
pub type Space = BoundedMetricSpace<f64>;
/// Voronoi tree over `f64` actions.
pub type ActionTree = VoronoiTree<f64>;
/// Solver configuration over `f64`.
pub type Config = SolverConfig<f64>;
/// Geometry parameters over `f64`.
pub type GeometryParams64 = GeometryParams<f64>;
/// Observation over `f64`.
pub type Obs = Observation<f64>;

/// Action space over `f32`.
pub type Space32 = BoundedMetricSpace<f32>;
/// Voronoi tree over `f32` actions.
pub type ActionTree32 = VoronoiTree<f32>;
/// Solver configuration over `f32`.
pub type Config32 = SolverConfig<f32>;
/// Geometry parameters over `f32`.
pub type GeometryParams32 = GeometryParams<f32>;
/// Observation over `f32`.
pub type Obs32 = Observation<f32>;
