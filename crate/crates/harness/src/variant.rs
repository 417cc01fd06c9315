//! Solver variants compared by the experiments.

use std::fmt;
use std::str::FromStr;

use advt_core::{ActionSetKind, BackupMode, Budget, Config};
use advt_problems::SolverDefaults;

use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// Voronoi partitions, Bellman backups.
    Advt,
    /// Rectangular partitions.
    AdvtR,
    /// Lipschitz term switched off.
    AdvtL0,
    /// Monte Carlo backups.
    AdvtMc,
    /// Fixed uniform grid with plain UCB1.
    Grid,
}

impl Variant {
    pub const ALL: [Variant; 5] = [Variant::Advt, Variant::AdvtR, Variant::AdvtL0, Variant::AdvtMc, Variant::Grid];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Advt => "advt",
            Variant::AdvtR => "advt-r",
            Variant::AdvtL0 => "advt-l0",
            Variant::AdvtMc => "advt-mc",
            Variant::Grid => "grid",
        }
    }

    pub fn solver_config(self, defaults: &SolverDefaults, budget: Budget) -> Config {
        let mut c = Config {
            exploration: defaults.exploration,
            lipschitz: defaults.lipschitz,
            refinement: defaults.refinement,
            rollout_depth: defaults.rollout_depth,
            particle_capacity: defaults.particle_capacity,
            budget,
            ..Config::default()
        };
        match self {
            Variant::Advt => {}
            Variant::AdvtR => c.action_set = ActionSetKind::Rectangular,
            Variant::AdvtL0 => c.lipschitz = 0.0,
            Variant::AdvtMc => c.backup = BackupMode::MonteCarlo,
            Variant::Grid => {
                c.action_set = ActionSetKind::FixedGrid {
                    per_dim: defaults.grid_per_dim,
                }
            }
        }
        c
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown variant `{s}`")))
    }
}
