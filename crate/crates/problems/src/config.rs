//! Problem configuration files.
//!
//! Every constant of the benchmark models lives in a TOML file under
//! `config/`. The shipped files are embedded at compile time; any of them can
//! be replaced by a file on disk.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid problem configuration: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid problem configuration: {0}")]
    Invalid(String),
}

/// Solver constants tuned per problem and shared by every variant.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverDefaults {
    pub exploration: f64,
    pub lipschitz: f64,
    pub refinement: f64,
    pub rollout_depth: usize,
    pub particle_capacity: usize,
    /// Grid resolution of the fixed-grid baseline.
    pub grid_per_dim: usize,
}

pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, ProblemError> {
    Ok(toml::from_str(text)?)
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, ProblemError> {
    let text = std::fs::read_to_string(path).map_err(|source| ProblemError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text)
}

pub(crate) fn ensure(cond: bool, msg: &str) -> Result<(), ProblemError> {
    if cond {
        Ok(())
    } else {
        Err(ProblemError::Invalid(msg.to_string()))
    }
}
