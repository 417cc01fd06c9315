//! Benchmark POMDPs for the ADVT planner.
//!
//! | id | actions | observations |
//! |----|---------|--------------|
//! | `pushbox2d`, `pushbox3d` | robot displacement | bearing sector and contact bit |
//! | `parking2d`, `parking3d` | steering, acceleration (and climb rate) | noisy terrain label |
//! | `vdp-tag`, `vdp-tag-low-noise` | heading, sensor switch | eight range beams |
//! | `sensorplacement-{6,8,10,12}` | joint velocities | touched wall |
//! | `bandit-1d` | a point of `[0, 1]` | none |
//!
//! Every constant comes from a TOML file in `config/`. The shipped files are
//! compiled in; [`with_problem`] can read replacements from a directory.

pub mod bandit;
pub mod config;
pub mod parking;
pub mod pushbox;
pub mod sensor_placement;
pub mod shapes;
pub mod vdp_tag;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use advt_core::PomdpModel;

/// Observation key of every transition into a terminal state, so that
/// terminal outcomes never share a belief child with running ones.
pub const TERMINAL_OBSERVATION: u64 = u64::MAX;

/// Beam reading reported on every beam when the target is tagged.
pub const TAGGED_READING: f64 = 1000.0;

pub use bandit::Bandit;
pub use config::{ProblemError, SolverDefaults};
pub use parking::Parking;
pub use pushbox::Pushbox;
pub use sensor_placement::SensorPlacement;
pub use vdp_tag::VdpTag;

/// A problem model together with its tuned solver constants.
pub trait Benchmark: PomdpModel<f64> + Sized {
    fn solver_defaults(&self) -> &SolverDefaults;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProblemId {
    Pushbox2d,
    Pushbox3d,
    Parking2d,
    Parking3d,
    VdpTag,
    VdpTagLowNoise,
    SensorPlacement6,
    SensorPlacement8,
    SensorPlacement10,
    SensorPlacement12,
    Bandit1d,
}

impl ProblemId {
    pub const ALL: [ProblemId; 11] = [
        ProblemId::Pushbox2d,
        ProblemId::Pushbox3d,
        ProblemId::Parking2d,
        ProblemId::Parking3d,
        ProblemId::VdpTag,
        ProblemId::VdpTagLowNoise,
        ProblemId::SensorPlacement6,
        ProblemId::SensorPlacement8,
        ProblemId::SensorPlacement10,
        ProblemId::SensorPlacement12,
        ProblemId::Bandit1d,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemId::Pushbox2d => "pushbox2d",
            ProblemId::Pushbox3d => "pushbox3d",
            ProblemId::Parking2d => "parking2d",
            ProblemId::Parking3d => "parking3d",
            ProblemId::VdpTag => "vdp-tag",
            ProblemId::VdpTagLowNoise => "vdp-tag-low-noise",
            ProblemId::SensorPlacement6 => "sensorplacement-6",
            ProblemId::SensorPlacement8 => "sensorplacement-8",
            ProblemId::SensorPlacement10 => "sensorplacement-10",
            ProblemId::SensorPlacement12 => "sensorplacement-12",
            ProblemId::Bandit1d => "bandit-1d",
        }
    }

    /// Name of the configuration file in `config/`.
    pub fn config_file(self) -> &'static str {
        match self {
            ProblemId::Pushbox2d => "pushbox2d.toml",
            ProblemId::Pushbox3d => "pushbox3d.toml",
            ProblemId::Parking2d => "parking2d.toml",
            ProblemId::Parking3d => "parking3d.toml",
            ProblemId::VdpTag => "vdp_tag.toml",
            ProblemId::VdpTagLowNoise => "vdp_tag_low_noise.toml",
            ProblemId::SensorPlacement6
            | ProblemId::SensorPlacement8
            | ProblemId::SensorPlacement10
            | ProblemId::SensorPlacement12 => "sensor_placement.toml",
            ProblemId::Bandit1d => "bandit.toml",
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemId {
    type Err = ProblemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ProblemId::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| ProblemError::UnknownProblem(s.to_string()))
    }
}

const EMBEDDED: &[(&str, &str)] = &[
    ("pushbox2d.toml", include_str!("../config/pushbox2d.toml")),
    ("pushbox3d.toml", include_str!("../config/pushbox3d.toml")),
    ("parking2d.toml", include_str!("../config/parking2d.toml")),
    ("parking3d.toml", include_str!("../config/parking3d.toml")),
    ("parking2d.map.toml", include_str!("../config/parking2d.map.toml")),
    ("parking3d.map.toml", include_str!("../config/parking3d.map.toml")),
    ("vdp_tag.toml", include_str!("../config/vdp_tag.toml")),
    ("vdp_tag_low_noise.toml", include_str!("../config/vdp_tag_low_noise.toml")),
    ("vdp_tag.map.toml", include_str!("../config/vdp_tag.map.toml")),
    ("sensor_placement.toml", include_str!("../config/sensor_placement.toml")),
    ("bandit.toml", include_str!("../config/bandit.toml")),
];

/// Text of a configuration file, from `dir` when given, else the compiled-in
/// copy.
pub fn config_text(name: &str, dir: Option<&Path>) -> Result<String, ProblemError> {
    match dir {
        Some(dir) => {
            let path = dir.join(name);
            std::fs::read_to_string(&path).map_err(|source| ProblemError::Io {
                path: path.display().to_string(),
                source,
            })
        }
        None => EMBEDDED
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| text.to_string())
            .ok_or_else(|| ProblemError::Invalid(format!("no shipped configuration named `{name}`"))),
    }
}

/// Generic callback receiving a constructed problem.
pub trait ProblemVisitor {
    type Output;

    fn visit<M: Benchmark>(self, model: M) -> Self::Output;
}

/// Builds problem `id` from its configuration (shipped, or read from
/// `dir`) and hands it to `visitor`.
pub fn with_problem<V: ProblemVisitor>(id: ProblemId, dir: Option<&Path>, visitor: V) -> Result<V::Output, ProblemError> {
    let text = config_text(id.config_file(), dir)?;
    Ok(match id {
        ProblemId::Pushbox2d => visitor.visit(Pushbox::<2>::new(config::parse(&text)?)?),
        ProblemId::Pushbox3d => visitor.visit(Pushbox::<3>::new(config::parse(&text)?)?),
        ProblemId::Parking2d => {
            let cfg: parking::ParkingConfig = config::parse(&text)?;
            let map = config::parse(&config_text(&cfg.map, dir)?)?;
            visitor.visit(Parking::<2>::new(cfg, map)?)
        }
        ProblemId::Parking3d => {
            let cfg: parking::ParkingConfig = config::parse(&text)?;
            let map = config::parse(&config_text(&cfg.map, dir)?)?;
            visitor.visit(Parking::<3>::new(cfg, map)?)
        }
        ProblemId::VdpTag | ProblemId::VdpTagLowNoise => {
            let cfg: vdp_tag::VdpTagConfig = config::parse(&text)?;
            let map = config::parse(&config_text(&cfg.map, dir)?)?;
            visitor.visit(VdpTag::new(cfg, map)?)
        }
        ProblemId::SensorPlacement6 => visitor.visit(SensorPlacement::<6>::new(config::parse(&text)?)?),
        ProblemId::SensorPlacement8 => visitor.visit(SensorPlacement::<8>::new(config::parse(&text)?)?),
        ProblemId::SensorPlacement10 => visitor.visit(SensorPlacement::<10>::new(config::parse(&text)?)?),
        ProblemId::SensorPlacement12 => visitor.visit(SensorPlacement::<12>::new(config::parse(&text)?)?),
        ProblemId::Bandit1d => visitor.visit(Bandit::new(config::parse(&text)?)?),
    })
}
