//! Parking: a car with bicycle dynamics starts in one of three lanes and must
//! reach a parking spot behind a gap in a wall. The only sensor reports the
//! terrain under the car, correctly most of the time.

use std::sync::Arc;

use advt_core::{BoundedMetricSpace, Observation, ObservationMode, PomdpModel, Step};
use rand::Rng;
use serde::Deserialize;

use crate::config::{ensure, ProblemError, SolverDefaults};
use crate::shapes::{dist, Aabb};
use crate::{Benchmark, TERMINAL_OBSERVATION};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TerrainPatch {
    pub label: u64,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

/// Static layout of the parking lot.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParkingMap {
    pub world: Aabb,
    pub start_x: f64,
    pub start_lanes: Vec<f64>,
    #[serde(default)]
    pub start_elevation: f64,
    pub goal_center: Vec<f64>,
    pub goal_radius: f64,
    /// Point in the wall opening the heuristic routes through.
    pub gap_entry: Vec<f64>,
    #[serde(rename = "wall")]
    pub walls: Vec<Aabb>,
    #[serde(rename = "terrain")]
    pub terrain: Vec<TerrainPatch>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParkingConfig {
    pub discount: f64,
    pub goal_reward: f64,
    pub collision_reward: f64,
    pub lateral_jitter: f64,
    pub wheelbase: f64,
    pub dt: f64,
    pub max_steering: f64,
    pub max_acceleration: f64,
    /// Climb-rate bound (3D only).
    pub max_climb: f64,
    pub max_speed: f64,
    pub collision_substeps: usize,
    /// Number of terrain classes; the label one past the last means "none".
    pub terrain_labels: u64,
    pub terrain_accuracy: f64,
    /// Discounted goal reward along the shortest route through the gap.
    /// When false the solver falls back to random rollouts.
    pub heuristic: bool,
    /// File name of the map, relative to the configuration file.
    pub map: String,
    pub solver: SolverDefaults,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Running,
    Goal,
    Collision,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParkingState<const D: usize> {
    /// Planar position, with the elevation last in 3D.
    pub pos: [f64; D],
    pub heading: f64,
    pub speed: f64,
    pub status: Status,
}

#[derive(Debug, Clone)]
pub struct Parking<const D: usize> {
    config: ParkingConfig,
    map: ParkingMap,
    space: Arc<BoundedMetricSpace<f64>>,
}

impl<const D: usize> Parking<D> {
    pub fn new(config: ParkingConfig, map: ParkingMap) -> Result<Self, ProblemError> {
        ensure(D == 2 || D == 3, "parking is defined in 2 or 3 dimensions")?;
        ensure(map.world.dimension() == D, "map dimension mismatch")?;
        ensure(map.goal_center.len() == D && map.gap_entry.len() == D, "map dimension mismatch")?;
        ensure(
            map.walls.iter().all(|w| w.dimension() == D) && map.terrain.iter().all(|t| t.min.len() == D && t.max.len() == D),
            "map dimension mismatch",
        )?;
        ensure(!map.start_lanes.is_empty(), "map needs at least one start lane")?;
        ensure(config.terrain_labels >= 2, "at least two terrain labels are needed")?;
        ensure(map.terrain.iter().all(|t| t.label < config.terrain_labels), "terrain label out of range")?;
        ensure((0.0..=1.0).contains(&config.terrain_accuracy), "terrain accuracy must lie in [0, 1]")?;
        ensure(config.collision_substeps > 0, "collision substeps must be positive")?;
        ensure(config.wheelbase > 0.0 && config.dt > 0.0 && config.max_speed > 0.0, "dynamics constants must be positive")?;
        let mut lower = vec![-config.max_steering, -config.max_acceleration];
        let mut upper = vec![config.max_steering, config.max_acceleration];
        if D == 3 {
            lower.push(-config.max_climb);
            upper.push(config.max_climb);
        }
        let space = Arc::new(BoundedMetricSpace::new(lower, upper).map_err(|e| ProblemError::Invalid(e.to_string()))?);
        Ok(Self { config, map, space })
    }

    pub fn config(&self) -> &ParkingConfig {
        &self.config
    }

    pub fn map(&self) -> &ParkingMap {
        &self.map
    }

    /// True terrain label at `pos`; `terrain_labels` when on plain ground.
    pub fn terrain_at(&self, pos: &[f64]) -> u64 {
        self.map
            .terrain
            .iter()
            .find(|t| t.min.iter().zip(&t.max).zip(pos).all(|((lo, hi), v)| v >= lo && v <= hi))
            .map_or(self.config.terrain_labels, |t| t.label)
    }

    /// Reading of the terrain sensor: the true label with probability
    /// `terrain_accuracy`, otherwise one of the other labels uniformly.
    pub fn sense_terrain<R: Rng + ?Sized>(&self, pos: &[f64], rng: &mut R) -> u64 {
        let label = self.terrain_at(pos);
        let n = self.config.terrain_labels;
        if label == n || rng.random_bool(self.config.terrain_accuracy) {
            return label;
        }
        let other = rng.random_range(0..n - 1);
        if other >= label {
            other + 1
        } else {
            other
        }
    }

    fn collides(&self, p: &[f64]) -> bool {
        !self.map.world.contains(p) || self.map.walls.iter().any(|w| w.contains(p))
    }

    fn in_goal(&self, p: &[f64]) -> bool {
        dist(p, &self.map.goal_center) <= self.map.goal_radius
    }

    /// Noise-free dynamics: one Euler step of the bicycle model, with the
    /// straight segment between the two positions checked at substeps.
    pub fn transition(&self, s: &ParkingState<D>, a: &[f64]) -> (ParkingState<D>, f64) {
        let c = &self.config;
        let steer = a[0].clamp(-c.max_steering, c.max_steering);
        let accel = a[1].clamp(-c.max_acceleration, c.max_acceleration);
        let mut end = s.pos;
        end[0] += s.speed * s.heading.cos() * c.dt;
        end[1] += s.speed * s.heading.sin() * c.dt;
        if D == 3 {
            end[2] += a[2].clamp(-c.max_climb, c.max_climb) * c.dt;
        }
        let heading = s.heading + s.speed / c.wheelbase * steer.tan() * c.dt;
        let speed = (s.speed + accel * c.dt).clamp(0.0, c.max_speed);

        let n = c.collision_substeps;
        let mut status = Status::Running;
        let mut pos = end;
        for k in 1..=n {
            let t = k as f64 / n as f64;
            let p: [f64; D] = std::array::from_fn(|i| s.pos[i] + t * (end[i] - s.pos[i]));
            if self.collides(&p) {
                status = Status::Collision;
                pos = p;
                break;
            }
            if self.in_goal(&p) {
                status = Status::Goal;
                pos = p;
                break;
            }
        }
        let reward = match status {
            Status::Running => 0.0,
            Status::Goal => c.goal_reward,
            Status::Collision => c.collision_reward,
        };
        (
            ParkingState {
                pos,
                heading,
                speed,
                status,
            },
            reward,
        )
    }
}

impl<const D: usize> PomdpModel<f64> for Parking<D> {
    type State = ParkingState<D>;

    fn action_space(&self) -> &Arc<BoundedMetricSpace<f64>> {
        &self.space
    }

    fn discount(&self) -> f64 {
        self.config.discount
    }

    fn observation_mode(&self) -> ObservationMode<f64> {
        ObservationMode::Discrete
    }

    fn sample_initial_state<R: Rng + ?Sized>(&self, rng: &mut R) -> ParkingState<D> {
        let lanes = &self.map.start_lanes;
        let lane = lanes[rng.random_range(0..lanes.len())];
        let j = self.config.lateral_jitter;
        let jitter = if j > 0.0 { rng.random_range(-j..=j) } else { 0.0 };
        let mut pos = [0.0; D];
        pos[0] = self.map.start_x;
        pos[1] = lane + jitter;
        if D == 3 {
            pos[2] = self.map.start_elevation;
        }
        ParkingState {
            pos,
            heading: 0.0,
            speed: 0.0,
            status: Status::Running,
        }
    }

    fn step<R: Rng + ?Sized>(&self, s: &ParkingState<D>, a: &[f64], rng: &mut R) -> Step<ParkingState<D>, f64> {
        let (next_state, reward) = self.transition(s, a);
        let observation = if next_state.status == Status::Running {
            Observation::Discrete(self.sense_terrain(&next_state.pos, rng))
        } else {
            Observation::Discrete(TERMINAL_OBSERVATION)
        };
        Step {
            next_state,
            observation,
            reward,
        }
    }

    fn is_terminal(&self, s: &ParkingState<D>) -> bool {
        s.status != Status::Running
    }

    fn is_success(&self, s: &ParkingState<D>) -> bool {
        s.status == Status::Goal
    }

    fn rollout_heuristic<R: Rng + ?Sized>(&self, s: &ParkingState<D>, _rng: &mut R) -> Option<f64> {
        if !self.config.heuristic {
            return None;
        }
        let m = &self.map;
        let route = if s.pos[0] < m.gap_entry[0] {
            dist(&s.pos, &m.gap_entry) + dist(&m.gap_entry, &m.goal_center)
        } else {
            dist(&s.pos, &m.goal_center)
        };
        let steps = ((route - m.goal_radius).max(0.0) / self.config.max_speed).ceil().max(1.0);
        Some(self.config.goal_reward * self.config.discount.powf(steps - 1.0))
    }
}

impl<const D: usize> Benchmark for Parking<D> {
    fn solver_defaults(&self) -> &SolverDefaults {
        &self.config.solver
    }
}
