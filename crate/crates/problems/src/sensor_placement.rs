//! SensorPlacement: a serial manipulator with uncertain joint angles must
//! bring its end effector to a mounting point inside a small walled
//! enclosure. Touching a wall with the end effector reveals which wall it is.

use std::sync::Arc;

use advt_core::{BoundedMetricSpace, Observation, ObservationMode, PomdpModel, Step};
use nalgebra::{Rotation3, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Deserialize;

use crate::config::{ensure, ProblemError, SolverDefaults};
use crate::shapes::Aabb;
use crate::{Benchmark, TERMINAL_OBSERVATION};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorPlacementConfig {
    pub discount: f64,
    pub goal_reward: f64,
    pub collision_reward: f64,
    /// Total length of the chain, split evenly over the links.
    pub chain_length: f64,
    /// Nominal angles of the leading joints; the remaining joints are 0.
    pub nominal_joints: Vec<f64>,
    /// Half-width of the uniform initial belief around the nominal angles.
    pub initial_spread: f64,
    pub max_velocity: f64,
    pub control_noise: f64,
    pub joint_limit: f64,
    /// Goal position relative to the nominal end-effector position.
    pub goal_offset: [f64; 3],
    pub goal_radius: f64,
    /// The enclosure is a square tube along the y axis centred on the goal.
    pub tube_half_width: f64,
    pub tube_half_length: f64,
    pub wall_thickness: f64,
    pub contact_margin: f64,
    pub link_radius: f64,
    /// Leading fraction of the last link that can collide.
    pub collision_fraction: f64,
    pub motion_substeps: usize,
    /// End-effector distance per step assumed by the value heuristic.
    pub heuristic_speed: f64,
    pub solver: SolverDefaults,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Running,
    Goal,
    Collision,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorPlacementState<const D: usize> {
    pub angles: [f64; D],
    pub status: Status,
}

#[derive(Debug, Clone)]
pub struct SensorPlacement<const D: usize> {
    config: SensorPlacementConfig,
    nominal: [f64; D],
    goal: [f64; 3],
    walls: Vec<Aabb>,
    space: Arc<BoundedMetricSpace<f64>>,
}

/// Outcome of moving the arm along a straight path in joint space.
enum Motion<const D: usize> {
    Free([f64; D]),
    Blocked([f64; D], usize),
    Goal([f64; D]),
    Collision([f64; D]),
}

impl<const D: usize> SensorPlacement<D> {
    pub fn new(config: SensorPlacementConfig) -> Result<Self, ProblemError> {
        ensure(D >= 3, "the chain needs at least three joints")?;
        ensure(config.nominal_joints.len() <= D, "more nominal angles than joints")?;
        ensure(config.chain_length > 0.0 && config.max_velocity > 0.0, "chain constants must be positive")?;
        ensure(config.motion_substeps > 0, "motion substeps must be positive")?;
        ensure((0.0..=1.0).contains(&config.collision_fraction), "collision fraction must lie in [0, 1]")?;
        let nominal: [f64; D] = std::array::from_fn(|i| config.nominal_joints.get(i).copied().unwrap_or(0.0));
        let mut model = Self {
            nominal,
            goal: [0.0; 3],
            walls: Vec::new(),
            space: Arc::new(
                BoundedMetricSpace::new(vec![-config.max_velocity; D], vec![config.max_velocity; D])
                    .map_err(|e| ProblemError::Invalid(e.to_string()))?,
            ),
            config,
        };
        let ee = model.end_effector(&nominal);
        let c = &model.config;
        model.goal = std::array::from_fn(|i| ee[i] + c.goal_offset[i]);
        let g = model.goal;
        let (w, t, l) = (c.tube_half_width, c.wall_thickness, c.tube_half_length);
        let y = (g[1] - l, g[1] + l);
        model.walls = vec![
            Aabb::new(vec![g[0] - w - t, y.0, g[2] - w - t], vec![g[0] - w, y.1, g[2] + w + t]),
            Aabb::new(vec![g[0] + w, y.0, g[2] - w - t], vec![g[0] + w + t, y.1, g[2] + w + t]),
            Aabb::new(vec![g[0] - w, y.0, g[2] - w - t], vec![g[0] + w, y.1, g[2] - w]),
            Aabb::new(vec![g[0] - w, y.0, g[2] + w], vec![g[0] + w, y.1, g[2] + w + t]),
        ];
        ensure(
            model.check(&nominal).is_none(),
            "nominal configuration touches the enclosure",
        )?;
        Ok(model)
    }

    pub fn config(&self) -> &SensorPlacementConfig {
        &self.config
    }

    pub fn nominal_angles(&self) -> &[f64; D] {
        &self.nominal
    }

    pub fn goal(&self) -> [f64; 3] {
        self.goal
    }

    pub fn walls(&self) -> &[Aabb] {
        &self.walls
    }

    /// Joint positions from the base to the end effector. Joint `i` turns
    /// about the local z axis for even `i` and the local y axis for odd `i`;
    /// every link extends along the local x axis.
    pub fn forward_kinematics(&self, angles: &[f64; D]) -> Vec<[f64; 3]> {
        let link = Vector3::new(self.config.chain_length / D as f64, 0.0, 0.0);
        let mut rot = Rotation3::identity();
        let mut p = Vector3::zeros();
        let mut out = Vec::with_capacity(D + 1);
        out.push([0.0; 3]);
        for (i, &theta) in angles.iter().enumerate() {
            let axis = if i % 2 == 0 { Vector3::z_axis() } else { Vector3::y_axis() };
            rot *= Rotation3::from_axis_angle(&axis, theta);
            p += rot * link;
            out.push([p.x, p.y, p.z]);
        }
        out
    }

    pub fn end_effector(&self, angles: &[f64; D]) -> [f64; 3] {
        *self.forward_kinematics(angles).last().expect("chain has links")
    }

    /// Wall (0-based) in contact with the end effector, if any.
    fn contact(&self, ee: &[f64; 3]) -> Option<usize> {
        self.walls.iter().position(|w| w.distance(ee) <= self.config.contact_margin)
    }

    fn link_collides(&self, points: &[[f64; 3]]) -> bool {
        let r = self.config.link_radius;
        let last = points.len() - 2;
        (0..=last).any(|i| {
            let from = &points[i];
            let to: [f64; 3] = if i == last {
                let f = self.config.collision_fraction;
                std::array::from_fn(|k| from[k] + f * (points[i + 1][k] - from[k]))
            } else {
                points[i + 1]
            };
            self.walls
                .iter()
                .any(|w| w.near_segment(from, &to, r) && w.segment_distance(from, &to) <= r)
        })
    }

    /// Collision or end-effector penetration at a single configuration.
    fn check(&self, angles: &[f64; D]) -> Option<Result<usize, ()>> {
        let points = self.forward_kinematics(angles);
        if self.link_collides(&points) {
            return Some(Err(()));
        }
        let ee = points[D];
        self.walls.iter().position(|w| w.contains(&ee)).map(Ok)
    }

    /// Centre of the tube opening facing the base.
    pub fn tube_mouth(&self) -> [f64; 3] {
        [self.goal[0], self.goal[1] - self.config.tube_half_length, self.goal[2]]
    }

    /// Length of the end-effector route to the goal: straight once inside
    /// the tube, otherwise through the mouth.
    pub fn path_to_goal(&self, ee: &[f64; 3]) -> f64 {
        let mouth = self.tube_mouth();
        if ee[1] >= mouth[1] {
            crate::shapes::dist(ee, &self.goal)
        } else {
            crate::shapes::dist(ee, &mouth) + crate::shapes::dist(&mouth, &self.goal)
        }
    }

    fn in_goal(&self, angles: &[f64; D]) -> bool {
        crate::shapes::dist(&self.end_effector(angles), &self.goal) <= self.config.goal_radius
    }

    fn move_arm(&self, from: &[f64; D], to: &[f64; D]) -> Motion<D> {
        let n = self.config.motion_substeps;
        let mut last = *from;
        for k in 1..=n {
            let t = k as f64 / n as f64;
            let q: [f64; D] = std::array::from_fn(|i| from[i] + t * (to[i] - from[i]));
            match self.check(&q) {
                Some(Err(())) => return Motion::Collision(q),
                Some(Ok(wall)) => return Motion::Blocked(last, wall),
                None => {}
            }
            if self.in_goal(&q) {
                return Motion::Goal(q);
            }
            last = q;
        }
        Motion::Free(last)
    }

    /// Noise-free transition for a commanded joint displacement.
    pub fn apply(&self, s: &SensorPlacementState<D>, delta: &[f64; D]) -> (SensorPlacementState<D>, Option<usize>, f64) {
        let lim = self.config.joint_limit;
        let target: [f64; D] = std::array::from_fn(|i| (s.angles[i] + delta[i]).clamp(-lim, lim));
        let (angles, status, blocked) = match self.move_arm(&s.angles, &target) {
            Motion::Free(q) => (q, Status::Running, None),
            Motion::Blocked(q, wall) => (q, Status::Running, Some(wall)),
            Motion::Goal(q) => (q, Status::Goal, None),
            Motion::Collision(q) => (q, Status::Collision, None),
        };
        let reward = match status {
            Status::Running => 0.0,
            Status::Goal => self.config.goal_reward,
            Status::Collision => self.config.collision_reward,
        };
        let wall = blocked.or_else(|| self.contact(&self.end_effector(&angles)));
        (SensorPlacementState { angles, status }, wall, reward)
    }
}

impl<const D: usize> PomdpModel<f64> for SensorPlacement<D> {
    type State = SensorPlacementState<D>;

    fn action_space(&self) -> &Arc<BoundedMetricSpace<f64>> {
        &self.space
    }

    fn discount(&self) -> f64 {
        self.config.discount
    }

    fn observation_mode(&self) -> ObservationMode<f64> {
        ObservationMode::Discrete
    }

    fn sample_initial_state<R: Rng + ?Sized>(&self, rng: &mut R) -> SensorPlacementState<D> {
        let h = self.config.initial_spread;
        SensorPlacementState {
            angles: std::array::from_fn(|i| rng.random_range(self.nominal[i] - h..=self.nominal[i] + h)),
            status: Status::Running,
        }
    }

    fn step<R: Rng + ?Sized>(
        &self,
        s: &SensorPlacementState<D>,
        a: &[f64],
        rng: &mut R,
    ) -> Step<SensorPlacementState<D>, f64> {
        let v = self.config.max_velocity;
        let sigma = self.config.control_noise;
        let delta: [f64; D] = std::array::from_fn(|i| {
            let noise: f64 = rng.sample(StandardNormal);
            a[i].clamp(-v, v) + sigma * noise
        });
        let (next_state, wall, reward) = self.apply(s, &delta);
        let key = if next_state.status == Status::Running {
            wall.map_or(0, |w| w as u64 + 1)
        } else {
            TERMINAL_OBSERVATION
        };
        Step {
            next_state,
            observation: Observation::Discrete(key),
            reward,
        }
    }

    fn is_terminal(&self, s: &SensorPlacementState<D>) -> bool {
        s.status != Status::Running
    }

    fn is_success(&self, s: &SensorPlacementState<D>) -> bool {
        s.status == Status::Goal
    }

    /// Discounted goal reward after moving the end effector to the goal,
    /// passing through the tube mouth when it is still outside the tube.
    /// Step counts are kept fractional.
    fn rollout_heuristic<R: Rng + ?Sized>(&self, s: &SensorPlacementState<D>, _rng: &mut R) -> Option<f64> {
        let c = &self.config;
        let ee = self.end_effector(&s.angles);
        let d = self.path_to_goal(&ee);
        let steps = (d - c.goal_radius).max(0.0) / c.heuristic_speed;
        Some(c.goal_reward * c.discount.powf((steps - 1.0).max(0.0)))
    }
}

impl<const D: usize> Benchmark for SensorPlacement<D> {
    fn solver_defaults(&self) -> &SolverDefaults {
        &self.config.solver
    }
}
