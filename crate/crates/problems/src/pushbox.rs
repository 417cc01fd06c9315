//! Pushbox: a disk robot pushes a disk puck into a goal region while only
//! sensing a noisy bearing to the puck and whether it touched it.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::Arc;

use advt_core::{BoundedMetricSpace, Observation, ObservationMode, PomdpModel, Step};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Deserialize;

use crate::config::{ensure, ProblemError, SolverDefaults};
use crate::{Benchmark, TERMINAL_OBSERVATION};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PushboxConfig {
    pub discount: f64,
    pub goal_reward: f64,
    pub collision_reward: f64,
    pub arena_size: f64,
    pub robot_radius: f64,
    pub puck_radius: f64,
    pub robot_start: Vec<f64>,
    pub puck_mean: Vec<f64>,
    pub puck_sd: f64,
    pub goal_center: Vec<f64>,
    pub goal_radius: f64,
    pub max_displacement: f64,
    pub robot_noise: f64,
    pub push_gain: f64,
    pub push_noise: f64,
    pub puck_noise: f64,
    pub bearing_sectors: u64,
    pub bearing_noise: f64,
    /// Elevation bands of the bearing sensor (3D only).
    pub elevation_bands: u64,
    /// Distance per step assumed by the value heuristic while pushing.
    pub heuristic_push_speed: f64,
    pub solver: SolverDefaults,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Running,
    Goal,
    Collision,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PushboxState<const D: usize> {
    pub robot: [f64; D],
    pub puck: [f64; D],
    pub status: Status,
}

#[derive(Debug, Clone)]
pub struct Pushbox<const D: usize> {
    config: PushboxConfig,
    space: Arc<BoundedMetricSpace<f64>>,
}

fn sub<const D: usize>(a: &[f64; D], b: &[f64; D]) -> [f64; D] {
    std::array::from_fn(|i| a[i] - b[i])
}

fn dot<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm<const D: usize>(a: &[f64; D]) -> f64 {
    dot(a, a).sqrt()
}

/// Shortest path from `p` to `q` that stays outside the open ball of radius
/// `r` around `c`: straight when the segment clears the ball, otherwise two
/// tangents joined by an arc.
pub fn detour_length<const D: usize>(p: &[f64; D], q: &[f64; D], c: &[f64; D], r: f64) -> f64 {
    let pq = sub(q, p);
    let straight = norm(&pq);
    let len2 = dot(&pq, &pq);
    let t = if len2 > 0.0 { (dot(&sub(c, p), &pq) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let closest: [f64; D] = std::array::from_fn(|i| p[i] + t * pq[i]);
    if norm(&sub(&closest, c)) >= r {
        return straight;
    }
    let (u, v) = (sub(p, c), sub(q, c));
    let (du, dv) = (norm(&u).max(r), norm(&v).max(r));
    let theta = (dot(&u, &v) / (norm(&u) * norm(&v))).clamp(-1.0, 1.0).acos();
    let arc = (theta - (r / du).acos() - (r / dv).acos()).max(0.0);
    (du * du - r * r).sqrt() + (dv * dv - r * r).sqrt() + r * arc
}

/// First `t ∈ [0, 1]` at which a disk centred at `from + t d` touches the
/// disk at `other` (centre distance `reach`). Already touching counts at
/// `t = 0` when the motion closes the gap.
fn contact_time<const D: usize>(from: &[f64; D], d: &[f64; D], other: &[f64; D], reach: f64) -> Option<f64> {
    let w = sub(from, other);
    let wd = dot(&w, d);
    let c = dot(&w, &w) - reach * reach;
    if c <= 0.0 {
        return (wd < 0.0).then_some(0.0);
    }
    let dd = dot(d, d);
    if wd >= 0.0 || dd == 0.0 {
        return None;
    }
    let disc = wd * wd - dd * c;
    if disc < 0.0 {
        return None;
    }
    let t = (-wd - disc.sqrt()) / dd;
    (t <= 1.0).then_some(t)
}

impl<const D: usize> Pushbox<D> {
    pub fn new(config: PushboxConfig) -> Result<Self, ProblemError> {
        ensure(D == 2 || D == 3, "pushbox is defined in 2 or 3 dimensions")?;
        for v in [&config.robot_start, &config.puck_mean, &config.goal_center] {
            ensure(v.len() == D, "pushbox positions must match the dimension")?;
        }
        ensure(config.arena_size > 0.0, "arena size must be positive")?;
        ensure(config.max_displacement > 0.0, "max displacement must be positive")?;
        ensure(config.bearing_sectors > 0 && config.elevation_bands > 0, "sensor resolution must be positive")?;
        ensure(config.heuristic_push_speed > 0.0, "heuristic push speed must be positive")?;
        ensure((0.0..=1.0).contains(&config.discount), "discount must lie in [0, 1]")?;
        let m = config.max_displacement;
        let space = Arc::new(BoundedMetricSpace::new(vec![-m; D], vec![m; D]).map_err(|e| ProblemError::Invalid(e.to_string()))?);
        Ok(Self { config, space })
    }

    pub fn config(&self) -> &PushboxConfig {
        &self.config
    }

    fn array(v: &[f64]) -> [f64; D] {
        std::array::from_fn(|i| v[i])
    }

    fn inside_arena(&self, p: &[f64; D], radius: f64) -> bool {
        p.iter().all(|&x| x >= radius && x <= self.config.arena_size - radius)
    }

    fn in_goal(&self, puck: &[f64; D]) -> bool {
        norm(&sub(puck, &Self::array(&self.config.goal_center))) <= self.config.goal_radius
    }

    fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
        rng.sample(StandardNormal)
    }

    /// Discrete bearing reading with the contact bit in the highest block.
    pub fn observation_key<R: Rng + ?Sized>(&self, robot: &[f64; D], puck: &[f64; D], contact: bool, rng: &mut R) -> u64 {
        let c = &self.config;
        let rel = sub(puck, robot);
        let azimuth = (rel[1].atan2(rel[0]) + c.bearing_noise * Self::normal(rng)).rem_euclid(TAU);
        let sector = ((azimuth / (TAU / c.bearing_sectors as f64)) as u64).min(c.bearing_sectors - 1);
        let bands = if D == 3 { c.elevation_bands } else { 1 };
        let band = if D == 3 {
            let elev = rel[2].atan2(rel[0].hypot(rel[1])) + c.bearing_noise * Self::normal(rng);
            let e = (elev.clamp(-FRAC_PI_2, FRAC_PI_2) + FRAC_PI_2) / (PI / bands as f64);
            (e as u64).min(bands - 1)
        } else {
            0
        };
        let per_contact = c.bearing_sectors * bands;
        sector + c.bearing_sectors * band + u64::from(contact) * per_contact
    }
}

impl<const D: usize> PomdpModel<f64> for Pushbox<D> {
    type State = PushboxState<D>;

    fn action_space(&self) -> &Arc<BoundedMetricSpace<f64>> {
        &self.space
    }

    fn discount(&self) -> f64 {
        self.config.discount
    }

    fn observation_mode(&self) -> ObservationMode<f64> {
        ObservationMode::Discrete
    }

    fn sample_initial_state<R: Rng + ?Sized>(&self, rng: &mut R) -> PushboxState<D> {
        let c = &self.config;
        let robot = Self::array(&c.robot_start);
        let reach = c.robot_radius + c.puck_radius;
        loop {
            let puck: [f64; D] = std::array::from_fn(|i| c.puck_mean[i] + c.puck_sd * Self::normal(rng));
            if self.inside_arena(&puck, c.puck_radius) && !self.in_goal(&puck) && norm(&sub(&puck, &robot)) > reach {
                return PushboxState {
                    robot,
                    puck,
                    status: Status::Running,
                };
            }
        }
    }

    fn step<R: Rng + ?Sized>(&self, s: &PushboxState<D>, a: &[f64], rng: &mut R) -> Step<PushboxState<D>, f64> {
        let c = &self.config;
        let d: [f64; D] = std::array::from_fn(|i| a[i] + c.robot_noise * Self::normal(rng));
        let reach = c.robot_radius + c.puck_radius;
        let mut robot = s.robot;
        let mut puck = s.puck;
        let contact = match contact_time(&s.robot, &d, &s.puck, reach) {
            Some(t) => {
                for i in 0..D {
                    robot[i] = s.robot[i] + t * d[i];
                }
                let line = sub(&puck, &robot);
                let len = norm(&line);
                let approach = (1.0 - t) * dot(&d, &line) / len;
                if approach > 0.0 {
                    let speed = c.push_gain * approach * (1.0 + c.push_noise * Self::normal(rng));
                    for i in 0..D {
                        puck[i] += speed * line[i] / len + c.puck_noise * Self::normal(rng);
                    }
                }
                true
            }
            None => {
                for i in 0..D {
                    robot[i] += d[i];
                }
                false
            }
        };
        let (status, reward) = if !self.inside_arena(&robot, c.robot_radius) || !self.inside_arena(&puck, c.puck_radius) {
            (Status::Collision, c.collision_reward)
        } else if self.in_goal(&puck) {
            (Status::Goal, c.goal_reward)
        } else {
            (Status::Running, 0.0)
        };
        let observation = if status == Status::Running {
            Observation::Discrete(self.observation_key(&robot, &puck, contact, rng))
        } else {
            Observation::Discrete(TERMINAL_OBSERVATION)
        };
        Step {
            next_state: PushboxState { robot, puck, status },
            observation,
            reward,
        }
    }

    fn is_terminal(&self, s: &PushboxState<D>) -> bool {
        s.status != Status::Running
    }

    fn is_success(&self, s: &PushboxState<D>) -> bool {
        s.status == Status::Goal
    }

    /// Discounted goal reward after walking around the puck to its far side
    /// and pushing it straight to the goal boundary. Step counts are kept
    /// fractional.
    fn rollout_heuristic<R: Rng + ?Sized>(&self, s: &PushboxState<D>, _rng: &mut R) -> Option<f64> {
        let c = &self.config;
        let to_goal = sub(&Self::array(&c.goal_center), &s.puck);
        let dist = norm(&to_goal);
        let reach = c.robot_radius + c.puck_radius;
        let behind: [f64; D] = std::array::from_fn(|i| s.puck[i] - to_goal[i] / dist * reach);
        let approach = detour_length(&s.robot, &behind, &s.puck, reach) / c.max_displacement;
        let push = (dist - c.goal_radius).max(0.0) / c.heuristic_push_speed;
        Some(c.goal_reward * c.discount.powf((approach + push - 1.0).max(0.0)))
    }
}

impl<const D: usize> Benchmark for Pushbox<D> {
    fn solver_defaults(&self) -> &SolverDefaults {
        &self.config.solver
    }
}
