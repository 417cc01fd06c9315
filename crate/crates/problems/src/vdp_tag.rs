//! VDP-Tag: tag a target drifting along the Van der Pol field, sensed by
//! eight noisy range beams that are only accurate while a costly sensor is on.

use std::f64::consts::TAU;
use std::sync::Arc;

use advt_core::{BoundedMetricSpace, Observation, ObservationMode, PomdpModel, Step};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Deserialize;

use crate::config::{ensure, ProblemError, SolverDefaults};
use crate::shapes::Aabb;
use crate::{Benchmark, TAGGED_READING};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VdpTagMap {
    pub arena: Aabb,
    pub agent_start: [f64; 2],
    #[serde(rename = "obstacle")]
    pub obstacles: Vec<Aabb>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VdpTagConfig {
    pub discount: f64,
    pub tag_reward: f64,
    pub sensor_reward: f64,
    pub mu: f64,
    pub dt: f64,
    pub rk4_substeps: usize,
    pub target_noise: f64,
    pub agent_speed: f64,
    pub tag_radius: f64,
    pub beams: usize,
    pub beam_range: f64,
    pub active_noise: f64,
    pub passive_noise: f64,
    /// Continuous observations closer than this share a belief child.
    pub observation_threshold: f64,
    pub map: String,
    pub solver: SolverDefaults,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VdpTagState {
    pub agent: [f64; 2],
    pub target: [f64; 2],
    pub tagged: bool,
}

#[derive(Debug, Clone)]
pub struct VdpTag {
    config: VdpTagConfig,
    map: VdpTagMap,
    space: Arc<BoundedMetricSpace<f64>>,
}

/// Van der Pol vector field.
pub fn vdp_field(mu: f64, p: [f64; 2]) -> [f64; 2] {
    let [x, y] = p;
    [mu * (x - x * x * x / 3.0 - y), x / mu]
}

/// One classical Runge-Kutta step of size `h`.
pub fn rk4_step(mu: f64, p: [f64; 2], h: f64) -> [f64; 2] {
    let at = |p: [f64; 2], k: [f64; 2], s: f64| [p[0] + s * k[0], p[1] + s * k[1]];
    let k1 = vdp_field(mu, p);
    let k2 = vdp_field(mu, at(p, k1, h / 2.0));
    let k3 = vdp_field(mu, at(p, k2, h / 2.0));
    let k4 = vdp_field(mu, at(p, k3, h));
    [
        p[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        p[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Integrates the field over `dt` with `substeps` equal RK4 steps.
pub fn integrate(mu: f64, mut p: [f64; 2], dt: f64, substeps: usize) -> [f64; 2] {
    let h = dt / substeps as f64;
    for _ in 0..substeps {
        p = rk4_step(mu, p, h);
    }
    p
}

/// Distance from the origin to the segment `[a, b]`.
fn segment_origin_distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let dd = d[0] * d[0] + d[1] * d[1];
    let t = if dd == 0.0 {
        0.0
    } else {
        (-(a[0] * d[0] + a[1] * d[1]) / dd).clamp(0.0, 1.0)
    };
    (a[0] + t * d[0]).hypot(a[1] + t * d[1])
}

impl VdpTag {
    pub fn new(config: VdpTagConfig, map: VdpTagMap) -> Result<Self, ProblemError> {
        ensure(map.arena.dimension() == 2 && map.obstacles.iter().all(|o| o.dimension() == 2), "map must be planar")?;
        ensure(map.arena.contains(&map.agent_start), "agent start outside the arena")?;
        ensure(config.rk4_substeps > 0, "RK4 substeps must be positive")?;
        ensure(config.beams > 0, "at least one beam is needed")?;
        ensure(config.observation_threshold > 0.0, "observation threshold must be positive")?;
        let space = Arc::new(BoundedMetricSpace::new(vec![0.0, 0.0], vec![TAU, 1.0]).map_err(|e| ProblemError::Invalid(e.to_string()))?);
        Ok(Self { config, map, space })
    }

    pub fn config(&self) -> &VdpTagConfig {
        &self.config
    }

    pub fn map(&self) -> &VdpTagMap {
        &self.map
    }

    /// Agent position after moving along `heading`, stopped just before the
    /// first obstacle or the arena boundary.
    pub fn move_agent(&self, from: [f64; 2], heading: f64) -> [f64; 2] {
        let step = self.config.agent_speed * self.config.dt;
        let to = [from[0] + step * heading.cos(), from[1] + step * heading.sin()];
        let mut stop: f64 = 1.0;
        for o in &self.map.obstacles {
            if let Some(t) = o.segment_entry(&from, &to) {
                stop = stop.min(t);
            }
        }
        let arena = &self.map.arena;
        for i in 0..2 {
            let d = to[i] - from[i];
            if d > 0.0 && to[i] > arena.max[i] {
                stop = stop.min((arena.max[i] - from[i]) / d);
            } else if d < 0.0 && to[i] < arena.min[i] {
                stop = stop.min((arena.min[i] - from[i]) / d);
            }
        }
        if stop < 1.0 {
            let t = (stop - 1e-6).max(0.0);
            [from[0] + t * (to[0] - from[0]), from[1] + t * (to[1] - from[1])]
        } else {
            to
        }
    }

    /// Beam readings for a target at `rel` relative to the agent.
    pub fn beam_readings<R: Rng + ?Sized>(&self, rel: [f64; 2], sensor_on: bool, rng: &mut R) -> Vec<f64> {
        let c = &self.config;
        let sigma = if sensor_on { c.active_noise } else { c.passive_noise };
        let d = rel[0].hypot(rel[1]);
        let sector = ((rel[1].atan2(rel[0]).rem_euclid(TAU) / (TAU / c.beams as f64)) as usize).min(c.beams - 1);
        (0..c.beams)
            .map(|i| {
                let exact = if i == sector && d <= c.beam_range { d } else { c.beam_range };
                let noise: f64 = rng.sample(StandardNormal);
                exact + sigma * noise
            })
            .collect()
    }
}

impl PomdpModel<f64> for VdpTag {
    type State = VdpTagState;

    fn action_space(&self) -> &Arc<BoundedMetricSpace<f64>> {
        &self.space
    }

    fn discount(&self) -> f64 {
        self.config.discount
    }

    fn observation_mode(&self) -> ObservationMode<f64> {
        ObservationMode::Continuous {
            threshold: self.config.observation_threshold,
        }
    }

    fn sample_initial_state<R: Rng + ?Sized>(&self, rng: &mut R) -> VdpTagState {
        let a = &self.map.arena;
        let agent = self.map.agent_start;
        loop {
            let target = [rng.random_range(a.min[0]..=a.max[0]), rng.random_range(a.min[1]..=a.max[1])];
            if (target[0] - agent[0]).hypot(target[1] - agent[1]) > self.config.tag_radius {
                return VdpTagState {
                    agent,
                    target,
                    tagged: false,
                };
            }
        }
    }

    fn step<R: Rng + ?Sized>(&self, s: &VdpTagState, a: &[f64], rng: &mut R) -> Step<VdpTagState, f64> {
        let c = &self.config;
        let sensor_on = a[1] >= 0.5;
        let agent = self.move_agent(s.agent, a[0]);
        let drift = integrate(c.mu, s.target, c.dt, c.rk4_substeps);
        let n0: f64 = rng.sample(StandardNormal);
        let n1: f64 = rng.sample(StandardNormal);
        let target = [drift[0] + c.target_noise * n0, drift[1] + c.target_noise * n1];
        let rel0 = [s.agent[0] - s.target[0], s.agent[1] - s.target[1]];
        let rel1 = [agent[0] - target[0], agent[1] - target[1]];
        let tagged = segment_origin_distance(rel0, rel1) <= c.tag_radius;
        let mut reward = if tagged { c.tag_reward } else { 0.0 };
        if sensor_on {
            reward += c.sensor_reward;
        }
        let observation = if tagged {
            Observation::Continuous(vec![TAGGED_READING; c.beams])
        } else {
            Observation::Continuous(self.beam_readings([target[0] - agent[0], target[1] - agent[1]], sensor_on, rng))
        };
        Step {
            next_state: VdpTagState { agent, target, tagged },
            observation,
            reward,
        }
    }

    fn is_terminal(&self, s: &VdpTagState) -> bool {
        s.tagged
    }

    fn is_success(&self, s: &VdpTagState) -> bool {
        s.tagged
    }

    fn rollout_heuristic<R: Rng + ?Sized>(&self, s: &VdpTagState, _rng: &mut R) -> Option<f64> {
        let c = &self.config;
        let d = (s.target[0] - s.agent[0]).hypot(s.target[1] - s.agent[1]);
        let steps = ((d - c.tag_radius).max(0.0) / (c.agent_speed * c.dt)).ceil().max(1.0);
        Some(c.tag_reward * c.discount.powf(steps - 1.0))
    }
}

impl Benchmark for VdpTag {
    fn solver_defaults(&self) -> &SolverDefaults {
        &self.config.solver
    }
}
