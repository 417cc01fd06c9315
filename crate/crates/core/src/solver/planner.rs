use std::time::{Duration, Instant};

use rand::Rng;

use crate::geometry::GeometryParams;
use crate::pomdp::{filter_particles, Observation, ParticleSet, PomdpError, PomdpModel};
use crate::voronoi::ActionId;
use crate::Scalar;

use super::{
    bellman_update, default_rollout, monte_carlo_update, ucb_value, ActionSet, BackupMode, BeliefId,
    BeliefNode, BeliefTree, Budget, FinalActionRule, SolverConfig, SolverError,
};

/// One `(s, a, o, r)` record. The closing entry has neither action nor
/// observation and reward zero.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeEntry<S, T> {
    pub state: S,
    pub action: Option<Vec<T>>,
    pub observation: Option<Observation<T>>,
    pub reward: T,
}

/// Edge of the belief tree traversed by an episode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathStep<T> {
    pub belief: BeliefId,
    pub action: ActionId,
    pub reward: T,
    pub child: BeliefId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Episode<S, T> {
    pub entries: Vec<EpisodeEntry<S, T>>,
    pub path: Vec<PathStep<T>>,
    /// Whether the episode ended by creating a new belief.
    pub created_belief: bool,
    /// Value used past the last edge by the Monte Carlo backup.
    pub leaf_value: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdvanceOutcome {
    /// The `(a, o)` child existed and its subtree was kept.
    pub reused: bool,
    /// The belief update accepted no particle and fell back to propagating
    /// without the observation.
    pub depleted: bool,
}

/// Online planner owning the belief tree rooted at the current belief.
pub struct Planner<'m, T: Scalar, M: PomdpModel<T>> {
    model: &'m M,
    config: SolverConfig<T>,
    geometry: GeometryParams<T>,
    tree: BeliefTree<M::State, T>,
}

impl<'m, T: Scalar, M: PomdpModel<T>> Planner<'m, T, M> {
    /// Root belief of `particle_capacity` draws from the initial distribution.
    pub fn new<R: Rng + ?Sized>(model: &'m M, config: SolverConfig<T>, rng: &mut R) -> Result<Self, SolverError> {
        let particles = ParticleSet::from_initial(model, config.particle_capacity, rng);
        Self::from_particles(model, config, particles.states().to_vec(), rng)
    }

    pub fn from_particles<R: Rng + ?Sized>(
        model: &'m M,
        config: SolverConfig<T>,
        particles: Vec<M::State>,
        rng: &mut R,
    ) -> Result<Self, SolverError> {
        config.validate()?;
        if particles.is_empty() {
            return Err(PomdpError::EmptyBelief.into());
        }
        let geometry = config.geometry_for(model.action_space());
        let actions = ActionSet::new(config.action_set, model.action_space(), rng);
        let tree = BeliefTree::new(BeliefNode::new(particles, T::zero(), actions));
        Ok(Self {
            model,
            config,
            geometry,
            tree,
        })
    }

    pub fn config(&self) -> &SolverConfig<T> {
        &self.config
    }

    pub fn tree(&self) -> &BeliefTree<M::State, T> {
        &self.tree
    }

    pub fn root(&self) -> &BeliefNode<M::State, T> {
        self.tree.node(self.tree.root())
    }

    /// Runs episodes until the budget is spent and returns the chosen root action.
    pub fn plan<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<(ActionId, Vec<T>), SolverError> {
        match self.config.budget {
            Budget::Iterations(n) => {
                for _ in 0..n {
                    self.iterate(rng)?;
                }
            }
            Budget::Millis(ms) => {
                let deadline = Instant::now() + Duration::from_millis(ms);
                while Instant::now() < deadline {
                    self.iterate(rng)?;
                }
            }
        }
        let id = self.best_root_action()?;
        Ok((id, self.root().actions.anchor(id).to_vec()))
    }

    /// One episode followed by its reverse backup and refinement pass.
    pub fn iterate<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Episode<M::State, T>, SolverError> {
        let episode = self.sample_episode(rng)?;
        self.backup(&episode, rng)?;
        Ok(episode)
    }

    /// Action returned by [`plan`](Self::plan) under the configured rule;
    /// ties go to the earliest candidate.
    pub fn best_root_action(&self) -> Result<ActionId, SolverError> {
        let actions = &self.root().actions;
        let mut best: Option<(ActionId, T, u64)> = None;
        for id in actions.ids() {
            let s = actions.stats(id);
            if s.visits == 0 {
                continue;
            }
            let better = match (best, self.config.final_action) {
                (None, _) => true,
                (Some((_, q, _)), FinalActionRule::MaxValue) => s.q > q,
                (Some((_, _, n)), FinalActionRule::MaxVisits) => s.visits > n,
            };
            if better {
                best = Some((id, s.q, s.visits));
            }
        }
        best.map(|(id, _, _)| id).ok_or(SolverError::NoVisitedAction)
    }

    /// Maximiser of the diameter-aware UCB at `belief`; ties go to the
    /// earliest candidate.
    pub fn select_action(&self, belief: BeliefId) -> ActionId {
        let node = self.tree.node(belief);
        let nb = T::from_count(node.visits);
        let mut best = (ActionId(0), T::neg_infinity());
        for id in node.actions.ids() {
            let s = node.actions.stats(id);
            let u = ucb_value(
                nb,
                T::from_count(s.visits),
                s.q,
                self.config.exploration,
                self.config.lipschitz,
                node.actions.diameter(id),
            );
            if u > best.1 {
                best = (id, u);
            }
        }
        best.0
    }

    /// Value estimate for a state reached at a new belief.
    fn heuristic<R: Rng + ?Sized>(&self, state: &M::State, rng: &mut R) -> T {
        if self.model.is_terminal(state) {
            return T::zero();
        }
        self.model
            .rollout_heuristic(state, rng)
            .unwrap_or_else(|| default_rollout(self.model, state, self.config.rollout_depth, rng))
    }

    /// Descends from the root, expanding at most one belief.
    pub fn sample_episode<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Episode<M::State, T>, SolverError> {
        let mode = self.model.observation_mode();
        let root = self.tree.root();
        let mut s = self
            .tree
            .node(root)
            .particles
            .get(rng.random_range(0..self.tree.node(root).particles.len().max(1)))
            .cloned()
            .ok_or(PomdpError::EmptyBelief)?;
        let mut b = root;
        let mut entries = Vec::new();
        let mut path = Vec::new();
        let mut created_belief = false;
        let leaf_value;
        loop {
            if self.model.is_terminal(&s) {
                leaf_value = T::zero();
                break;
            }
            if path.len() >= self.config.max_depth {
                leaf_value = match self.config.backup {
                    BackupMode::MonteCarlo => self.heuristic(&s, rng),
                    BackupMode::Bellman => T::zero(),
                };
                break;
            }
            let a = self.select_action(b);
            let anchor = self.tree.node(b).actions.anchor(a).to_vec();
            let step = self.model.step(&s, &anchor, rng);

            let node = self.tree.node_mut(b);
            node.actions.stats_mut(a).visits += 1;
            node.visits += 1;
            let existing = node.child(a, &step.observation, mode);
            let child = match existing {
                Some(c) => {
                    let child = self.tree.node_mut(c);
                    if child.particles.len() < self.config.particle_capacity {
                        child.particles.push(step.next_state.clone());
                    }
                    c
                }
                None => {
                    let h = self.heuristic(&step.next_state, rng);
                    let actions = ActionSet::new(self.config.action_set, self.model.action_space(), rng);
                    let c = self
                        .tree
                        .push(BeliefNode::new(vec![step.next_state.clone()], h, actions));
                    self.tree.node_mut(b).add_child(a, step.observation.clone(), c);
                    created_belief = true;
                    c
                }
            };
            entries.push(EpisodeEntry {
                state: s,
                action: Some(anchor),
                observation: Some(step.observation),
                reward: step.reward,
            });
            path.push(PathStep {
                belief: b,
                action: a,
                reward: step.reward,
                child,
            });
            s = step.next_state;
            b = child;
            if created_belief {
                leaf_value = self.tree.node(child).value;
                break;
            }
        }
        entries.push(EpisodeEntry {
            state: s,
            action: None,
            observation: None,
            reward: T::zero(),
        });
        Ok(Episode {
            entries,
            path,
            created_belief,
            leaf_value,
        })
    }

    /// Reverse pass over the episode: update `Q̂(b, a)` and `V̂*(b)`, then
    /// refine the played cell if the refinement rule holds.
    pub fn backup<R: Rng + ?Sized>(&mut self, episode: &Episode<M::State, T>, rng: &mut R) -> Result<(), SolverError> {
        let gamma = self.model.discount();
        let mut tail = episode.leaf_value;
        for step in episode.path.iter().rev() {
            tail = step.reward + gamma * tail;
            let next_value = self.tree.node(step.child).value;
            let node = self.tree.node_mut(step.belief);
            let stats = node.actions.stats_mut(step.action);
            stats.q = match self.config.backup {
                BackupMode::Bellman => bellman_update(stats.q, stats.visits, step.reward, gamma, next_value),
                BackupMode::MonteCarlo => monte_carlo_update(stats.q, stats.visits, tail),
            };
            node.value = node.actions.max_visited_q().expect("played action was visited");
            node.actions
                .refine(step.action, self.config.refinement, &self.geometry, rng)?;
        }
        Ok(())
    }

    /// Moves the root to the belief reached by executing `action` and
    /// observing `observation`.
    pub fn advance<R: Rng + ?Sized>(
        &mut self,
        action: ActionId,
        observation: &Observation<T>,
        rng: &mut R,
    ) -> Result<AdvanceOutcome, SolverError> {
        let capacity = self.config.particle_capacity;
        let mode = self.model.observation_mode();
        let root = self.tree.node(self.tree.root());
        if action.0 >= root.actions.len() {
            return Err(SolverError::UnknownAction(action.0));
        }
        let anchor = root.actions.anchor(action).to_vec();
        let previous = ParticleSet::new(root.particles.clone());

        // The run only advances from a non-terminal state, so terminal
        // particles are dropped from the new root.
        let model = self.model;
        let live = |s: &M::State| !model.is_terminal(s);
        if let Some(child) = root.child(action, observation, mode) {
            self.tree.reroot(child);
            let root = self.tree.root();
            self.tree.node_mut(root).particles.retain(live);
            let needed = capacity.saturating_sub(self.root().particles.len());
            if needed > 0 {
                if let Ok(extra) =
                    filter_particles(self.model, &previous, &anchor, observation, needed, 100 * needed, rng)
                {
                    let fresh = extra.states().iter().filter(|s| live(s)).cloned();
                    self.tree.node_mut(root).particles.extend(fresh);
                }
            }
            if !self.root().particles.is_empty() {
                return Ok(AdvanceOutcome {
                    reused: true,
                    depleted: false,
                });
            }
        }

        let filtered = filter_particles(self.model, &previous, &anchor, observation, capacity, 100 * capacity, rng)
            .map(|set| set.states().iter().filter(|s| live(s)).cloned().collect::<Vec<_>>());
        let (particles, depleted) = match filtered {
            Ok(states) if !states.is_empty() => (states, false),
            Ok(_) | Err(PomdpError::ParticleDepletion { .. }) => {
                let mut states = Vec::with_capacity(capacity);
                let mut fallback = Vec::new();
                for _ in 0..100 * capacity {
                    if states.len() == capacity {
                        break;
                    }
                    let s = previous.sample(rng).expect("non-empty");
                    let next = self.model.step(s, &anchor, rng).next_state;
                    if live(&next) {
                        states.push(next);
                    } else if fallback.len() < capacity {
                        fallback.push(next);
                    }
                }
                (if states.is_empty() { fallback } else { states }, true)
            }
            Err(e) => return Err(e.into()),
        };
        let actions = ActionSet::new(self.config.action_set, self.model.action_space(), rng);
        self.tree = BeliefTree::new(BeliefNode::new(particles, T::zero(), actions));
        Ok(AdvanceOutcome {
            reused: false,
            depleted,
        })
    }
}
