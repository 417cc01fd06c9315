use crate::pomdp::{match_observation_edge, Observation, ObservationMode};
use crate::voronoi::ActionId;
use crate::Scalar;

use super::ActionSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BeliefId(pub usize);

/// Node `b` of the belief tree.
#[derive(Debug, Clone)]
pub struct BeliefNode<S, T> {
    /// States deposited by episodes (or by the belief update at the root).
    pub particles: Vec<S>,
    /// `N(b)`.
    pub visits: u64,
    /// `V̂*(b)`.
    pub value: T,
    pub actions: ActionSet<T>,
    /// Observation edges per action, in insertion order.
    children: Vec<Vec<(Observation<T>, BeliefId)>>,
}

impl<S, T: Scalar> BeliefNode<S, T> {
    pub fn new(particles: Vec<S>, value: T, actions: ActionSet<T>) -> Self {
        Self {
            particles,
            visits: 0,
            value,
            actions,
            children: Vec::new(),
        }
    }

    /// Child reached through `(action, observation)`.
    pub fn child(&self, action: ActionId, observation: &Observation<T>, mode: ObservationMode<T>) -> Option<BeliefId> {
        let edges = self.children.get(action.0)?;
        match_observation_edge(observation, edges.iter().map(|(o, _)| o), mode).map(|i| edges[i].1)
    }

    pub fn edges(&self, action: ActionId) -> &[(Observation<T>, BeliefId)] {
        self.children.get(action.0).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn child_ids(&self) -> impl Iterator<Item = BeliefId> + '_ {
        self.children.iter().flatten().map(|(_, id)| *id)
    }

    pub(crate) fn add_child(&mut self, action: ActionId, observation: Observation<T>, child: BeliefId) {
        if self.children.len() <= action.0 {
            self.children.resize_with(action.0 + 1, Vec::new);
        }
        self.children[action.0].push((observation, child));
    }

    fn remap_children(&mut self, map: &[Option<BeliefId>]) {
        for edges in &mut self.children {
            for (_, id) in edges.iter_mut() {
                *id = map[id.0].expect("reachable child");
            }
        }
    }
}

/// Arena of belief nodes; the root is always `BeliefId(0)`.
#[derive(Debug, Clone)]
pub struct BeliefTree<S, T> {
    nodes: Vec<BeliefNode<S, T>>,
}

impl<S, T: Scalar> BeliefTree<S, T> {
    pub fn new(root: BeliefNode<S, T>) -> Self {
        Self { nodes: vec![root] }
    }

    pub fn root(&self) -> BeliefId {
        BeliefId(0)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: BeliefId) -> &BeliefNode<S, T> {
        &self.nodes[id.0]
    }

    pub fn node_mut(&mut self, id: BeliefId) -> &mut BeliefNode<S, T> {
        &mut self.nodes[id.0]
    }

    pub fn nodes(&self) -> impl Iterator<Item = (BeliefId, &BeliefNode<S, T>)> {
        self.nodes.iter().enumerate().map(|(i, n)| (BeliefId(i), n))
    }

    pub(crate) fn push(&mut self, node: BeliefNode<S, T>) -> BeliefId {
        self.nodes.push(node);
        BeliefId(self.nodes.len() - 1)
    }

    /// Makes `new_root` the root and drops every node not below it.
    pub(crate) fn reroot(&mut self, new_root: BeliefId) {
        let mut map: Vec<Option<BeliefId>> = vec![None; self.nodes.len()];
        let mut order = vec![new_root];
        map[new_root.0] = Some(BeliefId(0));
        let mut head = 0;
        while head < order.len() {
            let id = order[head];
            head += 1;
            for child in self.nodes[id.0].child_ids() {
                if map[child.0].is_none() {
                    map[child.0] = Some(BeliefId(order.len()));
                    order.push(child);
                }
            }
        }
        let mut slots: Vec<Option<BeliefNode<S, T>>> = std::mem::take(&mut self.nodes).into_iter().map(Some).collect();
        self.nodes = order
            .iter()
            .map(|id| {
                let mut node = slots[id.0].take().expect("each node moved once");
                node.remap_children(&map);
                node
            })
            .collect();
    }
}
