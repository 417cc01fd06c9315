use std::sync::Arc;

use rand::Rng;

use crate::geometry::{BoundedMetricSpace, GeometryParams};
use crate::voronoi::{should_refine, ActionId, ActionStats, VoronoiError, VoronoiTree};
use crate::Scalar;

use super::ActionSetKind;

/// Candidate actions `A(b)` of one belief with their statistics.
#[derive(Debug, Clone)]
pub enum ActionSet<T> {
    Tree(VoronoiTree<T>),
    Grid(FixedGrid<T>),
}

/// Uniform grid of cell centres; never refined.
#[derive(Debug, Clone)]
pub struct FixedGrid<T> {
    anchors: Vec<Vec<T>>,
    stats: Vec<ActionStats<T>>,
}

impl<T: Scalar> FixedGrid<T> {
    pub fn new(space: &BoundedMetricSpace<T>, per_dim: usize) -> Self {
        let dim = space.dimension();
        let total = per_dim.pow(dim as u32);
        let mut anchors = Vec::with_capacity(total);
        for index in 0..total {
            let mut rest = index;
            let mut anchor = Vec::with_capacity(dim);
            for d in 0..dim {
                let cell = rest % per_dim;
                rest /= per_dim;
                let width = (space.upper()[d] - space.lower()[d]) / T::from_count(per_dim as u64);
                anchor.push(space.lower()[d] + width * (T::from_count(cell as u64) + T::lit(0.5)));
            }
            anchors.push(anchor);
        }
        Self {
            stats: vec![ActionStats::default(); anchors.len()],
            anchors,
        }
    }
}

impl<T: Scalar> ActionSet<T> {
    pub fn new<R: Rng + ?Sized>(
        kind: ActionSetKind,
        space: &Arc<BoundedMetricSpace<T>>,
        rng: &mut R,
    ) -> Self {
        match kind {
            ActionSetKind::FixedGrid { per_dim } => ActionSet::Grid(FixedGrid::new(space, per_dim)),
            other => ActionSet::Tree(VoronoiTree::new(
                space.clone(),
                other.partition_mode().expect("tree-backed kind"),
                rng,
            )),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ActionSet::Tree(t) => t.leaf_count(),
            ActionSet::Grid(g) => g.anchors.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn anchor(&self, id: ActionId) -> &[T] {
        match self {
            ActionSet::Tree(t) => t.leaf(id).anchor(),
            ActionSet::Grid(g) => &g.anchors[id.0],
        }
    }

    pub fn stats(&self, id: ActionId) -> &ActionStats<T> {
        match self {
            ActionSet::Tree(t) => t.leaf(id).stats(),
            ActionSet::Grid(g) => &g.stats[id.0],
        }
    }

    pub fn stats_mut(&mut self, id: ActionId) -> &mut ActionStats<T> {
        match self {
            ActionSet::Tree(t) => t.stats_mut(id),
            ActionSet::Grid(g) => &mut g.stats[id.0],
        }
    }

    /// Cell diameter entering the Lipschitz term; zero for the grid.
    pub fn diameter(&self, id: ActionId) -> T {
        match self {
            ActionSet::Tree(t) => t.leaf(id).diameter(),
            ActionSet::Grid(_) => T::zero(),
        }
    }

    pub fn ids(&self) -> impl ExactSizeIterator<Item = ActionId> {
        (0..self.len()).map(ActionId)
    }

    /// Largest `Q̂` over visited actions.
    pub fn max_visited_q(&self) -> Option<T> {
        self.ids()
            .map(|id| self.stats(id))
            .filter(|s| s.visits > 0)
            .map(|s| s.q)
            .reduce(T::max)
    }

    /// Splits the cell of `id` when the refinement rule holds. Returns whether
    /// a split happened.
    pub fn refine<R: Rng + ?Sized>(
        &mut self,
        id: ActionId,
        refinement: T,
        params: &GeometryParams<T>,
        rng: &mut R,
    ) -> Result<bool, VoronoiError> {
        match self {
            ActionSet::Tree(tree) => {
                let leaf = tree.leaf(id);
                if !should_refine(leaf.stats().visits, leaf.diameter(), refinement) {
                    return Ok(false);
                }
                tree.split_leaf(id, params, rng)?;
                Ok(true)
            }
            ActionSet::Grid(_) => Ok(false),
        }
    }

    pub fn tree(&self) -> Option<&VoronoiTree<T>> {
        match self {
            ActionSet::Tree(t) => Some(t),
            ActionSet::Grid(_) => None,
        }
    }
}
