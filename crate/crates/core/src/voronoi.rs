//! Per-belief hierarchical partition of the action space.
//!
//! Every node is a pair (anchor, cell). The root cell is the whole box; an
//! internal node splits its cell between two children, the first keeping the
//! parent's anchor. In [`PartitionMode::Voronoi`] the split is the two-anchor
//! Voronoi diagram and cells are never stored: a point belongs to a node iff
//! replaying the anchor comparisons from the root leads to it. Ties go to the
//! first child. [`PartitionMode::Rectangular`] instead halves the cell's
//! hyper-rectangle along its longest side.
//!
//! Leaves carry the action statistics. Leaves are addressed by [`ActionId`],
//! which is the leaf's insertion index: a split hands the parent's id to the
//! first child and appends a fresh id for the second.

use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::geometry::{
    estimate_cell_diameter, hit_and_run_sample, sample_uniform_box, squared_distance,
    BoundedMetricSpace, CellMembership, GeometryError, GeometryParams,
};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VoronoiError {
    #[error("point lies outside the action space")]
    PointOutsideSpace,
    #[error("node {0:?} is not a leaf")]
    NotALeaf(NodeId),
    #[error("forced anchor must lie in the leaf's cell and differ from its anchor")]
    InvalidSplitAnchor,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

/// Stable handle of a candidate action (leaf anchor) within one tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PartitionMode {
    #[default]
    Voronoi,
    Rectangular,
}

/// Visit count `N(b, a)` and value estimate `Q̂(b, a)` of a candidate action.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ActionStats<T> {
    pub visits: u64,
    pub q: T,
}

#[derive(Debug, Clone, PartialEq)]
struct Rect<T> {
    lower: Vec<T>,
    upper: Vec<T>,
}

impl<T: Scalar> Rect<T> {
    fn diagonal(&self) -> T {
        squared_distance(&self.lower, &self.upper).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Split<T> {
    /// Nearest anchor wins, first child on ties.
    Voronoi,
    /// Coordinate `dim` below `value` goes to the lower half.
    Axis { dim: usize, value: T, first_is_lower: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoronoiNode<T> {
    anchor: Vec<T>,
    action: ActionId,
    stats: ActionStats<T>,
    diameter: T,
    parent: Option<NodeId>,
    children: Option<[NodeId; 2]>,
    split: Option<Split<T>>,
    rect: Option<Rect<T>>,
}

impl<T: Scalar> VoronoiNode<T> {
    pub fn anchor(&self) -> &[T] {
        &self.anchor
    }

    pub fn action(&self) -> ActionId {
        self.action
    }

    pub fn stats(&self) -> &ActionStats<T> {
        &self.stats
    }

    /// Estimated (Voronoi) or exact (rectangular) cell diameter.
    pub fn diameter(&self) -> T {
        self.diameter
    }

    pub fn parent(&self) -> Option<NodeId> {
        self.parent
    }

    pub fn children(&self) -> Option<[NodeId; 2]> {
        self.children
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }

    /// Bounds of the cell in rectangular mode.
    pub fn rect_bounds(&self) -> Option<(&[T], &[T])> {
        self.rect.as_ref().map(|r| (r.lower.as_slice(), r.upper.as_slice()))
    }
}

/// Refinement rule: split once `C_r · N(b, a) ≥ 1 / diam(P)²`.
pub fn should_refine<T: Scalar>(visits: u64, diameter: T, refinement: T) -> bool {
    refinement * T::from_count(visits) >= T::one() / (diameter * diameter)
}

#[derive(Debug, Clone)]
pub struct VoronoiTree<T> {
    space: Arc<BoundedMetricSpace<T>>,
    mode: PartitionMode,
    nodes: Vec<VoronoiNode<T>>,
    /// Current leaf of every action, indexed by `ActionId`.
    leaves: Vec<NodeId>,
}

impl<T: Scalar> VoronoiTree<T> {
    /// Single root leaf `(a, A)` with `a` uniform in `A`.
    pub fn new<R: Rng + ?Sized>(
        space: Arc<BoundedMetricSpace<T>>,
        mode: PartitionMode,
        rng: &mut R,
    ) -> Self {
        let anchor = sample_uniform_box(&space, rng);
        Self::with_root_anchor(space, mode, anchor)
    }

    pub fn with_root_anchor(
        space: Arc<BoundedMetricSpace<T>>,
        mode: PartitionMode,
        anchor: Vec<T>,
    ) -> Self {
        let rect = match mode {
            PartitionMode::Voronoi => None,
            PartitionMode::Rectangular => Some(Rect {
                lower: space.lower().to_vec(),
                upper: space.upper().to_vec(),
            }),
        };
        let root = VoronoiNode {
            anchor,
            action: ActionId(0),
            stats: ActionStats::default(),
            diameter: space.outer_diameter(),
            parent: None,
            children: None,
            split: None,
            rect,
        };
        Self {
            space,
            mode,
            nodes: vec![root],
            leaves: vec![NodeId(0)],
        }
    }

    pub fn space(&self) -> &BoundedMetricSpace<T> {
        &self.space
    }

    pub fn mode(&self) -> PartitionMode {
        self.mode
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn node(&self, id: NodeId) -> &VoronoiNode<T> {
        &self.nodes[id.0]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    /// Leaf currently holding `action`.
    pub fn leaf(&self, action: ActionId) -> &VoronoiNode<T> {
        &self.nodes[self.leaves[action.0].0]
    }

    pub fn leaf_id(&self, action: ActionId) -> NodeId {
        self.leaves[action.0]
    }

    pub fn stats_mut(&mut self, action: ActionId) -> &mut ActionStats<T> {
        let id = self.leaves[action.0];
        &mut self.nodes[id.0].stats
    }

    /// Candidate actions `A(b)`: every leaf, in insertion order.
    pub fn candidate_actions(&self) -> impl ExactSizeIterator<Item = (ActionId, &VoronoiNode<T>)> {
        self.leaves
            .iter()
            .enumerate()
            .map(move |(i, id)| (ActionId(i), &self.nodes[id.0]))
    }

    /// Leaf whose cell contains `x`.
    pub fn locate_leaf(&self, x: &[T]) -> Result<NodeId, VoronoiError> {
        self.space.check_point(x)?;
        if !self.space.contains(x) {
            return Err(VoronoiError::PointOutsideSpace);
        }
        let mut id = self.root();
        while let Some(children) = self.nodes[id.0].children {
            id = children[self.route(id, x)];
        }
        Ok(id)
    }

    /// Which child of internal node `id` the point descends into.
    #[inline]
    fn route(&self, id: NodeId, x: &[T]) -> usize {
        let node = &self.nodes[id.0];
        let children = node.children.expect("route on internal node");
        match node.split.as_ref().expect("internal node has a split") {
            Split::Voronoi => {
                let first = squared_distance(x, &self.nodes[children[0].0].anchor);
                let second = squared_distance(x, &self.nodes[children[1].0].anchor);
                usize::from(first > second)
            }
            Split::Axis {
                dim,
                value,
                first_is_lower,
            } => {
                let lower = x[*dim] < *value;
                usize::from(lower != *first_is_lower)
            }
        }
    }

    /// Membership predicate of the cell of `node`.
    pub fn cell_oracle(&self, node: NodeId) -> CellOracle<'_, T> {
        let mut path = Vec::new();
        let mut current = node;
        while let Some(parent) = self.nodes[current.0].parent {
            let children = self.nodes[parent.0].children.expect("parent is internal");
            path.push((parent, usize::from(children[1] == current)));
            current = parent;
        }
        path.reverse();
        CellOracle { tree: self, path }
    }

    /// Splits the leaf holding `action` with a new anchor drawn inside its cell
    /// (Hit & Run in Voronoi mode, uniform in the far half in rectangular mode).
    pub fn split_leaf<R: Rng + ?Sized>(
        &mut self,
        action: ActionId,
        params: &GeometryParams<T>,
        rng: &mut R,
    ) -> Result<(NodeId, NodeId), VoronoiError> {
        let leaf = self.leaf_id(action);
        match self.mode {
            PartitionMode::Voronoi => {
                let anchor = self.nodes[leaf.0].anchor.clone();
                let mut new_anchor = None;
                let mut tolerance = params.bisection_tolerance;
                for _ in 0..8 {
                    let oracle = self.cell_oracle(leaf);
                    let candidate = hit_and_run_sample(
                        &anchor,
                        &oracle,
                        &self.space,
                        params.hit_and_run_steps,
                        tolerance,
                        rng,
                    )?;
                    if candidate != anchor {
                        new_anchor = Some(candidate);
                        break;
                    }
                    // Cells thinner than the tolerance need a finer search.
                    tolerance /= T::lit(16.0);
                }
                let new_anchor = new_anchor.ok_or(VoronoiError::InvalidSplitAnchor)?;
                self.split_voronoi(leaf, new_anchor, params, rng)
            }
            PartitionMode::Rectangular => self.split_rectangular(leaf, rng),
        }
    }

    /// Voronoi split of the leaf holding `action` with a caller-chosen anchor.
    pub fn split_leaf_with_anchor<R: Rng + ?Sized>(
        &mut self,
        action: ActionId,
        new_anchor: Vec<T>,
        params: &GeometryParams<T>,
        rng: &mut R,
    ) -> Result<(NodeId, NodeId), VoronoiError> {
        let leaf = self.leaf_id(action);
        self.space.check_point(&new_anchor)?;
        if new_anchor == self.nodes[leaf.0].anchor || !self.cell_oracle(leaf).contains(&new_anchor) {
            return Err(VoronoiError::InvalidSplitAnchor);
        }
        self.split_voronoi(leaf, new_anchor, params, rng)
    }

    fn split_voronoi<R: Rng + ?Sized>(
        &mut self,
        leaf: NodeId,
        new_anchor: Vec<T>,
        params: &GeometryParams<T>,
        rng: &mut R,
    ) -> Result<(NodeId, NodeId), VoronoiError> {
        if !self.nodes[leaf.0].is_leaf() {
            return Err(VoronoiError::NotALeaf(leaf));
        }
        let (first, second) = self.attach_children(leaf, new_anchor, Split::Voronoi, None);
        for child in [first, second] {
            let oracle = self.cell_oracle(child);
            let diameter = estimate_cell_diameter(
                &self.nodes[child.0].anchor,
                &oracle,
                &self.space,
                params.boundary_samples,
                params.bisection_tolerance,
                rng,
            )?;
            self.nodes[child.0].diameter = diameter;
        }
        Ok((first, second))
    }

    fn split_rectangular<R: Rng + ?Sized>(
        &mut self,
        leaf: NodeId,
        rng: &mut R,
    ) -> Result<(NodeId, NodeId), VoronoiError> {
        let node = &self.nodes[leaf.0];
        if !node.is_leaf() {
            return Err(VoronoiError::NotALeaf(leaf));
        }
        let rect = node.rect.clone().expect("rectangular node has bounds");
        // Longest side, lowest index on ties.
        let mut dim = 0;
        for i in 1..rect.lower.len() {
            if rect.upper[i] - rect.lower[i] > rect.upper[dim] - rect.lower[dim] {
                dim = i;
            }
        }
        let mid = (rect.lower[dim] + rect.upper[dim]) * T::lit(0.5);
        let mut lower_half = rect.clone();
        lower_half.upper[dim] = mid;
        let mut upper_half = rect;
        upper_half.lower[dim] = mid;

        let first_is_lower = node.anchor[dim] < mid;
        let (first_rect, second_rect) = if first_is_lower {
            (lower_half, upper_half)
        } else {
            (upper_half, lower_half)
        };
        let second_space = BoundedMetricSpace::new(second_rect.lower.clone(), second_rect.upper.clone())?;
        let mut new_anchor = sample_uniform_box(&second_space, rng);
        if !first_is_lower {
            // The lower half is half-open at the cut.
            if new_anchor[dim] >= mid {
                new_anchor[dim] = second_rect.lower[dim];
            }
        }
        let split = Split::Axis {
            dim,
            value: mid,
            first_is_lower,
        };
        let (first, second) = self.attach_children(leaf, new_anchor, split, Some(first_rect));
        self.nodes[second.0].rect = Some(second_rect);
        for child in [first, second] {
            let diagonal = self.nodes[child.0].rect.as_ref().expect("bounds").diagonal();
            self.nodes[child.0].diameter = diagonal;
        }
        Ok((first, second))
    }

    /// First child inherits anchor, action id and statistics; the second child
    /// gets a fresh action id with empty statistics.
    fn attach_children(
        &mut self,
        leaf: NodeId,
        new_anchor: Vec<T>,
        split: Split<T>,
        first_rect: Option<Rect<T>>,
    ) -> (NodeId, NodeId) {
        let parent = &self.nodes[leaf.0];
        let first = VoronoiNode {
            anchor: parent.anchor.clone(),
            action: parent.action,
            stats: parent.stats,
            diameter: parent.diameter,
            parent: Some(leaf),
            children: None,
            split: None,
            rect: first_rect,
        };
        let second_action = ActionId(self.leaves.len());
        let second = VoronoiNode {
            anchor: new_anchor,
            action: second_action,
            stats: ActionStats::default(),
            diameter: parent.diameter,
            parent: Some(leaf),
            children: None,
            split: None,
            rect: None,
        };
        let first_id = NodeId(self.nodes.len());
        let second_id = NodeId(self.nodes.len() + 1);
        let inherited = parent.action;
        self.nodes.push(first);
        self.nodes.push(second);
        let parent = &mut self.nodes[leaf.0];
        parent.children = Some([first_id, second_id]);
        parent.split = Some(split);
        self.leaves[inherited.0] = first_id;
        self.leaves.push(second_id);
        (first_id, second_id)
    }
}

/// Membership predicate of one node's cell: inside the box and routed to the
/// node by every split on its root path.
pub struct CellOracle<'a, T> {
    tree: &'a VoronoiTree<T>,
    path: Vec<(NodeId, usize)>,
}

impl<T: Scalar> CellMembership<T> for CellOracle<'_, T> {
    fn contains(&self, x: &[T]) -> bool {
        self.tree.space.contains(x)
            && self
                .path
                .iter()
                .all(|&(node, child)| self.tree.route(node, x) == child)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::euclidean;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn space(dim: usize) -> Arc<BoundedMetricSpace<f64>> {
        Arc::new(BoundedMetricSpace::unit_cube(dim).unwrap())
    }

    #[test]
    fn init_tree() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let tree = VoronoiTree::new(space(2), PartitionMode::Voronoi, &mut rng);
        assert_eq!(tree.candidate_actions().len(), 1);
        let root = tree.node(tree.root());
        assert!((root.diameter() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(root.stats(), &ActionStats { visits: 0, q: 0.0 });
        assert!(tree.space().contains(root.anchor()));
    }

    #[test]
    fn locate_leaf_routing_and_ties() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = space(2);
        let mut tree = VoronoiTree::with_root_anchor(s.clone(), PartitionMode::Voronoi, vec![0.2, 0.5]);
        assert_eq!(tree.locate_leaf(&[0.9, 0.9]).unwrap(), tree.root());
        let params = GeometryParams::defaults_for(&s);
        let (first, second) = tree
            .split_leaf_with_anchor(ActionId(0), vec![0.8, 0.5], &params, &mut rng)
            .unwrap();
        assert_eq!(tree.locate_leaf(&[0.3, 0.5]).unwrap(), first);
        assert_eq!(tree.locate_leaf(&[0.5, 0.5]).unwrap(), first);
        assert_eq!(tree.locate_leaf(&[0.51, 0.5]).unwrap(), second);
        assert_eq!(
            tree.locate_leaf(&[1.2, 0.5]),
            Err(VoronoiError::PointOutsideSpace)
        );
    }

    #[test]
    fn root_oracle_is_box_membership() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let tree = VoronoiTree::new(space(3), PartitionMode::Voronoi, &mut rng);
        let oracle = tree.cell_oracle(tree.root());
        assert!(oracle.contains(&[0.0, 0.5, 1.0]));
        assert!(!oracle.contains(&[0.0, 0.5, 1.0001]));
        assert!(!oracle.contains(&[-0.1, 0.5, 0.5]));
    }

    #[test]
    fn should_refine_examples() {
        assert!(should_refine(4, 0.5, 1.0));
        assert!(!should_refine(4, 0.5, 0.1));
        assert!(!should_refine(0, 0.5, 1.0));
        assert!(!should_refine(0, 1e6, 1e6));
    }

    #[test]
    fn forced_split_diameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = space(2);
        let mut tree = VoronoiTree::with_root_anchor(s.clone(), PartitionMode::Voronoi, vec![0.25, 0.5]);
        let mut params = GeometryParams::defaults_for(&s);
        params.boundary_samples = 64;
        let (first, second) = tree
            .split_leaf_with_anchor(ActionId(0), vec![0.75, 0.5], &params, &mut rng)
            .unwrap();
        let expected = 1.25f64.sqrt();
        for id in [first, second] {
            let d = tree.node(id).diameter();
            assert!((d - expected).abs() < 0.1 * expected, "{d}");
        }
        assert_eq!(tree.node(first).anchor(), &[0.25, 0.5]);
        assert_eq!(tree.leaf_count(), 2);
    }

    #[test]
    fn forced_split_rejects_bad_anchor() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = space(2);
        let params = GeometryParams::defaults_for(&s);
        let mut tree = VoronoiTree::with_root_anchor(s, PartitionMode::Voronoi, vec![0.25, 0.5]);
        assert_eq!(
            tree.split_leaf_with_anchor(ActionId(0), vec![0.25, 0.5], &params, &mut rng),
            Err(VoronoiError::InvalidSplitAnchor)
        );
        assert_eq!(
            tree.split_leaf_with_anchor(ActionId(0), vec![1.5, 0.5], &params, &mut rng),
            Err(VoronoiError::InvalidSplitAnchor)
        );
    }

    #[test]
    fn rectangular_split_longest_side() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let s = Arc::new(BoundedMetricSpace::new(vec![0.0, 0.0], vec![1.0, 2.0]).unwrap());
        let params = GeometryParams::defaults_for(&s);
        let mut tree = VoronoiTree::with_root_anchor(s, PartitionMode::Rectangular, vec![0.5, 0.4]);
        let (first, second) = tree.split_leaf(ActionId(0), &params, &mut rng).unwrap();
        let f = tree.node(first);
        let g = tree.node(second);
        assert_eq!(f.rect_bounds().unwrap(), (&[0.0, 0.0][..], &[1.0, 1.0][..]));
        assert_eq!(g.rect_bounds().unwrap(), (&[0.0, 1.0][..], &[1.0, 2.0][..]));
        assert_eq!(f.diameter(), 2f64.sqrt());
        assert_eq!(g.diameter(), 2f64.sqrt());
        assert!(g.anchor()[1] >= 1.0);
        assert_eq!(tree.locate_leaf(&[0.3, 0.999]).unwrap(), first);
        assert_eq!(tree.locate_leaf(&[0.3, 1.0]).unwrap(), second);
    }

    #[test]
    fn rectangular_ties_pick_lowest_dimension() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = space(3);
        let params = GeometryParams::defaults_for(&s);
        let mut tree = VoronoiTree::with_root_anchor(s, PartitionMode::Rectangular, vec![0.9, 0.1, 0.1]);
        let (first, second) = tree.split_leaf(ActionId(0), &params, &mut rng).unwrap();
        assert_eq!(tree.node(first).rect_bounds().unwrap().0, &[0.5, 0.0, 0.0]);
        let (lo, hi) = tree.node(second).rect_bounds().unwrap();
        assert_eq!((lo, hi), (&[0.0, 0.0, 0.0][..], &[0.5, 1.0, 1.0][..]));
        assert!(tree.node(second).anchor()[0] < 0.5);
    }

    #[test]
    fn split_bookkeeping() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let s = space(2);
        let params = GeometryParams::defaults_for(&s);
        let mut tree = VoronoiTree::new(s, PartitionMode::Voronoi, &mut rng);
        tree.stats_mut(ActionId(0)).visits = 5;
        tree.stats_mut(ActionId(0)).q = 2.5;
        let (first, second) = tree.split_leaf(ActionId(0), &params, &mut rng).unwrap();
        assert_eq!(tree.leaf_id(ActionId(0)), first);
        assert_eq!(tree.leaf_id(ActionId(1)), second);
        assert_eq!(tree.node(first).stats(), &ActionStats { visits: 5, q: 2.5 });
        assert_eq!(tree.node(second).stats(), &ActionStats::default());
        assert!(!tree.node(tree.root()).is_leaf());
        assert_eq!(
            tree.split_voronoi(tree.root(), vec![0.5, 0.5], &params, &mut rng),
            Err(VoronoiError::NotALeaf(tree.root()))
        );
        let parent = tree.node(tree.root());
        let c = parent.children().unwrap();
        assert_eq!(tree.node(c[0]).anchor(), parent.anchor());
        assert!(euclidean(tree.node(c[0]).anchor(), tree.node(c[1]).anchor()) > 0.0);
    }
}
