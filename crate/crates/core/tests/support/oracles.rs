//! Independent reference implementations used by the property suites.

#![allow(dead_code)]

use std::sync::Arc;

use advt_core::geometry::{BoundedMetricSpace, GeometryParams};
use advt_core::{ActionId, NodeId, Observation, ObservationMode, PartitionMode, PomdpModel, Step, VoronoiTree};
use rand::Rng;

fn sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Solves `A x = b` by Gauss-Jordan elimination with full row scan.
fn gauss_jordan(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let mut pivot = col;
        for r in col..n {
            if a[r][col].abs() > a[pivot][col].abs() {
                pivot = r;
            }
        }
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col];
        for k in 0..n {
            a[col][k] /= p;
        }
        b[col] /= p;
        for r in 0..n {
            if r != col {
                let f = a[r][col];
                for k in 0..n {
                    a[r][k] -= f * a[col][k];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some(b)
}

/// Circumcentre of `support` within its affine hull, as affine weights.
fn circumcentre(points: &[Vec<f64>], support: &[usize]) -> Option<(Vec<f64>, Vec<f64>)> {
    let p0 = &points[support[0]];
    let offs: Vec<Vec<f64>> = support[1..]
        .iter()
        .map(|&j| points[j].iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    let m = offs.len();
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
    let mut g = vec![vec![0.0; m]; m];
    let mut rhs = vec![0.0; m];
    for i in 0..m {
        for j in 0..m {
            g[i][j] = 2.0 * dot(&offs[i], &offs[j]);
        }
        rhs[i] = dot(&offs[i], &offs[i]);
    }
    let mu = if m == 0 { Vec::new() } else { gauss_jordan(g, rhs)? };
    let mut c = p0.clone();
    for (w, o) in mu.iter().zip(&offs) {
        for (ci, oi) in c.iter_mut().zip(o) {
            *ci += w * oi;
        }
    }
    let mut weights = vec![1.0 - mu.iter().sum::<f64>()];
    weights.extend(mu);
    Some((c, weights))
}

fn subsets(n: usize, max: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(start: usize, n: usize, max: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if !cur.is_empty() {
            f(cur);
        }
        if cur.len() == max {
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, max, cur, f);
            cur.pop();
        }
    }
    rec(0, n, max, &mut Vec::new(), f);
}

/// Minimum enclosing ball diameter by enumerating every support subset of at
/// most `D + 1` points and keeping the smallest circumball that encloses all.
pub fn brute_force_meb_diameter(points: &[Vec<f64>]) -> f64 {
    let dim = points[0].len();
    let mut best = f64::INFINITY;
    subsets(points.len(), dim + 1, &mut |s| {
        if let Some((c, _)) = circumcentre(points, s) {
            let r2 = s.iter().map(|&i| sq(&c, &points[i])).fold(0.0, f64::max);
            let r = r2.sqrt();
            if points.iter().all(|p| sq(&c, p).sqrt() <= r + 1e-9) {
                best = best.min(2.0 * r);
            }
        }
    });
    best
}

/// Optimality certificate of an enclosing ball: every point is inside, and
/// the centre is a convex combination of the points on the sphere.
pub fn meb_certificate(points: &[Vec<f64>], center: &[f64], radius: f64, tol: f64) -> bool {
    if points.iter().any(|p| sq(center, p).sqrt() > radius + tol) {
        return false;
    }
    let touching: Vec<Vec<f64>> = points
        .iter()
        .filter(|p| sq(center, p).sqrt() >= radius - tol)
        .cloned()
        .collect();
    if touching.is_empty() {
        return false;
    }
    let dim = center.len();
    let mut found = false;
    subsets(touching.len(), dim + 1, &mut |s| {
        if found {
            return;
        }
        // Affine weights reproducing the centre; for a ball through the
        // subset the circumcentre is the only candidate.
        if let Some((c, w)) = circumcentre(&touching, s) {
            if sq(&c, center).sqrt() < tol && w.iter().all(|&x| x >= -tol) {
                found = true;
            }
        }
    });
    found
}

/// Leaves whose root path accepts `x`, computed bottom-up from anchors.
pub fn leaves_accepting(tree: &VoronoiTree<f64>, x: &[f64]) -> Vec<NodeId> {
    let space = tree.space();
    let in_box = x
        .iter()
        .zip(space.lower().iter().zip(space.upper()))
        .all(|(v, (lo, hi))| v >= lo && v <= hi);
    if !in_box {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (_, leaf) in tree.candidate_actions() {
        let mut ok = true;
        let mut current = leaf;
        while let Some(parent) = current.parent() {
            let [first, second] = tree.node(parent).children().unwrap();
            let is_first = std::ptr::eq(tree.node(first), current);
            let a0 = tree.node(first).anchor();
            let a1 = tree.node(second).anchor();
            let goes_first = match tree.mode() {
                PartitionMode::Voronoi => sq(x, a0) <= sq(x, a1),
                PartitionMode::Rectangular => {
                    let (lo, hi) = tree.node(first).rect_bounds().unwrap();
                    let (lo2, _) = tree.node(second).rect_bounds().unwrap();
                    // The cut is the face shared by the two halves.
                    let dim = (0..x.len()).find(|&d| lo[d] != lo2[d]).unwrap();
                    let first_is_lower = lo[dim] < lo2[dim];
                    let cut = if first_is_lower { hi[dim] } else { lo[dim] };
                    (x[dim] < cut) == first_is_lower
                }
            };
            if goes_first != is_first {
                ok = false;
                break;
            }
            current = tree.node(parent);
        }
        if ok {
            out.push(tree.leaf_id(leaf.action()));
        }
    }
    out
}

/// Tree grown by `splits` random leaf splits, cheap diameter estimates.
pub fn random_tree<R: Rng>(dim: usize, splits: usize, mode: PartitionMode, rng: &mut R) -> VoronoiTree<f64> {
    random_tree_with_samples(dim, splits, mode, Some(8), rng)
}

/// Tree grown by `splits` random leaf splits; `None` keeps the default
/// boundary sample count.
pub fn random_tree_with_samples<R: Rng>(
    dim: usize,
    splits: usize,
    mode: PartitionMode,
    boundary_samples: Option<usize>,
    rng: &mut R,
) -> VoronoiTree<f64> {
    let space = Arc::new(BoundedMetricSpace::unit_cube(dim).unwrap());
    let mut params = GeometryParams::defaults_for(&space);
    if let Some(k) = boundary_samples {
        params.boundary_samples = k;
    }
    let mut tree = VoronoiTree::new(space, mode, rng);
    for _ in 0..splits {
        let id = ActionId(rng.random_range(0..tree.leaf_count()));
        tree.split_leaf(id, &params, rng).unwrap();
    }
    tree
}

/// Deterministic two-step chain with two grid actions (0.25 and 0.75).
/// State is the step index; index 2 is terminal. Step 0 pays 1 for the left
/// action, step 1 pays 2 for the right action. New beliefs at step 1 are
/// valued 3 by the heuristic.
pub struct TwoStepChain {
    pub space: Arc<BoundedMetricSpace<f64>>,
}

impl TwoStepChain {
    pub fn new() -> Self {
        Self {
            space: Arc::new(BoundedMetricSpace::unit_cube(1).unwrap()),
        }
    }
}

impl PomdpModel<f64> for TwoStepChain {
    type State = u8;

    fn action_space(&self) -> &Arc<BoundedMetricSpace<f64>> {
        &self.space
    }

    fn discount(&self) -> f64 {
        0.5
    }

    fn observation_mode(&self) -> ObservationMode<f64> {
        ObservationMode::Discrete
    }

    fn sample_initial_state<R: Rng + ?Sized>(&self, _rng: &mut R) -> u8 {
        0
    }

    fn step<R: Rng + ?Sized>(&self, s: &u8, a: &[f64], _rng: &mut R) -> Step<u8, f64> {
        let left = a[0] < 0.5;
        let reward = match (*s, left) {
            (0, true) => 1.0,
            (1, false) => 2.0,
            _ => 0.0,
        };
        Step {
            next_state: (*s + 1).min(2),
            observation: Observation::Discrete(0),
            reward,
        }
    }

    fn is_terminal(&self, s: &u8) -> bool {
        *s >= 2
    }

    fn rollout_heuristic<R: Rng + ?Sized>(&self, s: &u8, _rng: &mut R) -> Option<f64> {
        Some(if *s == 1 { 3.0 } else { 0.0 })
    }
}

/// One-step continuous bandit with reward `1 - |a - 0.7|` on `[0, 1]`.
pub struct Bandit {
    pub space: Arc<BoundedMetricSpace<f64>>,
}

impl Bandit {
    pub fn new() -> Self {
        Self {
            space: Arc::new(BoundedMetricSpace::unit_cube(1).unwrap()),
        }
    }
}

impl PomdpModel<f64> for Bandit {
    type State = bool;

    fn action_space(&self) -> &Arc<BoundedMetricSpace<f64>> {
        &self.space
    }

    fn discount(&self) -> f64 {
        0.95
    }

    fn observation_mode(&self) -> ObservationMode<f64> {
        ObservationMode::Discrete
    }

    fn sample_initial_state<R: Rng + ?Sized>(&self, _rng: &mut R) -> bool {
        false
    }

    fn step<R: Rng + ?Sized>(&self, _s: &bool, a: &[f64], _rng: &mut R) -> Step<bool, f64> {
        Step {
            next_state: true,
            observation: Observation::Discrete(0),
            reward: 1.0 - (a[0] - 0.7).abs(),
        }
    }

    fn is_terminal(&self, s: &bool) -> bool {
        *s
    }
}
