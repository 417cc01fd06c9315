//! Axis-aligned boxes and segment queries shared by the problem maps.

use serde::Deserialize;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Aabb {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Aabb {
    pub fn new(min: Vec<f64>, max: Vec<f64>) -> Self {
        Self { min, max }
    }

    pub fn dimension(&self) -> usize {
        self.min.len()
    }

    /// Closed-box membership.
    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(self.min.iter().zip(&self.max))
            .all(|(&v, (&lo, &hi))| v >= lo && v <= hi)
    }

    /// Euclidean distance from `p` to the box (zero inside).
    pub fn distance(&self, p: &[f64]) -> f64 {
        p.iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(&v, (&lo, &hi))| {
                let d = (lo - v).max(v - hi).max(0.0);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Smallest `t ∈ [0, 1]` with `from + t (to - from)` inside the box.
    pub fn segment_entry(&self, from: &[f64], to: &[f64]) -> Option<f64> {
        let mut t_enter: f64 = 0.0;
        let mut t_exit: f64 = 1.0;
        for i in 0..from.len() {
            let d = to[i] - from[i];
            if d == 0.0 {
                if from[i] < self.min[i] || from[i] > self.max[i] {
                    return None;
                }
                continue;
            }
            let t0 = (self.min[i] - from[i]) / d;
            let t1 = (self.max[i] - from[i]) / d;
            let (lo, hi) = if t0 < t1 { (t0, t1) } else { (t1, t0) };
            t_enter = t_enter.max(lo);
            t_exit = t_exit.min(hi);
            if t_enter > t_exit {
                return None;
            }
        }
        Some(t_enter)
    }

    /// Distance between the segment `[from, to]` and the box. The distance to
    /// a convex set is convex along a line, so a ternary search converges.
    pub fn segment_distance(&self, from: &[f64], to: &[f64]) -> f64 {
        if self.segment_entry(from, to).is_some() {
            return 0.0;
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..60 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if self.distance_along(from, to, m1) <= self.distance_along(from, to, m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        self.distance_along(from, to, 0.5 * (lo + hi))
    }

    fn distance_along(&self, from: &[f64], to: &[f64], t: f64) -> f64 {
        let mut sum = 0.0;
        for i in 0..from.len() {
            let v = from[i] + t * (to[i] - from[i]);
            let d = (self.min[i] - v).max(v - self.max[i]).max(0.0);
            sum += d * d;
        }
        sum.sqrt()
    }

    /// Whether the box grown by `margin` overlaps the bounding box of the
    /// segment `[from, to]`.
    pub fn near_segment(&self, from: &[f64], to: &[f64], margin: f64) -> bool {
        (0..from.len()).all(|i| {
            from[i].min(to[i]) <= self.max[i] + margin && from[i].max(to[i]) >= self.min[i] - margin
        })
    }
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
