//! Bounded metric-space primitives.
//!
//! The action space is an axis-aligned box with the Euclidean metric. Cells of
//! a partition are only known through a membership predicate
//! ([`CellMembership`]); everything here (boundary probing, diameter
//! estimation, Hit & Run) works against that predicate alone.
//!
//! Points outside the box are never members of any cell, so the box faces act
//! as cell boundaries.

mod ball;
mod sampling;

pub use ball::{min_enclosing_ball, min_enclosing_ball_diameter, Ball};
pub use sampling::{
    bisect_boundary_point, estimate_cell_diameter, hit_and_run_sample, sample_boundary_point,
    sample_boundary_set, sample_sphere_point, sample_uniform_box,
};

use thiserror::Error;

use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("action space must have at least one dimension")]
    EmptySpace,
    #[error("degenerate bounds in dimension {dim}: lower {lower} is not below upper {upper}")]
    DegenerateBounds { dim: usize, lower: f64, upper: f64 },
    #[error("diameter must be positive, got {0}")]
    NonPositiveDiameter(f64),
    #[error("bisection requires a member and a non-member end point")]
    BisectionPrecondition,
    #[error("anchor is not a member of its cell")]
    AnchorOutsideCell,
    #[error("cannot fit an enclosing ball to an empty point set")]
    EmptyPointSet,
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

/// Membership predicate of an implicitly represented cell.
///
/// Implementations must be deterministic and must return `false` for points
/// outside the action-space box.
pub trait CellMembership<T> {
    fn contains(&self, x: &[T]) -> bool;
}

impl<T, F> CellMembership<T> for F
where
    F: Fn(&[T]) -> bool,
{
    #[inline]
    fn contains(&self, x: &[T]) -> bool {
        self(x)
    }
}

/// Axis-aligned box `[lower, upper]` with the Euclidean metric.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundedMetricSpace<T> {
    lower: Vec<T>,
    upper: Vec<T>,
}

impl<T: Scalar> BoundedMetricSpace<T> {
    pub fn new(lower: Vec<T>, upper: Vec<T>) -> Result<Self, GeometryError> {
        if lower.is_empty() {
            return Err(GeometryError::EmptySpace);
        }
        if lower.len() != upper.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: lower.len(),
                actual: upper.len(),
            });
        }
        for (dim, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(GeometryError::DegenerateBounds {
                    dim,
                    lower: lo.as_f64(),
                    upper: hi.as_f64(),
                });
            }
        }
        Ok(Self { lower, upper })
    }

    /// The box `[0, 1]^dimension`.
    pub fn unit_cube(dimension: usize) -> Result<Self, GeometryError> {
        Self::new(vec![T::zero(); dimension], vec![T::one(); dimension])
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    /// Length of the box diagonal, the largest distance between two points.
    pub fn outer_diameter(&self) -> T {
        euclidean(&self.lower, &self.upper)
    }

    /// Closed-box membership.
    pub fn contains(&self, x: &[T]) -> bool {
        x.len() == self.dimension()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&lo, &hi))| v >= lo && v <= hi)
    }

    /// Clamps every coordinate into the box.
    pub fn clamp(&self, x: &mut [T]) {
        for (v, (&lo, &hi)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.max(lo).min(hi);
        }
    }

    pub fn check_point(&self, x: &[T]) -> Result<(), GeometryError> {
        if x.len() != self.dimension() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dimension(),
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// Largest `t >= 0` with `origin + t * direction` inside the box.
    /// `origin` must lie inside the box.
    pub(crate) fn exit_parameter(&self, origin: &[T], direction: &[T]) -> T {
        let mut t_max = T::infinity();
        for i in 0..origin.len() {
            let d = direction[i];
            let t = if d > T::zero() {
                (self.upper[i] - origin[i]) / d
            } else if d < T::zero() {
                (self.lower[i] - origin[i]) / d
            } else {
                continue;
            };
            t_max = t_max.min(t);
        }
        t_max.max(T::zero())
    }
}

/// Tuning knobs for boundary probing and sampling inside cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryParams<T> {
    /// Boundary samples per diameter estimate (`k`).
    pub boundary_samples: usize,
    /// Bisection stops once the end points are closer than this (`ε`).
    pub bisection_tolerance: T,
    /// Hit & Run steps per sample (`m`).
    pub hit_and_run_steps: usize,
}

impl<T: Scalar> GeometryParams<T> {
    /// `k = max(32, 8 D)`, `ε = 1e-3 · diam(A)`, `m = 10`.
    pub fn defaults_for(space: &BoundedMetricSpace<T>) -> Self {
        Self {
            boundary_samples: (8 * space.dimension()).max(32),
            bisection_tolerance: T::lit(1e-3) * space.outer_diameter(),
            hit_and_run_steps: 10,
        }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.bisection_tolerance > T::zero()) {
            return Err(GeometryError::InvalidParameter("bisection tolerance must be positive"));
        }
        if self.hit_and_run_steps == 0 {
            return Err(GeometryError::InvalidParameter("hit-and-run needs at least one step"));
        }
        Ok(())
    }
}

/// Euclidean distance with a dimension check.
pub fn distance<T: Scalar>(x: &[T], y: &[T]) -> Result<T, GeometryError> {
    if x.len() != y.len() {
        return Err(GeometryError::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    Ok(euclidean(x, y))
}

#[inline]
pub(crate) fn squared_distance<T: Scalar>(x: &[T], y: &[T]) -> T {
    x.iter()
        .zip(y)
        .map(|(&a, &b)| (a - b) * (a - b))
        .fold(T::zero(), |acc, v| acc + v)
}

#[inline]
pub(crate) fn euclidean<T: Scalar>(x: &[T], y: &[T]) -> T {
    squared_distance(x, y).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn distance_examples() {
        assert_eq!(distance(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
        let x = [0.3, -1.2, 7.0];
        assert_eq!(distance(&x, &x).unwrap(), 0.0);
        assert_eq!(distance(&[1.0, 1.0], &[1.0, 2.0]).unwrap(), 1.0);
    }

    #[test]
    fn distance_dimension_mismatch() {
        assert_eq!(
            distance(&[0.0, 1.0], &[0.0]),
            Err(GeometryError::DimensionMismatch {
                expected: 2,
                actual: 1
            })
        );
    }

    #[test]
    fn degenerate_width_rejected() {
        let err = BoundedMetricSpace::new(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap_err();
        assert!(matches!(err, GeometryError::DegenerateBounds { dim: 1, .. }));
        assert!(BoundedMetricSpace::<f64>::new(vec![], vec![]).is_err());
    }

    #[test]
    fn outer_diameter_is_diagonal() {
        let s = BoundedMetricSpace::new(vec![0.0, 0.0], vec![1.0, 2.0]).unwrap();
        assert!((s.outer_diameter() - 5f64.sqrt()).abs() < 1e-15);
        let cube = BoundedMetricSpace::<f32>::unit_cube(4).unwrap();
        assert!((cube.outer_diameter() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn defaults_scale_with_space() {
        let s = BoundedMetricSpace::<f64>::unit_cube(6).unwrap();
        let p = GeometryParams::defaults_for(&s);
        assert_eq!(p.boundary_samples, 48);
        assert_eq!(p.hit_and_run_steps, 10);
        assert!((p.bisection_tolerance - 1e-3 * 6f64.sqrt()).abs() < 1e-15);
        let s2 = BoundedMetricSpace::<f64>::unit_cube(2).unwrap();
        assert_eq!(GeometryParams::defaults_for(&s2).boundary_samples, 32);
    }

    fn point3() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-10.0f64..10.0, 3)
    }

    proptest! {
        #[test]
        fn metric_axioms(x in point3(), y in point3(), z in point3()) {
            let dxy = distance(&x, &y).unwrap();
            let dyx = distance(&y, &x).unwrap();
            let dxz = distance(&x, &z).unwrap();
            let dyz = distance(&y, &z).unwrap();
            prop_assert!(dxy >= 0.0);
            prop_assert_eq!(dxy, dyx);
            prop_assert!(dxz <= dxy + dyz + 1e-9);
            prop_assert_eq!(dxy == 0.0, x == y);
        }
    }
}
