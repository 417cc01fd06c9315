//! Minimum enclosing ball in arbitrary dimension.
//!
//! Exact move-to-front recursion (Welzl, in Gärtner's iterative-prefix form)
//! with support sets of at most `D + 1` points. Above [`EXACT_LIMIT`] points a
//! two-pass approximate ball is used instead.

use super::{euclidean, squared_distance, GeometryError};
use crate::Scalar;

/// Point counts above this use the approximate ball.
pub const EXACT_LIMIT: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Ball<T> {
    pub center: Vec<T>,
    pub radius: T,
}

impl<T: Scalar> Ball<T> {
    pub fn diameter(&self) -> T {
        self.radius + self.radius
    }

    /// Membership with an absolute slack.
    pub fn contains(&self, x: &[T], slack: T) -> bool {
        euclidean(&self.center, x) <= self.radius + slack
    }
}

/// Smallest ball enclosing every point.
pub fn min_enclosing_ball<T: Scalar>(points: &[Vec<T>]) -> Result<Ball<T>, GeometryError> {
    let first = points.first().ok_or(GeometryError::EmptyPointSet)?;
    let dim = first.len();
    if let Some(bad) = points.iter().find(|p| p.len() != dim) {
        return Err(GeometryError::DimensionMismatch {
            expected: dim,
            actual: bad.len(),
        });
    }
    if points.len() > EXACT_LIMIT {
        return Ok(approximate_ball(points));
    }

    let mut solver = MoveToFront {
        points,
        order: (0..points.len()).collect(),
        dim,
        slack: slack_for(points),
    };
    let mut support = Vec::with_capacity(dim + 1);
    let ball = solver.solve(points.len(), &mut support);
    Ok(ball.unwrap_or_else(|| Ball {
        center: first.clone(),
        radius: T::zero(),
    }))
}

pub fn min_enclosing_ball_diameter<T: Scalar>(points: &[Vec<T>]) -> Result<T, GeometryError> {
    min_enclosing_ball(points).map(|b| b.diameter())
}

fn slack_for<T: Scalar>(points: &[Vec<T>]) -> T {
    let scale = points
        .iter()
        .flat_map(|p| p.iter())
        .fold(T::one(), |acc, &v| acc.max(v.abs()));
    T::epsilon() * T::lit(256.0) * scale
}

struct MoveToFront<'a, T> {
    points: &'a [Vec<T>],
    order: Vec<usize>,
    dim: usize,
    slack: T,
}

impl<T: Scalar> MoveToFront<'_, T> {
    /// Smallest ball enclosing `order[..end]` with every index in `support`
    /// on its boundary. `None` is the empty ball.
    fn solve(&mut self, end: usize, support: &mut Vec<usize>) -> Option<Ball<T>> {
        let mut ball = self.ball_through(support);
        if support.len() == self.dim + 1 {
            return ball;
        }
        for i in 0..end {
            let idx = self.order[i];
            let inside = ball
                .as_ref()
                .is_some_and(|b| b.contains(&self.points[idx], self.slack));
            if !inside {
                support.push(idx);
                ball = self.solve(i, support);
                support.pop();
                self.order[..=i].rotate_right(1);
            }
        }
        ball
    }

    /// Smallest ball with all support points on its boundary: the circumball
    /// within their affine hull. Affinely dependent supports (which only arise
    /// from rounding) fall back to growing the ball of the shorter support.
    fn ball_through(&self, support: &[usize]) -> Option<Ball<T>> {
        let (&first, rest) = support.split_first()?;
        let origin = &self.points[first];
        if rest.is_empty() {
            return Some(Ball {
                center: origin.clone(),
                radius: T::zero(),
            });
        }
        let offsets: Vec<Vec<T>> = rest
            .iter()
            .map(|&j| {
                self.points[j]
                    .iter()
                    .zip(origin)
                    .map(|(&a, &b)| a - b)
                    .collect()
            })
            .collect();
        let m = offsets.len();
        let two = T::lit(2.0);
        let mut gram = vec![vec![T::zero(); m]; m];
        let mut rhs = vec![T::zero(); m];
        for i in 0..m {
            for j in 0..m {
                gram[i][j] = two * dot(&offsets[i], &offsets[j]);
            }
            rhs[i] = dot(&offsets[i], &offsets[i]);
        }
        match solve_linear(gram, rhs) {
            Some(lambda) => {
                let mut center = origin.clone();
                for (l, off) in lambda.iter().zip(&offsets) {
                    for (c, &o) in center.iter_mut().zip(off) {
                        *c += *l * o;
                    }
                }
                let radius = support
                    .iter()
                    .map(|&j| euclidean(&center, &self.points[j]))
                    .fold(T::zero(), T::max);
                Some(Ball { center, radius })
            }
            None => {
                let (&last, shorter) = support.split_last()?;
                let mut ball = self.ball_through(shorter)?;
                ball.radius = ball.radius.max(euclidean(&ball.center, &self.points[last]));
                Some(ball)
            }
        }
    }
}

/// Two-pass bounding ball: start from the two mutually far points found by a
/// farthest-point sweep, then grow to cover stragglers.
fn approximate_ball<T: Scalar>(points: &[Vec<T>]) -> Ball<T> {
    let farthest_from = |p: &[T]| {
        points
            .iter()
            .max_by(|a, b| {
                squared_distance(p, a)
                    .partial_cmp(&squared_distance(p, b))
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("non-empty")
    };
    let a = farthest_from(&points[0]);
    let b = farthest_from(a);
    let half = T::lit(0.5);
    let mut center: Vec<T> = a.iter().zip(b).map(|(&x, &y)| (x + y) * half).collect();
    let mut radius = euclidean(&center, a);
    for p in points {
        let d = euclidean(&center, p);
        if d > radius {
            let new_radius = (radius + d) * half;
            let shift = (d - new_radius) / d;
            for (c, &v) in center.iter_mut().zip(p) {
                *c += (v - *c) * shift;
            }
            radius = new_radius;
        }
    }
    // Rounding during the growth pass can leave points a hair outside.
    radius = points
        .iter()
        .map(|p| euclidean(&center, p))
        .fold(radius, T::max);
    Ball { center, radius }
}

#[inline]
fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Gaussian elimination with partial pivoting; `None` when (numerically) singular.
fn solve_linear<T: Scalar>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = b.len();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(T::zero(), |acc, &v| acc.max(v.abs()));
    if scale == T::zero() {
        return None;
    }
    let tiny = scale * T::epsilon() * T::lit(1024.0);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot][col].abs() <= tiny {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor == T::zero() {
                continue;
            }
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= factor * v;
            }
            let v = b[col];
            b[row] -= factor * v;
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}
