use rand::Rng;
use rand_distr::StandardNormal;

use super::{min_enclosing_ball_diameter, BoundedMetricSpace, CellMembership, GeometryError};
use crate::Scalar;

/// Uniform point in the box.
pub fn sample_uniform_box<T: Scalar, R: Rng + ?Sized>(
    space: &BoundedMetricSpace<T>,
    rng: &mut R,
) -> Vec<T> {
    space
        .lower()
        .iter()
        .zip(space.upper())
        .map(|(&lo, &hi)| {
            let u = T::lit(rng.random::<f64>());
            // u < 1, but lo + u (hi - lo) may round up to hi; keep it closed.
            (lo + u * (hi - lo)).min(hi)
        })
        .collect()
}

/// Uniform point on the sphere of the given diameter around `center`.
pub fn sample_sphere_point<T: Scalar, R: Rng + ?Sized>(
    center: &[T],
    diameter: T,
    rng: &mut R,
) -> Result<Vec<T>, GeometryError> {
    if !(diameter > T::zero()) {
        return Err(GeometryError::NonPositiveDiameter(diameter.as_f64()));
    }
    let radius = diameter * T::lit(0.5);
    let direction = random_direction::<T, R>(center.len(), rng);
    Ok(center
        .iter()
        .zip(&direction)
        .map(|(&c, &d)| c + radius * d)
        .collect())
}

fn random_direction<T: Scalar, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<T> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| T::lit(x / norm)).collect();
        }
    }
}

/// Bisects the segment between a member and a non-member until the end points
/// are within `tolerance`, returning the member end point.
pub fn bisect_boundary_point<T: Scalar, C: CellMembership<T> + ?Sized>(
    inside: &[T],
    outside: &[T],
    cell: &C,
    tolerance: T,
) -> Result<Vec<T>, GeometryError> {
    if inside.len() != outside.len() {
        return Err(GeometryError::DimensionMismatch {
            expected: inside.len(),
            actual: outside.len(),
        });
    }
    if !(tolerance > T::zero()) {
        return Err(GeometryError::InvalidParameter("bisection tolerance must be positive"));
    }
    if !cell.contains(inside) || cell.contains(outside) {
        return Err(GeometryError::BisectionPrecondition);
    }
    Ok(bisect_unchecked(inside.to_vec(), outside.to_vec(), cell, tolerance))
}

fn bisect_unchecked<T: Scalar, C: CellMembership<T> + ?Sized>(
    mut inside: Vec<T>,
    mut outside: Vec<T>,
    cell: &C,
    tolerance: T,
) -> Vec<T> {
    let half = T::lit(0.5);
    let mut mid = inside.clone();
    let tol_sq = tolerance * tolerance;
    loop {
        let gap_sq = inside
            .iter()
            .zip(&outside)
            .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b));
        if gap_sq < tol_sq {
            return inside;
        }
        for ((m, &a), &b) in mid.iter_mut().zip(&inside).zip(&outside) {
            *m = (a + b) * half;
        }
        if mid == inside || mid == outside {
            // No representable midpoint left.
            return inside;
        }
        if cell.contains(&mid) {
            std::mem::swap(&mut inside, &mut mid);
        } else {
            std::mem::swap(&mut outside, &mut mid);
        }
    }
}

/// One approximate boundary point of the cell seen from `origin`: probe a
/// uniform direction out to distance `diam(A) / 2` and bisect back.
///
/// When the probe lands inside the cell, the ray is extended to the box face;
/// a face point that is still a member is returned as the boundary point.
pub fn sample_boundary_point<T: Scalar, C: CellMembership<T> + ?Sized, R: Rng + ?Sized>(
    origin: &[T],
    cell: &C,
    space: &BoundedMetricSpace<T>,
    tolerance: T,
    rng: &mut R,
) -> Result<Vec<T>, GeometryError> {
    space.check_point(origin)?;
    if !cell.contains(origin) {
        return Err(GeometryError::AnchorOutsideCell);
    }
    let probe = sample_sphere_point(origin, space.outer_diameter(), rng)?;
    Ok(boundary_from_probe(origin, probe, cell, space, tolerance))
}

fn boundary_from_probe<T: Scalar, C: CellMembership<T> + ?Sized>(
    origin: &[T],
    probe: Vec<T>,
    cell: &C,
    space: &BoundedMetricSpace<T>,
    tolerance: T,
) -> Vec<T> {
    let outside = if cell.contains(&probe) {
        let direction: Vec<T> = probe.iter().zip(origin).map(|(&p, &o)| p - o).collect();
        let t = space.exit_parameter(origin, &direction);
        let mut face: Vec<T> = origin
            .iter()
            .zip(&direction)
            .map(|(&o, &d)| o + t * d)
            .collect();
        space.clamp(&mut face);
        if cell.contains(&face) {
            return face;
        }
        face
    } else {
        probe
    };
    bisect_unchecked(origin.to_vec(), outside, cell, tolerance)
}

/// `count` approximate boundary points of the cell around `anchor`.
pub fn sample_boundary_set<T: Scalar, C: CellMembership<T> + ?Sized, R: Rng + ?Sized>(
    anchor: &[T],
    cell: &C,
    space: &BoundedMetricSpace<T>,
    count: usize,
    tolerance: T,
    rng: &mut R,
) -> Result<Vec<Vec<T>>, GeometryError> {
    space.check_point(anchor)?;
    if !cell.contains(anchor) {
        return Err(GeometryError::AnchorOutsideCell);
    }
    if !(tolerance > T::zero()) {
        return Err(GeometryError::InvalidParameter("bisection tolerance must be positive"));
    }
    let diameter = space.outer_diameter();
    (0..count)
        .map(|_| {
            let probe = sample_sphere_point(anchor, diameter, rng)?;
            Ok(boundary_from_probe(anchor, probe, cell, space, tolerance))
        })
        .collect()
}

/// Diameter of the minimum enclosing ball of `count` boundary samples plus the
/// anchor. Always strictly positive.
pub fn estimate_cell_diameter<T: Scalar, C: CellMembership<T> + ?Sized, R: Rng + ?Sized>(
    anchor: &[T],
    cell: &C,
    space: &BoundedMetricSpace<T>,
    count: usize,
    tolerance: T,
    rng: &mut R,
) -> Result<T, GeometryError> {
    let mut points = sample_boundary_set(anchor, cell, space, count, tolerance, rng)?;
    points.push(anchor.to_vec());
    let diameter = min_enclosing_ball_diameter(&points)?;
    Ok(diameter.max(tolerance))
}

/// Approximately uniform point inside the cell: a random walk of `steps`
/// moves, each a uniform fraction of the way towards a freshly sampled
/// boundary point.
pub fn hit_and_run_sample<T: Scalar, C: CellMembership<T> + ?Sized, R: Rng + ?Sized>(
    anchor: &[T],
    cell: &C,
    space: &BoundedMetricSpace<T>,
    steps: usize,
    tolerance: T,
    rng: &mut R,
) -> Result<Vec<T>, GeometryError> {
    if steps == 0 {
        return Err(GeometryError::InvalidParameter("hit-and-run needs at least one step"));
    }
    space.check_point(anchor)?;
    if !cell.contains(anchor) {
        return Err(GeometryError::AnchorOutsideCell);
    }
    let diameter = space.outer_diameter();
    let mut current = anchor.to_vec();
    let mut next = current.clone();
    for _ in 0..steps {
        let probe = sample_sphere_point(&current, diameter, rng)?;
        let target = boundary_from_probe(&current, probe, cell, space, tolerance);
        let fraction = T::lit(rng.random::<f64>());
        for ((n, &c), &t) in next.iter_mut().zip(&current).zip(&target) {
            *n = c + fraction * (t - c);
        }
        // Convex cells contain the whole segment; rounding can still push the
        // point across a face, in which case the walk stays put.
        if cell.contains(&next) {
            std::mem::swap(&mut current, &mut next);
        }
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::euclidean;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit(dim: usize) -> BoundedMetricSpace<f64> {
        BoundedMetricSpace::unit_cube(dim).unwrap()
    }

    #[test]
    fn uniform_box_is_deterministic_and_inside() {
        let space = unit(2);
        let a = sample_uniform_box(&space, &mut ChaCha8Rng::seed_from_u64(7));
        let b = sample_uniform_box(&space, &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            assert!(space.contains(&sample_uniform_box(&space, &mut rng)));
        }
    }

    #[test]
    fn uniform_box_mean() {
        let space = unit(1);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 10_000;
        let mean = (0..n)
            .map(|_| sample_uniform_box(&space, &mut rng)[0])
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.5).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn sphere_point_radius() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let p = sample_sphere_point(&[0.0f64, 0.0], 2.0, &mut rng).unwrap();
            assert!((euclidean(&p, &[0.0, 0.0]) - 1.0).abs() < 1e-9);
        }
        for _ in 0..20 {
            let p = sample_sphere_point(&[0.25f64], 1.0, &mut rng).unwrap();
            assert!((p[0] - 0.75).abs() < 1e-12 || (p[0] + 0.25).abs() < 1e-12);
        }
        assert_eq!(
            sample_sphere_point(&[0.0], 0.0, &mut rng),
            Err(GeometryError::NonPositiveDiameter(0.0))
        );
    }

    #[test]
    fn sphere_point_angles_are_uniform() {
        // Pearson chi-square over 16 equal sectors; 1% critical value for
        // 15 degrees of freedom is 30.578.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 10_000;
        let mut counts = [0usize; 16];
        for _ in 0..n {
            let p = sample_sphere_point(&[0.0f64, 0.0], 2.0, &mut rng).unwrap();
            let angle = p[1].atan2(p[0]) + std::f64::consts::PI;
            let sector = ((angle / (2.0 * std::f64::consts::PI)) * 16.0) as usize;
            counts[sector.min(15)] += 1;
        }
        let expected = n as f64 / 16.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < 30.578, "chi2 {chi2}");
    }

    #[test]
    fn bisection_finds_voronoi_midpoint() {
        let space = unit(1);
        let cell = |x: &[f64]| space.contains(x) && (x[0] - 0.25).abs() <= (x[0] - 0.75).abs();
        let eps = 1e-4;
        let p = bisect_boundary_point(&[0.25], &[0.75], &cell, eps).unwrap();
        assert!(cell(&p));
        assert!((p[0] - 0.5).abs() <= eps);
    }

    #[test]
    fn bisection_finds_box_face() {
        let space = unit(1);
        let cell = |x: &[f64]| space.contains(x);
        let eps = 1e-4;
        let p = bisect_boundary_point(&[0.25], &[-0.25], &cell, eps).unwrap();
        assert!(cell(&p));
        assert!(p[0].abs() <= eps);
    }

    #[test]
    fn bisection_gap_after_logarithmic_iterations() {
        // Count oracle calls: one per halving after the two precondition checks.
        use std::cell::Cell;
        let calls = Cell::new(0usize);
        let cell = |x: &[f64]| {
            calls.set(calls.get() + 1);
            x[0] <= 0.3
        };
        let eps = 1e-3;
        let p = bisect_boundary_point(&[0.0], &[1.0], &cell, eps).unwrap();
        let halvings = calls.get() - 2;
        assert!(halvings <= (1.0f64 / eps).log2().ceil() as usize);
        assert!(0.3 - p[0] <= eps && p[0] <= 0.3);
    }

    #[test]
    fn bisection_precondition() {
        let cell = |x: &[f64]| x[0] < 0.5;
        assert_eq!(
            bisect_boundary_point(&[0.7], &[0.9], &cell, 1e-3),
            Err(GeometryError::BisectionPrecondition)
        );
        assert_eq!(
            bisect_boundary_point(&[0.1], &[0.2], &cell, 1e-3),
            Err(GeometryError::BisectionPrecondition)
        );
    }

    #[test]
    fn boundary_set_on_root_cell_hits_box_faces() {
        let space = unit(2);
        let eps = 1e-3;
        let cell = |x: &[f64]| space.contains(x);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        assert!(sample_boundary_set(&[0.4, 0.6], &cell, &space, 0, eps, &mut rng)
            .unwrap()
            .is_empty());
        let pts = sample_boundary_set(&[0.4, 0.6], &cell, &space, 64, eps, &mut rng).unwrap();
        assert_eq!(pts.len(), 64);
        for p in &pts {
            assert!(cell(p));
            assert!(p.iter().any(|&v| v <= eps || v >= 1.0 - eps), "{p:?}");
        }
    }

    #[test]
    fn probe_inside_cell_extends_to_face() {
        // The box is much wider than its diagonal-based probe reach in x,
        // so probes from the centre often land inside.
        let space = BoundedMetricSpace::new(vec![0.0, 0.0], vec![10.0, 0.1]).unwrap();
        let cell = |x: &[f64]| space.contains(x);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let eps = 1e-4;
        let pts = sample_boundary_set(&[5.0, 0.05], &cell, &space, 200, eps, &mut rng).unwrap();
        for p in pts {
            assert!(cell(&p));
            let on_face = p[0] <= eps || p[0] >= 10.0 - eps || p[1] <= eps || p[1] >= 0.1 - eps;
            assert!(on_face, "{p:?}");
        }
    }

    #[test]
    fn root_diameter_estimate() {
        let space = unit(2);
        let cell = |x: &[f64]| space.contains(x);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let eps = 1e-3 * space.outer_diameter();
        let d = estimate_cell_diameter(&[0.3, 0.7], &cell, &space, 64, eps, &mut rng).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 0.1 * 2f64.sqrt(), "{d}");
        assert!(d <= space.outer_diameter() + 2.0 * eps);
    }

    #[test]
    fn half_box_diameter_estimate() {
        let space = unit(2);
        let a = [0.25, 0.5];
        let b = [0.75, 0.5];
        let cell = |x: &[f64]| space.contains(x) && euclidean(x, &a) <= euclidean(x, &b);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let eps = 1e-3 * space.outer_diameter();
        let d = estimate_cell_diameter(&a, &cell, &space, 64, eps, &mut rng).unwrap();
        assert!((d - 1.25f64.sqrt()).abs() < 0.1 * 1.25f64.sqrt(), "{d}");
    }

    #[test]
    fn hit_and_run_stays_in_cell_and_is_deterministic() {
        let space = unit(2);
        let a = [0.2, 0.3];
        let b = [0.6, 0.8];
        let cell = |x: &[f64]| space.contains(x) && euclidean(x, &a) <= euclidean(x, &b);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10_000 {
            let p = hit_and_run_sample(&a, &cell, &space, 10, 1e-3, &mut rng).unwrap();
            assert!(cell(&p));
        }
        let p1 = hit_and_run_sample(&a, &cell, &space, 10, 1e-3, &mut ChaCha8Rng::seed_from_u64(1));
        let p2 = hit_and_run_sample(&a, &cell, &space, 10, 1e-3, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(p1, p2);
    }

    #[test]
    fn hit_and_run_mean_in_full_box() {
        let space = unit(2);
        let cell = |x: &[f64]| space.contains(x);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 10_000;
        let mut mean = [0.0, 0.0];
        for _ in 0..n {
            let p = hit_and_run_sample(&[0.2, 0.3], &cell, &space, 20, 1e-3, &mut rng).unwrap();
            mean[0] += p[0] / n as f64;
            mean[1] += p[1] / n as f64;
        }
        assert!((mean[0] - 0.5).abs() < 0.05 && (mean[1] - 0.5).abs() < 0.05, "{mean:?}");
    }

    #[test]
    fn hit_and_run_rejects_zero_steps() {
        let space = unit(2);
        let cell = |x: &[f64]| space.contains(x);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(hit_and_run_sample(&[0.5, 0.5], &cell, &space, 0, 1e-3, &mut rng).is_err());
    }
}
