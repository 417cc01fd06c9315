#[path = "support/oracles.rs"]
mod oracles;

use advt_core::geometry::{
    estimate_cell_diameter, hit_and_run_sample, min_enclosing_ball, min_enclosing_ball_diameter,
    sample_boundary_set, sample_uniform_box, BoundedMetricSpace, GeometryParams,
};
use advt_core::{CellMembership, PartitionMode};
use oracles::{brute_force_meb_diameter, leaves_accepting, meb_certificate, random_tree, random_tree_with_samples};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_points(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect()
}

#[test]
fn enclosing_ball_matches_brute_force_on_small_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for dim in [2usize, 3, 4] {
        for _ in 0..40 {
            let n = rng.random_range(1..=12);
            let pts = random_points(&mut rng, n, dim);
            let fast = min_enclosing_ball_diameter(&pts).unwrap();
            let slow = brute_force_meb_diameter(&pts);
            assert!((fast - slow).abs() < 1e-6, "dim {dim} n {n}: {fast} vs {slow}");
        }
    }
}

#[test]
fn enclosing_ball_certificate_in_6d() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..20 {
        let pts = random_points(&mut rng, 100, 6);
        let ball = min_enclosing_ball(&pts).unwrap();
        assert!(meb_certificate(&pts, &ball.center, ball.radius, 1e-6));
    }
}

#[test]
fn path_replay_agrees_with_locate_leaf() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for dim in [2usize, 6] {
        for mode in [PartitionMode::Voronoi, PartitionMode::Rectangular] {
            for _ in 0..100 {
                let splits = rng.random_range(0..20);
                let tree = random_tree(dim, splits, mode, &mut rng);
                let space = tree.space().clone();
                for _ in 0..100 {
                    let x = sample_uniform_box(&space, &mut rng);
                    let accepted = leaves_accepting(&tree, &x);
                    assert_eq!(accepted.len(), 1);
                    assert_eq!(accepted[0], tree.locate_leaf(&x).unwrap());
                    for (_, leaf) in tree.candidate_actions() {
                        let id = tree.leaf_id(leaf.action());
                        assert_eq!(tree.cell_oracle(id).contains(&x), id == accepted[0]);
                    }
                }
            }
        }
    }
}

#[test]
fn boundary_and_hit_and_run_points_stay_in_cell() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for dim in [2usize, 3, 6] {
        for _ in 0..20 {
            let tree = random_tree(dim, 12, PartitionMode::Voronoi, &mut rng);
            let params = GeometryParams::defaults_for(tree.space());
            for (_, leaf) in tree.candidate_actions() {
                let oracle = tree.cell_oracle(tree.leaf_id(leaf.action()));
                let boundary = sample_boundary_set(
                    leaf.anchor(),
                    &oracle,
                    tree.space(),
                    8,
                    params.bisection_tolerance,
                    &mut rng,
                )
                .unwrap();
                assert!(boundary.iter().all(|p| oracle.contains(p)));
                let x = hit_and_run_sample(
                    leaf.anchor(),
                    &oracle,
                    tree.space(),
                    params.hit_and_run_steps,
                    params.bisection_tolerance,
                    &mut rng,
                )
                .unwrap();
                assert!(oracle.contains(&x));
            }
        }
    }
}

#[test]
fn estimate_bounded_by_box_diameter() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let space = BoundedMetricSpace::unit_cube(3).unwrap();
    let params = GeometryParams::defaults_for(&space);
    let cell = |x: &[f64]| space.contains(x);
    for _ in 0..50 {
        let a = sample_uniform_box(&space, &mut rng);
        let d = estimate_cell_diameter(&a, &cell, &space, 16, params.bisection_tolerance, &mut rng).unwrap();
        assert!(d > 0.0);
        assert!(d <= space.outer_diameter() + 2.0 * params.bisection_tolerance);
    }
}

#[test]
#[ignore = "fails with the specified estimator: about 90% of splits meet the bound"]
fn child_estimates_rarely_exceed_parent() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let mut ok = 0;
    let mut total = 0;
    for dim in [2usize, 3] {
        for _ in 0..40 {
            let tree = random_tree_with_samples(dim, 6, PartitionMode::Voronoi, None, &mut rng);
            let eps = GeometryParams::defaults_for(tree.space()).bisection_tolerance;
            for (_, leaf) in tree.candidate_actions() {
                let parent = tree.node(leaf.parent().unwrap_or(tree.root()));
                total += 1;
                if leaf.diameter() <= parent.diameter() + 2.0 * eps {
                    ok += 1;
                }
            }
        }
    }
    assert!(ok as f64 >= 0.95 * total as f64, "{ok}/{total}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn enclosing_ball_contains_all_points(
        pts in proptest::collection::vec(proptest::collection::vec(-5.0f64..5.0, 3), 1..40)
    ) {
        let ball = min_enclosing_ball(&pts).unwrap();
        for p in &pts {
            prop_assert!(ball.contains(p, 1e-9));
        }
    }

    #[test]
    fn hit_and_run_closure(seed in any::<u64>(), splits in 0usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tree = random_tree(2, splits, PartitionMode::Voronoi, &mut rng);
        let params = GeometryParams::defaults_for(tree.space());
        for (_, leaf) in tree.candidate_actions() {
            let oracle = tree.cell_oracle(tree.leaf_id(leaf.action()));
            let x = hit_and_run_sample(leaf.anchor(), &oracle, tree.space(), 3, params.bisection_tolerance, &mut rng).unwrap();
            prop_assert!(oracle.contains(&x));
        }
    }
}
