//! Cross-module invariants: the quasi-isometry between tree distance and
//! surface distance, the matched-stream radius comparison between the
//! exploration and a tree growth, and the metric dump format.

use hypsurf::explore::radius_comparison;
use hypsurf::metric::build_surface_metric;
use hypsurf::rng::{LengthLaw, TwistLaw, WeightLaw};
use hypsurf::tree::{grow_ball, GrowParams, TreeSurface};

fn pm_law(l: f64) -> WeightLaw {
    WeightLaw {
        length: LengthLaw::PointMass(2.0 * l),
        twist: TwistLaw::UniformCircle,
    }
}

#[test]
fn quasi_isometry_between_tree_depth_and_metric() {
    // Tree-hop distance k and surface distance d between entering cuffs
    // satisfy d_upper >= delta_minus * (k - 1) and
    // d_lower <= delta_cap * (k + 1).
    let params = GrowParams {
        m: 8,
        word_cap: 8,
        pants_budget: 100_000,
    };
    for seed in 0..4u64 {
        let tree = TreeSurface::binary(pm_law(1.0), seed).unwrap();
        let bounds = tree.bounds();
        let (ball, snap) = grow_ball(&tree, 8.0, params).unwrap();
        for &id in snap.ball.iter().take(60) {
            if id == 0 {
                continue;
            }
            let depth = ball.path_of(id).depth as f64;
            let entry = ball.entry_result(id).unwrap();
            assert!(
                entry.upper >= bounds.delta_minus * (depth - 1.0) - 1e-9,
                "upper {} below delta_minus * (k-1) at depth {depth}",
                entry.upper
            );
            assert!(
                entry.lower <= bounds.delta_cap * (depth + 1.0) + 1e-9,
                "lower {} above delta_cap * (k+1) at depth {depth}",
                entry.lower
            );
        }
    }
}

#[test]
fn exploration_radius_close_to_matched_tree_radius() {
    // Bad steps only shorten distances: the exploration radius at a fixed
    // pants count exceeds the matched-stream tree radius by at most
    // 5 * diameter_cap per bad step plus bracket slack.
    for seed in 0..5u64 {
        let cmp = radius_comparison(22, &pm_law(1.0), 20, seed, 8, 8).unwrap();
        assert!(
            cmp.ok,
            "seed {seed}: exploration {} vs tree {} + allowance {} ({} bad steps)",
            cmp.exploration_radius, cmp.tree_radius, cmp.allowance, cmp.bad_steps
        );
    }
}

#[test]
fn metric_dump_lists_every_node_pair_once() {
    let law = pm_law(1.0);
    let surf = hypsurf::surface::sample_surface(2, &law, 3).unwrap();
    let metric = build_surface_metric(&surf, 6, 6).unwrap();
    let dump = metric.dump_edges();
    let mut seen = std::collections::HashSet::new();
    for line in dump.lines() {
        let f: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(f.len(), 7, "edge line has 7 fields");
        let w: f64 = f[6].parse().unwrap();
        assert!(w >= 0.0);
        seen.insert((
            f[0].to_string(),
            f[1].to_string(),
            f[2].to_string(),
            f[3].to_string(),
            f[4].to_string(),
            f[5].to_string(),
        ));
    }
    assert!(!seen.is_empty());
}

#[test]
fn frontier_distance_errors_on_paired_boundary() {
    let law = pm_law(1.0);
    let graph = hypsurf::surface::sample_surface(3, &law, 5).unwrap();
    let mut ex = hypsurf::explore::Exploration::new(&graph, 0, 8, 6, false).unwrap();
    ex.step().unwrap();
    let paired = ex.steps()[0].selected;
    assert!(ex.frontier_distance(paired.0, paired.1).is_err());
}

#[test]
fn sigma_pairs_within_double_band() {
    // |Sigma_2R - Sigma_R| <= 30 * D / R for grid pairs, by the triangle
    // inequality on the convergence band.
    let params = GrowParams {
        m: 8,
        word_cap: 8,
        pants_budget: 100_000,
    };
    let law = pm_law(1.0);
    let est = hypsurf::tree::estimate_alpha(&law, &[3.0, 6.0, 12.0], 40, params, 5).unwrap();
    let d_cap = TreeSurface::binary(law, 0).unwrap().bounds().delta_cap;
    for (a, b) in [(0usize, 1usize), (1, 2)] {
        let (ra, _, sa) = est.grid[a];
        let (_, _, sb) = est.grid[b];
        assert!((sb - sa).abs() <= 30.0 * d_cap / ra + 1e-12);
    }
}

#[test]
fn markov_degenerate_radius_is_skipped() {
    let law = pm_law(1.0);
    let params = GrowParams {
        m: 8,
        word_cap: 6,
        pants_budget: 50_000,
    };
    let err = hypsurf::tree::markov_independence_test(&law, 4.0, 0.0, 100, params, 1).unwrap_err();
    assert!(err.to_string().contains("degenerate"), "{err}");
}

#[test]
fn estimate_alpha_truncates_grid_under_tight_budget() {
    let params = GrowParams {
        m: 8,
        word_cap: 6,
        pants_budget: 60,
    };
    let est =
        hypsurf::tree::estimate_alpha(&pm_law(1.0), &[2.0, 4.0, 20.0], 4, params, 2).unwrap();
    assert!(est.truncated >= 1);
    assert!(est.grid.len() <= 2);
}
