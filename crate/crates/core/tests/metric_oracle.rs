//! Cross-validation of the unfolding distance engine and the metric graph
//! against the independent seam-chain oracle.

mod common;

use common::SeamOracle;
use hypsurf::metric::{MetricBuilder, NodeId};
use hypsurf::pants::{point_distance_exact, BoundaryPoint, PantsShape};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[test]
fn point_distance_matches_oracle_on_random_cases() {
    let mut rng = StdRng::seed_from_u64(101);
    for case in 0..12 {
        let shape = PantsShape::new(
            rng.gen_range(0.5..2.0),
            rng.gen_range(0.5..2.0),
            rng.gen_range(0.5..2.0),
        )
        .unwrap();
        let oracle = SeamOracle::new(&shape, 2500);
        let p = common::random_boundary_point(&shape, &mut rng);
        let q = common::random_boundary_point(&shape, &mut rng);
        let ours = point_distance_exact(&shape, &p, &q, 400_000).unwrap();
        let brute = oracle.distance(&p, &q);
        assert!(
            (ours.upper - brute).abs() <= 2.0 * oracle.spacing,
            "case {case}: engine {} vs oracle {brute} (spacing {})",
            ours.upper,
            oracle.spacing
        );
        // The oracle is a chain of realized paths, so it cannot undercut
        // the exact distance by more than roundoff.
        assert!(brute >= ours.upper - 1e-9, "oracle below exact distance");
    }
}

#[test]
fn metric_graph_bracket_contains_oracle_on_single_pants() {
    let mut rng = StdRng::seed_from_u64(202);
    let l = 1.1;
    let shape = PantsShape::new(l, l, l).unwrap();
    let m = 16usize;
    let mut b = MetricBuilder::new(m, 8, 2.0 * l / m as f64, l).unwrap();
    let p = b.add_pants_shaped(&shape);
    for slot in 0..3u8 {
        b.materialize_cuff(p, slot, 2.0 * l).unwrap();
    }
    let g = b.freeze();
    let oracle = SeamOracle::new(&shape, 2500);
    let spacing = 2.0 * l / m as f64;
    for _ in 0..15 {
        let (cs, ks) = (rng.gen_range(0..3u8), rng.gen_range(0..m));
        let (ct, kt) = (rng.gen_range(0..3u8), rng.gen_range(0..m));
        let src = (cs as usize * m + ks) as NodeId;
        let tgt = (ct as usize * m + kt) as NodeId;
        let r = g.distance(&[src], &[tgt]).unwrap().unwrap();
        let bp = BoundaryPoint::new((cs + 1) as usize, ks as f64 * spacing).unwrap();
        let bq = BoundaryPoint::new((ct + 1) as usize, kt as f64 * spacing).unwrap();
        let brute = oracle.distance(&bp, &bq);
        // Graph uppers are realized paths; the oracle is exact up to its
        // own resolution.
        assert!(r.upper >= brute - 2.0 * oracle.spacing, "upper below oracle");
        assert!(
            r.lower <= brute + 2.0 * oracle.spacing,
            "lower {} above oracle {brute}",
            r.lower
        );
    }
}
