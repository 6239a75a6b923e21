//! Property tests over the combinatorial layer and the pants charts.

use hypsurf::pants::{build_hexagon_chart, seam_length, PantsShape};
use hypsurf::rng::{LengthLaw, TwistLaw, WeightLaw};
use hypsurf::surface::{deserialize, sample_surface, serialize};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn surface_record_round_trips(genus in 2usize..8, seed in 0u64..5000) {
        let law = WeightLaw {
            length: LengthLaw::LogUniform(0.6, 5.0),
            twist: TwistLaw::UniformCircle,
        };
        let g = sample_surface(genus, &law, seed).unwrap();
        let text = serialize(&g);
        let back = deserialize(&text).unwrap();
        prop_assert_eq!(&g, &back);
        prop_assert_eq!(text, serialize(&back));
    }

    #[test]
    fn seam_lengths_respect_support_bounds(
        l1 in 0.3f64..2.5, l2 in 0.3f64..2.5, l3 in 0.3f64..2.5,
    ) {
        let shape = PantsShape::new(l1, l2, l3).unwrap();
        let lm = l1.min(l2).min(l3);
        let lp = l1.max(l2).max(l3);
        let b = hypsurf::pants::pants_bounds(lm, lp).unwrap();
        for (i, j) in [(1usize, 2usize), (2, 3), (3, 1)] {
            let s = seam_length(&shape, i, j).unwrap();
            prop_assert!(b.delta_minus - 1e-9 <= s && s <= b.delta_plus + 1e-9);
        }
    }

    #[test]
    fn hexagon_vertices_reproduce_side_lengths(
        l1 in 0.3f64..2.5, l2 in 0.3f64..2.5, l3 in 0.3f64..2.5,
    ) {
        let shape = PantsShape::new(l1, l2, l3).unwrap();
        let hex = build_hexagon_chart(&shape).unwrap();
        for i in 0..6 {
            let measured = hex.vertices[i].distance_to(&hex.vertices[(i + 1) % 6]);
            prop_assert!((measured - hex.sides[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn arc_twist_stays_in_range(length in 0.05f64..50.0, twist in 0.0f64..std::f64::consts::TAU) {
        let w = hypsurf::surface::EdgeWeight { length, twist };
        let arc = w.arc_twist();
        prop_assert!((0.0..length).contains(&arc));
        let back = arc / length * std::f64::consts::TAU;
        prop_assert!((back - twist).abs() < 1e-9);
    }
}
