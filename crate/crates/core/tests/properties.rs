//! Randomized invariants over the geometry primitives.

use proptest::prelude::*;

use tactip_core::imagery::MarkerSet;
use tactip_core::pressure::magnitude_sum;
use tactip_core::tracking::{euclidean_distance, match_points, VectorField};

fn points(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0..50.0f64, 0.0..50.0f64), 0..=max)
}

proptest! {
    #[test]
    fn matching_is_a_partial_injection_within_range(
        origins in points(12),
        currents in points(12),
        max_dist in 0.5..30.0f64,
    ) {
        let assignment = match_points(
            &MarkerSet { points: origins.clone() },
            &MarkerSet { points: currents.clone() },
            max_dist,
        ).unwrap();
        let mut seen_o = std::collections::HashSet::new();
        let mut seen_c = std::collections::HashSet::new();
        for &(i, j) in &assignment.pairs {
            prop_assert!(seen_o.insert(i));
            prop_assert!(seen_c.insert(j));
            prop_assert!(euclidean_distance(origins[i], currents[j]) <= max_dist);
        }
        prop_assert_eq!(
            assignment.pairs.len() + assignment.unmatched_origins.len(),
            origins.len()
        );
        prop_assert_eq!(
            assignment.pairs.len() + assignment.unmatched_currents.len(),
            currents.len()
        );
    }

    #[test]
    fn magnitude_sum_is_positively_homogeneous(
        disp in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 1..20),
        scale in 0.0..10.0f64,
    ) {
        let field = VectorField {
            vectors: disp.iter().map(|&d| ((0.0, 0.0), d)).collect(),
        };
        let scaled = VectorField {
            vectors: disp.iter().map(|&(x, y)| ((0.0, 0.0), (scale * x, scale * y))).collect(),
        };
        let expected = scale * magnitude_sum(&field);
        prop_assert!((magnitude_sum(&scaled) - expected).abs() < 1e-9 * (1.0 + expected));
    }
}
