#![allow(dead_code)]

use conetree_core::metric::FiniteMetricSpace;
use conetree_core::PointSet;
use proptest::prelude::*;

/// Distinct lattice points with the ℓ¹ metric, so every distance is an
/// exact small integer and ties are frequent.
pub fn lattice(points: &[(i32, i32)]) -> FiniteMetricSpace {
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    FiniteMetricSpace::with_indices(pts.len(), |i, j| {
        ((pts[i].0 - pts[j].0).abs() + (pts[i].1 - pts[j].1).abs()) as f64
    })
    .unwrap()
}

pub fn arb_space(max: usize) -> impl Strategy<Value = FiniteMetricSpace> {
    prop::collection::vec((0i32..30, 0i32..30), 2..max).prop_map(|p| lattice(&p))
}

pub fn arb_subset(n: usize) -> impl Strategy<Value = PointSet> {
    prop::collection::vec(any::<bool>(), n).prop_map(move |bits| {
        PointSet::from_ids(n, bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i))
    })
}

pub fn arb_space_subset(max: usize) -> impl Strategy<Value = (FiniteMetricSpace, PointSet)> {
    arb_space(max).prop_flat_map(|sp| {
        let n = sp.len();
        (Just(sp), arb_subset(n))
    })
}

/// Radii on the half-integer lattice, where ties with ℓ¹ distances happen.
pub fn arb_radius(lo: i32, hi: i32) -> impl Strategy<Value = f64> {
    (2 * lo..=2 * hi).prop_map(|k| k as f64 / 2.0)
}

pub fn brute_dist(sp: &FiniteMetricSpace, z: usize, set: &PointSet) -> f64 {
    set.iter().map(|u| sp.d(z, u)).fold(f64::INFINITY, f64::min)
}
