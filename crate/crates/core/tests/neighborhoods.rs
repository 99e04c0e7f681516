mod common;

use common::*;
use conetree_core::metric::FiniteMetricSpace;
use conetree_core::PointSet;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn monotone_in_radius((sp, u) in arb_space_subset(60), r in arb_radius(-20, 20), dr in arb_radius(0, 10)) {
        let small = sp.neighborhood(&u, r);
        let large = sp.neighborhood(&u, r + dr);
        prop_assert!(small.is_subset(&large));
    }

    #[test]
    fn shrinking_a_neighborhood((sp, u) in arb_space_subset(60), s in arb_radius(0, 15), extra in arb_radius(0, 15)) {
        prop_assume!(s > 0.0 && extra > 0.0);
        let t = s + extra;
        let lhs = sp.neighborhood(&u, t - s);
        let rhs = sp.neighborhood(&sp.neighborhood(&u, t), -s);
        prop_assert!(lhs.is_subset(&rhs));
    }

    #[test]
    fn negative_radius_is_dual((sp, u) in arb_space_subset(60), s in arb_radius(0, 20)) {
        let shrunk = sp.neighborhood(&u, -s);
        let rest = u.complement();
        if rest.is_empty() {
            prop_assert!(shrunk.is_full());
        } else {
            prop_assert_eq!(shrunk, sp.closed_neighborhood(&rest, s).unwrap().complement());
        }
    }

    #[test]
    fn neighborhoods_match_pointwise_filters((sp, u) in arb_space_subset(50), r in arb_radius(-10, 10)) {
        let got = sp.neighborhood(&u, r);
        for z in 0..sp.len() {
            let expected = if r > 0.0 {
                brute_dist(&sp, z, &u) < r
            } else if r == 0.0 {
                u.contains(z)
            } else {
                brute_dist(&sp, z, &u.complement()) > -r
            };
            prop_assert_eq!(got.contains(z), expected, "z = {}", z);
        }
        if !u.is_empty() && r >= 0.0 {
            let closed = sp.closed_neighborhood(&u, r).unwrap();
            prop_assert!(u.is_subset(&closed));
            for z in 0..sp.len() {
                prop_assert_eq!(closed.contains(z), brute_dist(&sp, z, &u) <= r);
            }
        }
    }

    #[test]
    fn nets_and_diameters((sp, u) in arb_space_subset(50)) {
        prop_assume!(!u.is_empty());
        let radius = (0..sp.len()).map(|z| brute_dist(&sp, z, &u)).fold(0.0, f64::max);
        prop_assert_eq!(sp.net_radius(&u), radius);
        prop_assert!(sp.is_lambda_net(&u, radius));
        prop_assert!(!sp.is_lambda_net(&u, radius - 0.5) || radius == 0.0);
        let ids = u.to_vec();
        let diam = ids.iter().flat_map(|&a| ids.iter().map(move |&b| (a, b))).map(|(a, b)| sp.d(a, b)).fold(0.0, f64::max);
        prop_assert_eq!(sp.diameter(&u).unwrap(), diam);
    }
}

#[test]
fn singleton_net_at_eccentricity() {
    let sp = lattice(&[(0, 0), (3, 1), (5, 5), (2, 7), (9, 0)]);
    for c in 0..sp.len() {
        let e = sp.eccentricity(c);
        assert!(sp.is_lambda_net(&PointSet::singleton(sp.len(), c), e));
    }
}

#[test]
fn triangle_violations_are_rejected() {
    let rows = vec![vec![0.0, 1.0, 3.0], vec![1.0, 0.0, 1.0], vec![3.0, 1.0, 0.0]];
    let ids = vec!["a".to_string(), "b".into(), "c".into()];
    assert!(FiniteMetricSpace::from_matrix(ids.clone(), &rows).is_err());
    let rows = vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]];
    assert!(FiniteMetricSpace::from_matrix(ids, &rows).is_ok());
}
