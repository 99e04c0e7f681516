mod common;

use common::*;
use conetree_core::charseq::ast_shrink;
use conetree_core::covering::{ColoredCovering, Family};
use conetree_core::metric::FiniteMetricSpace;
use conetree_core::PointSet;
use proptest::prelude::*;

/// Open balls of the given radii around the given centers, plus singletons
/// for anything left uncovered, split round-robin into `colors` classes.
fn ball_covering(sp: &FiniteMetricSpace, centers: &[(usize, f64)], colors: usize) -> ColoredCovering {
    let n = sp.len();
    let mut members: Vec<PointSet> = centers
        .iter()
        .map(|&(c, rho)| sp.neighborhood(&PointSet::singleton(n, c % n), rho))
        .collect();
    let covered = members.iter().fold(PointSet::empty(n), |acc, m| acc.union(m));
    members.extend(covered.complement().iter().map(|z| PointSet::singleton(n, z)));
    let mut classes = vec![Family::default(); colors];
    for (i, m) in members.into_iter().enumerate() {
        classes[i % colors].members.push(m);
    }
    ColoredCovering::new(classes, 1.0)
}

fn arb_covering(max: usize) -> impl Strategy<Value = (FiniteMetricSpace, ColoredCovering)> {
    arb_space(max).prop_flat_map(|sp| {
        let n = sp.len();
        (
            Just(sp),
            prop::collection::vec((0..n, 1u32..20), 1..12),
            1usize..4,
        )
            .prop_map(|(sp, centers, colors)| {
                let centers: Vec<(usize, f64)> = centers.into_iter().map(|(c, r)| (c, r as f64 / 2.0)).collect();
                let cov = ball_covering(&sp, &centers, colors);
                (sp, cov)
            })
    })
}

fn brute_multiplicity(n: usize, members: &[PointSet]) -> usize {
    (0..n).map(|z| members.iter().filter(|m| m.contains(z)).count()).max().unwrap_or(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn quantities_match_brute_force((sp, cov) in arb_covering(50), r in arb_radius(0, 8)) {
        prop_assume!(r > 0.0);
        let n = sp.len();
        let flat = cov.flatten();
        let mesh = flat.members.iter().map(|m| sp.diameter(m).unwrap()).fold(0.0, f64::max);
        prop_assert_eq!(cov.mesh(&sp).unwrap(), mesh);
        prop_assert_eq!(flat.multiplicity(n), brute_multiplicity(n, &flat.members));
        let r_mult = (0..n)
            .map(|z| flat.members.iter().filter(|m| brute_dist(&sp, z, m) < r).count())
            .max()
            .unwrap();
        prop_assert_eq!(flat.r_multiplicity(&sp, r), r_mult);
        let lebesgue = (0..n)
            .map(|z| flat.members.iter().map(|m| brute_dist(&sp, z, &m.complement())).fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min);
        prop_assert_eq!(cov.lebesgue(&sp).unwrap(), lebesgue.min(mesh));
        let cap = cov.capacity(&sp).unwrap();
        prop_assert!((0.0..=1.0).contains(&cap));
        if mesh > 0.0 {
            prop_assert!(cov.lebesgue(&sp).unwrap() <= mesh);
        }
    }

    #[test]
    fn shrinking_below_the_lebesgue_number((sp, cov) in arb_covering(60), frac in 0.01f64..0.99) {
        let lebesgue = cov.lebesgue(&sp).unwrap();
        prop_assume!(lebesgue > 0.0 && lebesgue.is_finite());
        let s = frac * lebesgue;
        let shrunk = cov.shrink(&sp, s).unwrap();
        prop_assert!(shrunk.is_covering(&sp));
        prop_assert!(shrunk.flatten().r_multiplicity(&sp, s) <= cov.multiplicity(sp.len()));
    }

    #[test]
    fn disjoint_colors_bound_multiplicity((sp, cov) in arb_covering(50)) {
        let n = sp.len();
        // Keep, per color, a greedy disjoint subfamily.
        let classes: Vec<Family> = cov
            .classes
            .iter()
            .map(|f| {
                let mut kept: Vec<PointSet> = Vec::new();
                for m in f.iter() {
                    if kept.iter().all(|k| !k.intersects(m)) {
                        kept.push(m.clone());
                    }
                }
                Family::new(kept)
            })
            .collect();
        let colored = ColoredCovering::new(classes, 1.0);
        prop_assert!(colored.multiplicity(n) <= colored.colors());
    }

    #[test]
    fn star_merge_matches_pairwise_definition(
        (sp, cov) in arb_covering(40),
        other in prop::collection::vec((0usize..40, 0u32..6), 0..6),
        s in arb_radius(0, 6),
    ) {
        prop_assume!(s > 0.0);
        let n = sp.len();
        let fam = cov.flatten();
        let other = Family::new(
            other.iter().map(|&(c, r)| sp.neighborhood(&PointSet::singleton(n, c % n), r as f64 / 2.0)).collect(),
        );
        let merged = fam.star_merge(&sp, &other, s);
        prop_assert_eq!(merged.len(), fam.len());
        for (u, out) in fam.iter().zip(merged.iter()) {
            prop_assert!(sp.neighborhood(u, s).is_subset(out));
            let mut v = u.clone();
            for g in other.iter() {
                let meets = (0..n).any(|z| brute_dist(&sp, z, u) < s && brute_dist(&sp, z, g) < s);
                if meets {
                    v = v.union(g);
                }
            }
            let expected = PointSet::from_ids(n, (0..n).filter(|&z| brute_dist(&sp, z, &v) < s));
            prop_assert_eq!(out, &expected);
        }
    }

    #[test]
    fn ast_shrink_dichotomy(
        sp in arb_space(80),
        seeds in prop::collection::vec((0usize..80, 0u32..4), 1..10),
        u_center in 0usize..80,
        u_radius in 2u32..30,
        s_half in 1u32..8,
        delta in 0.01f64..=2.0 / 3.0,
    ) {
        let n = sp.len();
        let s = s_half as f64 / 2.0;
        // Members of diameter ≤ 2s, kept only while δs-disjoint.
        let mut ghat = Family::default();
        for &(c, r) in &seeds {
            let ball = sp.neighborhood(&PointSet::singleton(n, c % n), (r as f64 / 4.0).min(s));
            if sp.diameter(&ball).unwrap() > 2.0 * s {
                continue;
            }
            let mut trial = ghat.clone();
            trial.members.push(ball);
            if trial.is_r_disjoint(&sp, delta * s) {
                ghat = trial;
            }
        }
        let u = sp.neighborhood(&PointSet::singleton(n, u_center % n), u_radius as f64 / 2.0);
        let out = ast_shrink(&sp, &Family::new(vec![u.clone()]), &ghat, s, delta).unwrap();
        let star = &out.members[0];
        prop_assert!(star.is_subset(&u));
        for g in ghat.iter() {
            let ball = sp.neighborhood(g, delta * s);
            prop_assert!(!ball.intersects(star) || ball.is_subset(star));
        }
    }

    #[test]
    fn ast_shrink_keeps_nesting(
        sp in arb_space(80),
        seeds in prop::collection::vec((0usize..80, 0u32..4), 0..10),
        center in 0usize..80,
        r1 in 0u32..12,
        s_half in 1u32..4,
        margin in 1u32..10,
        delta in 0.01f64..=2.0 / 3.0,
    ) {
        let n = sp.len();
        let s = s_half as f64 / 2.0;
        let t = 4.0 * s + margin as f64 / 2.0;
        let mut ghat = Family::default();
        for &(c, r) in &seeds {
            let ball = sp.neighborhood(&PointSet::singleton(n, c % n), (r as f64 / 4.0).min(s));
            let mut trial = ghat.clone();
            trial.members.push(ball);
            if trial.is_r_disjoint(&sp, delta * s) && sp.diameter(trial.members.last().unwrap()).unwrap() <= 2.0 * s {
                ghat = trial;
            }
        }
        let u1 = sp.neighborhood(&PointSet::singleton(n, center % n), r1 as f64 / 2.0);
        let u2 = sp.neighborhood(&u1, t);
        let fam = Family::new(vec![u1, u2]);
        let out = ast_shrink(&sp, &fam, &ghat, s, delta).unwrap();
        prop_assert!(sp.neighborhood(&out.members[0], t - 4.0 * s).is_subset(&out.members[1]));
    }
}

#[test]
fn four_arcs_survive_a_small_shrink() {
    // Circle of 12 unit steps, arcs of length 3 overlapping by 1.
    let sp = FiniteMetricSpace::with_indices(12, |i, j| {
        let k = i.abs_diff(j);
        k.min(12 - k) as f64
    })
    .unwrap();
    let arcs: Vec<PointSet> = (0..4).map(|k| PointSet::from_ids(12, (3 * k..3 * k + 4).map(|i| i % 12))).collect();
    let cov = ColoredCovering::new(vec![Family::new(arcs)], 3.0);
    let shrunk = cov.shrink(&sp, 0.4).unwrap();
    assert!(shrunk.is_covering(&sp));
}
