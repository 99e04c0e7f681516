//! Families of subsets and colored coverings.
//!
//! Families are ordered and members are identified by position, so two equal
//! sets at different positions stay distinct members.

use alloc::vec;
use alloc::vec::Vec;

use crate::metric::FiniteMetricSpace;
use crate::{Error, PointSet, Result};

/// An ordered family of subsets of one space.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Family {
    pub members: Vec<PointSet>,
}

impl Family {
    pub fn new(members: Vec<PointSet>) -> Self {
        Self { members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, PointSet> {
        self.members.iter()
    }

    /// Union of all members.
    pub fn union(&self, n: usize) -> PointSet {
        let mut u = PointSet::empty(n);
        for m in &self.members {
            u.union_with(m);
        }
        u
    }

    /// `sup diam U` over the members.
    pub fn mesh(&self, space: &FiniteMetricSpace) -> Result<f64> {
        if self.members.is_empty() {
            return Err(Error::EmptyFamily);
        }
        self.members
            .iter()
            .try_fold(0.0f64, |acc, m| Ok(acc.max(space.diameter(m)?)))
    }

    /// Largest number of members sharing a point.
    pub fn multiplicity(&self, n: usize) -> usize {
        let mut counts = vec![0usize; n];
        for m in &self.members {
            for z in m.iter() {
                counts[z] += 1;
            }
        }
        counts.into_iter().max().unwrap_or(0)
    }

    /// Multiplicity of the family of open `r`-neighborhoods of the members.
    pub fn r_multiplicity(&self, space: &FiniteMetricSpace, r: f64) -> usize {
        self.expanded(space, r).multiplicity(space.len())
    }

    /// Memberwise `B_r`, empty members kept in place.
    pub fn expanded(&self, space: &FiniteMetricSpace, r: f64) -> Family {
        Family::new(self.members.iter().map(|m| space.neighborhood(m, r)).collect())
    }

    /// Whether the open `r`-neighborhoods of the members are pairwise disjoint.
    pub fn is_r_disjoint(&self, space: &FiniteMetricSpace, r: f64) -> bool {
        self.r_multiplicity(space, r) <= 1
    }

    /// The largest `ρ` for which the family is `ρ`-disjoint.
    ///
    /// `B_ρ(U) ∩ B_ρ(U') = ∅` iff `max(dist(z,U), dist(z,U')) ≥ ρ` for every
    /// `z`, so the answer is the minimum of that maximum over pairs and
    /// points (`+∞` for fewer than two members).
    pub fn disjointness_radius(&self, space: &FiniteMetricSpace) -> f64 {
        let fields: Vec<Vec<f64>> = self.members.iter().map(|m| space.distance_field(m)).collect();
        let mut best = f64::INFINITY;
        for a in 0..fields.len() {
            for b in (a + 1)..fields.len() {
                for (x, y) in fields[a].iter().zip(&fields[b]) {
                    let v = x.max(*y);
                    if v < best {
                        best = v;
                    }
                }
            }
        }
        best
    }

    /// Smallest inner-ball radius: `min_U max_{z∈U} dist(z, Z \ U)`.
    pub fn inner_ball_radius(&self, space: &FiniteMetricSpace) -> f64 {
        self.members
            .iter()
            .map(|m| m.iter().map(|z| space.depth_in(z, m)).fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min)
    }

    /// `U *_s U'`: for each member `U`, the `s`-neighborhood of `U` together
    /// with every member `U'` of `other` whose `s`-neighborhood meets `B_s(U)`.
    pub fn star_merge(&self, space: &FiniteMetricSpace, other: &Family, s: f64) -> Family {
        let other_nbhd: Vec<PointSet> = other.members.iter().map(|g| space.neighborhood(g, s)).collect();
        let members = self
            .members
            .iter()
            .map(|u| {
                let bu = space.neighborhood(u, s);
                let mut v = u.clone();
                for (g, bg) in other.members.iter().zip(&other_nbhd) {
                    if bu.intersects(bg) {
                        v.union_with(g);
                    }
                }
                space.neighborhood(&v, s)
            })
            .collect();
        Family::new(members)
    }
}

/// A covering split into color classes, annotated with its nominal scale.
#[derive(Clone, Debug, PartialEq)]
pub struct ColoredCovering {
    pub classes: Vec<Family>,
    pub scale: f64,
}

/// How a Lebesgue number was evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LebesgueMode {
    /// `min(L', mesh)`.
    Capped,
    /// Uncapped `L'`, used when every member is a single point (mesh 0):
    /// the number is then read as the largest radius of balls that fit
    /// inside members.
    Isolated,
}

impl LebesgueMode {
    pub fn as_str(self) -> &'static str {
        match self {
            LebesgueMode::Capped => "capped",
            LebesgueMode::Isolated => "isolated",
        }
    }
}

impl ColoredCovering {
    pub fn new(classes: Vec<Family>, scale: f64) -> Self {
        Self { classes, scale }
    }

    /// Builds a covering and checks that it covers the space.
    pub fn covering(space: &FiniteMetricSpace, classes: Vec<Family>, scale: f64) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::InvalidParameter("a colored covering needs at least one color".into()));
        }
        let c = Self::new(classes, scale);
        if !c.is_covering(space) {
            return Err(Error::InvalidParameter("members do not cover the space".into()));
        }
        Ok(c)
    }

    pub fn colors(&self) -> usize {
        self.classes.len()
    }

    /// All members with their `(color, index)` position.
    pub fn members(&self) -> impl Iterator<Item = (usize, usize, &PointSet)> {
        self.classes
            .iter()
            .enumerate()
            .flat_map(|(a, f)| f.members.iter().enumerate().map(move |(i, m)| (a, i, m)))
    }

    pub fn member_count(&self) -> usize {
        self.classes.iter().map(Family::len).sum()
    }

    /// All members as one family, colors concatenated in order.
    pub fn flatten(&self) -> Family {
        Family::new(self.members().map(|(_, _, m)| m.clone()).collect())
    }

    pub fn union(&self, n: usize) -> PointSet {
        let mut u = PointSet::empty(n);
        for (_, _, m) in self.members() {
            u.union_with(m);
        }
        u
    }

    pub fn is_covering(&self, space: &FiniteMetricSpace) -> bool {
        self.union(space.len()).is_full()
    }

    pub fn mesh(&self, space: &FiniteMetricSpace) -> Result<f64> {
        self.flatten().mesh(space)
    }

    pub fn multiplicity(&self, n: usize) -> usize {
        self.flatten().multiplicity(n)
    }

    /// `L'(z) = sup_U dist(z, Z \ U)` over all members.
    pub fn uncapped_lebesgue_at(&self, space: &FiniteMetricSpace, z: usize) -> f64 {
        self.members()
            .map(|(_, _, m)| space.depth_in(z, m))
            .fold(0.0, f64::max)
    }

    /// `L(U, z) = min(L'(U, z), mesh(U))`.
    pub fn lebesgue_at(&self, space: &FiniteMetricSpace, z: usize) -> Result<f64> {
        Ok(self.uncapped_lebesgue_at(space, z).min(self.mesh(space)?))
    }

    /// `L'(z)` for every point at once.
    pub fn uncapped_lebesgue_field(&self, space: &FiniteMetricSpace) -> Vec<f64> {
        let mut best = vec![0.0f64; space.len()];
        for (_, _, m) in self.members() {
            for z in m.iter() {
                let d = space.depth_in(z, m);
                if d > best[z] {
                    best[z] = d;
                }
            }
        }
        best
    }

    /// `L(U) = inf_z L(U, z)`.
    pub fn lebesgue(&self, space: &FiniteMetricSpace) -> Result<f64> {
        let mesh = self.mesh(space)?;
        Ok(self.min_uncapped_lebesgue(space).min(mesh))
    }

    pub fn min_uncapped_lebesgue(&self, space: &FiniteMetricSpace) -> f64 {
        self.uncapped_lebesgue_field(space)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    /// Lebesgue number used by the sequence checks: capped as usual, except
    /// that coverings by single points (mesh 0) use the uncapped `L'`.
    pub fn scale_lebesgue(&self, space: &FiniteMetricSpace) -> Result<(f64, LebesgueMode)> {
        let mesh = self.mesh(space)?;
        let uncapped = self.min_uncapped_lebesgue(space);
        if mesh == 0.0 {
            Ok((uncapped, LebesgueMode::Isolated))
        } else {
            Ok((uncapped.min(mesh), LebesgueMode::Capped))
        }
    }

    /// `cap(U) = L(U) / mesh(U)`, defined as 1 when the mesh vanishes.
    pub fn capacity(&self, space: &FiniteMetricSpace) -> Result<f64> {
        let mesh = self.mesh(space)?;
        if mesh == 0.0 || mesh.is_infinite() {
            return Ok(1.0);
        }
        Ok(self.lebesgue(space)? / mesh)
    }

    /// Memberwise `B_{-s}`; colors kept, empty members dropped.
    pub fn shrink(&self, space: &FiniteMetricSpace, s: f64) -> Result<ColoredCovering> {
        let lebesgue = self.lebesgue(space)?;
        if !(s > 0.0) || s >= lebesgue {
            return Err(Error::ShrinkExceedsLebesgue { s, lebesgue });
        }
        let classes = self
            .classes
            .iter()
            .map(|f| {
                Family::new(
                    f.members
                        .iter()
                        .map(|m| space.neighborhood(m, -s))
                        .filter(|m| !m.is_empty())
                        .collect(),
                )
            })
            .collect();
        let shrunk = ColoredCovering::new(classes, self.scale);
        if !shrunk.is_covering(space) {
            return Err(Error::Verification(alloc::format!(
                "shrink by {s} below the Lebesgue number {lebesgue} lost coverage"
            )));
        }
        Ok(shrunk)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integer_line(n: usize) -> FiniteMetricSpace {
        FiniteMetricSpace::with_indices(n, |i, j| (i as f64 - j as f64).abs()).unwrap()
    }

    fn scaled_line(n: usize, h: f64) -> FiniteMetricSpace {
        FiniteMetricSpace::with_indices(n, |i, j| h * (i as f64 - j as f64).abs()).unwrap()
    }

    fn circle(n: usize) -> FiniteMetricSpace {
        FiniteMetricSpace::with_indices(n, |i, j| {
            let k = (i as f64 - j as f64).abs();
            k.min(n as f64 - k)
        })
        .unwrap()
    }

    fn range(n: usize, lo: usize, hi: usize) -> PointSet {
        PointSet::from_ids(n, lo..hi)
    }

    fn arc(n: usize, start: usize, len: usize) -> PointSet {
        PointSet::from_ids(n, (start..start + len).map(|i| i % n))
    }

    #[test]
    fn mesh_examples() {
        let sp = FiniteMetricSpace::with_indices(4, |i, j| {
            let x: [f64; 4] = [0.0, 0.3, 1.0, 1.5];
            (x[i] - x[j]).abs()
        })
        .unwrap();
        let f = Family::new(vec![range(4, 0, 2), range(4, 2, 4)]);
        assert_eq!(f.mesh(&sp).unwrap(), 0.5);
        let singles = Family::new((0..4).map(|i| PointSet::singleton(4, i)).collect());
        assert_eq!(singles.mesh(&sp).unwrap(), 0.0);
        assert_eq!(Family::default().mesh(&sp), Err(Error::EmptyFamily));
    }

    #[test]
    fn multiplicity_examples() {
        let disjoint = Family::new(vec![range(9, 0, 3), range(9, 3, 6), range(9, 6, 9)]);
        assert_eq!(disjoint.multiplicity(9), 1);
        let shared = Family::new(vec![range(9, 0, 5), range(9, 4, 9), range(9, 3, 6)]);
        assert_eq!(shared.multiplicity(9), 3);
    }

    #[test]
    fn r_multiplicity_examples() {
        let sp = integer_line(12);
        let far = Family::new(vec![range(12, 0, 2), range(12, 6, 8)]);
        // Only sample points count: the open 3-neighborhoods {0..3} and
        // {4..9} miss each other, the 3.1-neighborhoods share 4.
        assert_eq!(far.r_multiplicity(&sp, 3.0), 1);
        assert_eq!(far.r_multiplicity(&sp, 3.1), 2);
        let one = Family::new(vec![range(12, 3, 5)]);
        for r in [0.5, 1.0, 10.0] {
            assert_eq!(one.r_multiplicity(&sp, r), 1);
        }
        // The largest disjointness radius agrees with the definition.
        let rho = far.disjointness_radius(&sp);
        assert!(far.is_r_disjoint(&sp, rho));
        assert!(!far.is_r_disjoint(&sp, rho + 1e-9));
    }

    #[test]
    fn lebesgue_of_whole_space_is_mesh() {
        let sp = scaled_line(11, 0.1);
        let c = ColoredCovering::covering(&sp, vec![Family::new(vec![sp.full()])], 1.0).unwrap();
        let diam = sp.diam();
        assert_eq!(c.lebesgue_at(&sp, 3).unwrap(), diam);
        assert_eq!(c.lebesgue(&sp).unwrap(), diam);
        assert_eq!(c.capacity(&sp).unwrap(), 1.0);
    }

    #[test]
    fn lebesgue_at_depth() {
        // Members [0,6] and [5,10] on the integer line 0..=10.
        let sp = integer_line(11);
        let c = ColoredCovering::covering(
            &sp,
            vec![Family::new(vec![range(11, 0, 7)]), Family::new(vec![range(11, 5, 11)])],
            1.0,
        )
        .unwrap();
        // Point 2 is 5 away from the complement of [0,6] (point 7); mesh is 6.
        assert_eq!(c.lebesgue_at(&sp, 2).unwrap(), 5.0);
        // Point 5 sits one step inside [0,6] and ... at the boundary of [5,10].
        assert_eq!(c.lebesgue_at(&sp, 5).unwrap(), 2.0);
        let brute = (0..11)
            .map(|z| c.lebesgue_at(&sp, z).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(c.lebesgue(&sp).unwrap(), brute);
        assert!(c.lebesgue(&sp).unwrap() <= c.mesh(&sp).unwrap());
    }

    #[test]
    fn singleton_covering_has_zero_lebesgue_and_unit_capacity() {
        let sp = scaled_line(6, 0.5);
        let singles = Family::new((0..6).map(|i| PointSet::singleton(6, i)).collect());
        let c = ColoredCovering::covering(&sp, vec![singles], 0.1).unwrap();
        assert_eq!(c.lebesgue(&sp).unwrap(), 0.0);
        assert_eq!(c.capacity(&sp).unwrap(), 1.0);
        let (l, mode) = c.scale_lebesgue(&sp).unwrap();
        assert_eq!(mode, LebesgueMode::Isolated);
        assert_eq!(l, 0.5);
    }

    #[test]
    fn two_arc_capacity_is_ratio() {
        let sp = circle(12);
        let c = ColoredCovering::covering(
            &sp,
            vec![Family::new(vec![arc(12, 0, 8)]), Family::new(vec![arc(12, 6, 8)])],
            1.0,
        )
        .unwrap();
        let cap = c.capacity(&sp).unwrap();
        assert!(cap > 0.0 && cap < 1.0);
        let ratio = c.lebesgue(&sp).unwrap() / c.mesh(&sp).unwrap();
        assert_eq!(cap, ratio);
    }

    #[test]
    fn shrink_keeps_circle_covered() {
        // Circle of length 8 at spacing 1/8 (64 points), four arcs of length 3
        // with overlap 1: arcs start at 0, 2, 4, 6 (in length units).
        let n = 64;
        let sp = FiniteMetricSpace::with_indices(n, |i, j| {
            let k = (i as f64 - j as f64).abs();
            k.min(n as f64 - k) / 8.0
        })
        .unwrap();
        let arcs: Vec<PointSet> = (0..4).map(|k| arc(n, 16 * k, 25)).collect();
        let c = ColoredCovering::covering(
            &sp,
            vec![
                Family::new(vec![arcs[0].clone(), arcs[2].clone()]),
                Family::new(vec![arcs[1].clone(), arcs[3].clone()]),
            ],
            3.0,
        )
        .unwrap();
        assert!(c.lebesgue(&sp).unwrap() > 0.4);
        let shrunk = c.shrink(&sp, 0.4).unwrap();
        assert!(shrunk.is_covering(&sp));
        assert!(shrunk.flatten().r_multiplicity(&sp, 0.4) <= c.multiplicity(n));

        let tiny = c.shrink(&sp, 1e-6).unwrap();
        assert!(tiny.is_covering(&sp));
    }

    #[test]
    fn shrink_rejects_radius_beyond_lebesgue() {
        let sp = integer_line(11);
        let c = ColoredCovering::covering(
            &sp,
            vec![Family::new(vec![range(11, 0, 7)]), Family::new(vec![range(11, 5, 11)])],
            1.0,
        )
        .unwrap();
        let l = c.lebesgue(&sp).unwrap();
        assert!(matches!(c.shrink(&sp, l), Err(Error::ShrinkExceedsLebesgue { .. })));
    }

    #[test]
    fn star_merge_examples() {
        let sp = integer_line(20);
        let f = Family::new(vec![range(20, 4, 6)]);
        let empty = Family::default();
        assert_eq!(f.star_merge(&sp, &empty, 1.5).members[0], sp.neighborhood(&f.members[0], 1.5));

        let far = Family::new(vec![range(20, 12, 14)]);
        assert_eq!(f.star_merge(&sp, &far, 1.5).members[0], range(20, 3, 7));

        // Neighborhoods of radius 1.5 around [4,5] and [7,8] share point 6.
        let near = Family::new(vec![range(20, 7, 9), range(20, 15, 16)]);
        let merged = f.star_merge(&sp, &near, 1.5);
        assert_eq!(merged.members[0], range(20, 3, 10));
        assert_eq!(merged.len(), 1);
    }
}
