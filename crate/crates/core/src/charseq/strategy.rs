use alloc::vec;
use alloc::vec::Vec;

use crate::covering::{ColoredCovering, Family};
use crate::metric::FiniteMetricSpace;
use crate::PointSet;

/// Constructive generators for single-scale colored coverings.
///
/// The existence of good coverings follows from the capacity dimension but
/// is not constructive, so each strategy knows the shape of one family of
/// spaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Points in cyclic order (circles): overlapping arcs, colors shifted
    /// by a fraction of the period.
    CircleArcs,
    /// Points in linear order (intervals): overlapping blocks.
    IntervalBlocks,
    /// Ultrametric-like sets: the clopen pieces of a single-linkage
    /// partition.
    CantorClopen,
    /// Leaves of a tree: cylinders, found the same way as clopen pieces.
    TreeBoundaryCylinders,
    /// Any space: balls around a greedy net, greedily colored.
    GenericGreedy,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::CircleArcs,
        Strategy::IntervalBlocks,
        Strategy::CantorClopen,
        Strategy::TreeBoundaryCylinders,
        Strategy::GenericGreedy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::CircleArcs => "circle_arcs",
            Strategy::IntervalBlocks => "interval_blocks",
            Strategy::CantorClopen => "cantor_clopen",
            Strategy::TreeBoundaryCylinders => "tree_boundary_cylinders",
            Strategy::GenericGreedy => "generic_greedy",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }
}

impl core::fmt::Display for Strategy {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// A colored covering of `space` with mesh at most `target`, or `None` when
/// the strategy has no such covering for this `variant`.
///
/// Variants enumerate alternative layouts (gaps, periods, thresholds) and
/// are what the capacity search explores; variant 0 is the default. The
/// number of colors can exceed `colors` only for [`Strategy::GenericGreedy`].
pub fn covering_at_scale(
    space: &FiniteMetricSpace,
    strategy: Strategy,
    target: f64,
    colors: usize,
    variant: usize,
    delta_hint: f64,
) -> Option<ColoredCovering> {
    if colors == 0 || !(target > 0.0) {
        return None;
    }
    let n = space.len();
    let classes = if space.diam() <= target {
        if variant > 0 {
            return None;
        }
        vec![Family::new(vec![space.full()]); colors]
    } else if target < space.min_separation() {
        if variant > 0 {
            return None;
        }
        let singles = Family::new((0..n).map(|z| PointSet::singleton(n, z)).collect());
        vec![singles; colors]
    } else {
        match strategy {
            Strategy::CircleArcs => ordered_blocks(space, true, target, colors, variant)?,
            Strategy::IntervalBlocks => ordered_blocks(space, false, target, colors, variant)?,
            Strategy::CantorClopen | Strategy::TreeBoundaryCylinders => {
                let mut classes = vec![Family::default(); colors];
                classes[0] = linkage_partition(space, target, variant)?;
                classes
            }
            Strategy::GenericGreedy => greedy_balls(space, target, colors, variant, delta_hint)?,
        }
    };
    let covering = ColoredCovering::new(classes, target);
    let mesh_ok = covering
        .members()
        .all(|(_, _, m)| space.diameter(m).is_ok_and(|d| d <= target));
    (mesh_ok && covering.is_covering(space)).then_some(covering)
}

/// Largest `w` such that every run of `w` consecutive points has diameter
/// at most `target`.
fn window_limit(space: &FiniteMetricSpace, cyclic: bool, target: f64) -> usize {
    let n = space.len();
    let mut diam = vec![0.0f64; n];
    for w in 2..=n {
        let starts = if cyclic { n } else { n + 1 - w };
        for (s, slot) in diam.iter_mut().enumerate().take(starts) {
            let newest = (s + w - 1) % n;
            let row = space.row(newest);
            let mut d = *slot;
            for k in 0..(w - 1) {
                d = d.max(row[(s + k) % n]);
            }
            if d > target {
                return w - 1;
            }
            *slot = d;
        }
    }
    n
}

fn run(n: usize, start: usize, end: usize) -> PointSet {
    PointSet::from_ids(n, (start..end).map(|i| i % n))
}

fn ordered_blocks(
    space: &FiniteMetricSpace,
    cyclic: bool,
    target: f64,
    colors: usize,
    variant: usize,
) -> Option<Vec<Family>> {
    let n = space.len();
    let w_max = window_limit(space, cyclic, target);
    if colors == 1 {
        // A partition into consecutive blocks.
        let blocks = n.div_ceil(w_max) + variant;
        if blocks > n {
            return None;
        }
        let bound = |t: usize| t * n / blocks;
        let members = (0..blocks).map(|t| run(n, bound(t), bound(t + 1))).collect();
        return Some(vec![Family::new(members)]);
    }
    let gap = 1 + variant % 3;
    let narrowing = variant / 3;
    let width_cap = w_max.checked_sub(narrowing).filter(|&w| w >= 1)?;
    let period = width_cap + gap;
    let periods = n.div_ceil(period);
    let total = periods * colors;
    if total > n {
        return None;
    }
    // Sub-block boundaries, extended periodically past `n` for cyclic runs.
    let bound = |t: usize| (t % total) * n / total + (t / total) * n;
    let mut classes = vec![Family::default(); colors];
    for t in 0..total {
        let start = bound(t);
        let end = if cyclic || t + colors <= total {
            bound(t + colors).checked_sub(gap)?
        } else {
            n
        };
        if end <= start || end < bound(t + 1).min(if cyclic { usize::MAX } else { n }) {
            return None;
        }
        classes[t % colors].members.push(run(n, start, end));
    }
    Some(classes)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Components of the graph joining points closer than `eps`, in order of
/// their smallest point.
fn components(space: &FiniteMetricSpace, eps: f64) -> Vec<PointSet> {
    let n = space.len();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        let row = space.row(i);
        for (j, &d) in row.iter().enumerate().skip(i + 1) {
            if d < eps {
                uf.union(i, j);
            }
        }
    }
    let mut index = vec![usize::MAX; n];
    let mut parts: Vec<PointSet> = Vec::new();
    for z in 0..n {
        let root = uf.find(z);
        if index[root] == usize::MAX {
            index[root] = parts.len();
            parts.push(PointSet::empty(n));
        }
        parts[index[root]].insert(z);
    }
    parts
}

fn linkage_partition(space: &FiniteMetricSpace, target: f64, variant: usize) -> Option<Family> {
    let n = space.len();
    let mut levels: Vec<f64> = (0..n)
        .flat_map(|i| space.row(i)[i + 1..].iter().copied())
        .collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let feasible = |eps: f64| {
        components(space, eps)
            .iter()
            .all(|c| space.diameter(c).is_ok_and(|d| d <= target))
    };
    // Feasibility is monotone in the threshold; the smallest distance gives
    // singletons and is always feasible.
    let (mut lo, mut hi) = (0usize, levels.len());
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if feasible(levels[mid]) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let pick = lo.checked_sub(variant)?;
    Some(Family::new(components(space, levels[pick])))
}

fn greedy_balls(
    space: &FiniteMetricSpace,
    target: f64,
    colors: usize,
    variant: usize,
    delta_hint: f64,
) -> Option<Vec<Family>> {
    const SPACING: [f64; 4] = [0.25, 1.0 / 3.0, 0.2, 1.0 / 6.0];
    let spacing = SPACING.get(variant)? * target;
    let n = space.len();
    let mut centers: Vec<usize> = Vec::new();
    for z in 0..n {
        if centers.iter().all(|&c| space.d(c, z) >= spacing) {
            centers.push(z);
        }
    }
    let radius = target / 2.0;
    let separation = delta_hint * target;
    let mut classes: Vec<Vec<(PointSet, Vec<f64>)>> = Vec::new();
    for &c in &centers {
        let ball = space.neighborhood(&PointSet::singleton(n, c), radius);
        let field = space.distance_field(&ball);
        let fits = |class: &Vec<(PointSet, Vec<f64>)>| {
            class.iter().all(|(_, other)| {
                field
                    .iter()
                    .zip(other)
                    .all(|(a, b)| a.max(*b) >= separation)
            })
        };
        match classes.iter().position(fits) {
            Some(k) => classes[k].push((ball, field)),
            None => classes.push(vec![(ball, field)]),
        }
    }
    let mut out: Vec<Family> = classes
        .into_iter()
        .map(|c| Family::new(c.into_iter().map(|(b, _)| b).collect()))
        .collect();
    while out.len() < colors {
        out.push(Family::default());
    }
    Some(out)
}
