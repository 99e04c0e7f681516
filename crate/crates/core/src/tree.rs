//! The trees `T_a` of a characteristic sequence and the map `f: X → ∏ T_a`.
//!
//! The vertices of `T_a` are the root `v_a` (standing for `Z`) and the
//! members of `U_j^a`, `j ≥ 1`. A level-`j` member hangs below the member
//! containing it at the largest level `j' < j`, or below the root when no
//! member contains it. Containment is `⊆`, so a set repeated at consecutive
//! levels forms a chain.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::charseq::CharSequence;
use crate::cone::ConeGrid;
use crate::metric::FiniteMetricSpace;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Vertex {
    /// 0 for the root.
    pub level: usize,
    /// Index in `U_level^a`; 0 for the root.
    pub member: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootedTree {
    pub color: usize,
    /// Sorted by `(level, member)`; vertex 0 is the root.
    pub vertices: Vec<Vertex>,
    pub parent: Vec<Option<usize>>,
    /// Number of edges to the root.
    pub depth: Vec<usize>,
    /// `level_start[j]` is the first vertex of level `j`; one extra entry
    /// closes the last level.
    pub level_start: Vec<usize>,
}

/// Builds `T_a` for `color`.
///
/// Fails when a member has two containers at its parent level, which a
/// separated sequence rules out.
pub fn build_tree(seq: &CharSequence, color: usize) -> Result<RootedTree> {
    if color >= seq.colors().max(1) {
        return Err(Error::Tree(format!("no color {color}")));
    }
    let mut vertices = vec![Vertex { level: 0, member: 0 }];
    let mut level_start = vec![0, 1];
    for (j0, cov) in seq.levels.iter().enumerate() {
        let count = cov.classes.get(color).map_or(0, |f| f.len());
        vertices.extend((0..count).map(|member| Vertex { level: j0 + 1, member }));
        level_start.push(vertices.len());
    }
    let class = |level: usize| &seq.levels[level - 1].classes[color];
    let mut parent = vec![None; vertices.len()];
    let mut depth = vec![0usize; vertices.len()];
    for v in 1..vertices.len() {
        let Vertex { level, member } = vertices[v];
        let set = &class(level).members[member];
        let mut found = 0usize;
        for up in (1..level).rev() {
            let mut containers = class(up)
                .iter()
                .enumerate()
                .filter(|(_, u)| set.is_subset(u))
                .map(|(i, _)| i);
            if let Some(first) = containers.next() {
                if let Some(second) = containers.next() {
                    return Err(Error::Tree(format!(
                        "color {color}: level {level} member {member} lies in members {first} and {second} of level {up}"
                    )));
                }
                found = level_start[up] + first;
                break;
            }
        }
        parent[v] = Some(found);
        depth[v] = depth[found] + 1;
    }
    Ok(RootedTree {
        color,
        vertices,
        parent,
        depth,
        level_start,
    })
}

impl RootedTree {
    /// Reassembles a tree from its vertex list and parent links, as read
    /// back from a file. Vertices must be sorted by `(level, member)` with
    /// members numbered from 0 on each level and the root first; parents
    /// must sit at lower levels. Containment is left to [`Self::validate`].
    pub fn from_parts(color: usize, vertices: Vec<Vertex>, parent: Vec<Option<usize>>) -> Result<Self> {
        let fail = |msg: alloc::string::String| Err(Error::Tree(format!("color {color}: {msg}")));
        if vertices.len() != parent.len() {
            return fail(format!("{} vertices but {} parent links", vertices.len(), parent.len()));
        }
        if vertices.first() != Some(&Vertex { level: 0, member: 0 }) || parent[0].is_some() {
            return fail("vertex 0 is not a parentless root".into());
        }
        let mut level_start = vec![0, 1];
        let mut depth = vec![0usize; vertices.len()];
        for v in 1..vertices.len() {
            let Vertex { level, member } = vertices[v];
            let prev = vertices[v - 1];
            let expected = if level == prev.level { prev.member + 1 } else { 0 };
            if level < prev.level || level == 0 || member != expected {
                return fail(format!("vertex {v} = {:?} is out of order", vertices[v]));
            }
            while level_start.len() <= level {
                level_start.push(v);
            }
            match parent[v] {
                Some(p) if p < vertices.len() && vertices[p].level < level => depth[v] = depth[p] + 1,
                other => return fail(format!("vertex {v} has parent {other:?}")),
            }
        }
        level_start.push(vertices.len());
        Ok(RootedTree {
            color,
            vertices,
            parent,
            depth,
            level_start,
        })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn max_level(&self) -> usize {
        self.level_start.len() - 2
    }

    pub fn vertex(&self, level: usize, member: usize) -> Option<usize> {
        let start = *self.level_start.get(level)?;
        let end = *self.level_start.get(level + 1)?;
        (start + member < end).then_some(start + member)
    }

    pub fn level(&self, v: usize) -> usize {
        self.vertices[v].level
    }

    fn check(&self, v: usize) -> Result<()> {
        if v < self.len() {
            Ok(())
        } else {
            Err(Error::ForeignVertex(v))
        }
    }

    /// Path length between two vertices through their lowest common
    /// ancestor.
    pub fn dist(&self, a: usize, b: usize) -> Result<usize> {
        self.check(a)?;
        self.check(b)?;
        let (mut x, mut y, mut steps) = (a, b, 0usize);
        while self.depth[x] > self.depth[y] {
            x = self.parent[x].expect("non-root has a parent");
            steps += 1;
        }
        while self.depth[y] > self.depth[x] {
            y = self.parent[y].expect("non-root has a parent");
            steps += 1;
        }
        while x != y {
            x = self.parent[x].expect("non-root has a parent");
            y = self.parent[y].expect("non-root has a parent");
            steps += 2;
        }
        Ok(steps)
    }

    /// Neighbors of every vertex.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.len()];
        for (v, p) in self.parent.iter().enumerate() {
            if let Some(p) = *p {
                adj[v].push(p);
                adj[p].push(v);
            }
        }
        adj
    }

    /// Breadth-first distances from `source`; `usize::MAX` if unreachable.
    pub fn bfs(&self, source: usize) -> Vec<usize> {
        let adj = self.adjacency();
        bfs_on(&adj, source)
    }

    /// Structural and set-theoretic checks: one root, parents at lower
    /// levels that contain the child, no container at a level between
    /// parent and child, level-1 vertices on the root, and every vertex
    /// reaching the root.
    pub fn validate(&self, seq: &CharSequence) -> Result<()> {
        let fail = |msg: alloc::string::String| Err(Error::Tree(format!("color {}: {msg}", self.color)));
        if self.vertices.first() != Some(&Vertex { level: 0, member: 0 }) || self.parent[0].is_some() {
            return fail("vertex 0 is not a parentless root".into());
        }
        let class = |level: usize| &seq.levels[level - 1].classes[self.color];
        for v in 1..self.len() {
            let Vertex { level, member } = self.vertices[v];
            let Some(p) = self.parent[v] else {
                return fail(format!("vertex {v} has no parent"));
            };
            let plevel = self.level(p);
            if plevel >= level {
                return fail(format!("vertex {v} at level {level} hangs below level {plevel}"));
            }
            let set = &class(level).members[member];
            if plevel > 0 && !set.is_subset(&class(plevel).members[self.vertices[p].member]) {
                return fail(format!("vertex {v} is not contained in its parent {p}"));
            }
            if level == 1 && p != 0 {
                return fail(format!("level-1 vertex {v} is not on the root"));
            }
            for up in (plevel + 1)..level {
                if class(up).iter().any(|u| set.is_subset(u)) {
                    return fail(format!("vertex {v} has a container at level {up} above its parent"));
                }
            }
        }
        // Acyclic and connected: every walk upwards reaches the root.
        for v in 0..self.len() {
            let (mut x, mut steps) = (v, 0usize);
            while let Some(p) = self.parent[x] {
                x = p;
                steps += 1;
                if steps > self.len() {
                    return fail(format!("cycle through vertex {v}"));
                }
            }
            if x != 0 || steps != self.depth[v] {
                return fail(format!("vertex {v} does not reach the root at its depth"));
            }
        }
        let edges = self.parent.iter().flatten().count();
        if edges + 1 != self.len() {
            return fail(format!("{edges} edges on {} vertices", self.len()));
        }
        Ok(())
    }
}

pub(crate) fn bfs_on(adj: &[Vec<usize>], source: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    dist
}

/// The images of all grid points in every tree, with the `ℓ¹` product
/// distance `Σ_a |f_a(x) f_a(x')|`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductEmbedding {
    pub trees: Vec<RootedTree>,
    /// `table[x][a]` is `f_a(x)`.
    pub table: Vec<Vec<usize>>,
    /// `max_{x,a} dist(π_j(x), member of f_a(x)) / r^j` over grid points
    /// off the vertex.
    pub nearest_ratio: f64,
}

impl ProductEmbedding {
    pub fn colors(&self) -> usize {
        self.trees.len()
    }

    pub fn tree_dist(&self, color: usize, x: usize, y: usize) -> Result<usize> {
        let row = |i: usize| self.table.get(i).ok_or(Error::NotInGrid(i));
        self.trees[color].dist(row(x)?[color], row(y)?[color])
    }

    pub fn product_dist(&self, x: usize, y: usize) -> Result<usize> {
        (0..self.colors()).map(|a| self.tree_dist(a, x, y)).sum()
    }
}

/// `f_a(x)` for every grid point: the root for `o`, otherwise the member
/// of `U_j^a` nearest to `π_j(x)`, ties to the smallest index.
pub fn embed_grid(
    space: &FiniteMetricSpace,
    grid: &ConeGrid,
    seq: &CharSequence,
    trees: Vec<RootedTree>,
) -> Result<ProductEmbedding> {
    if libm::fabs(grid.r - seq.r) > 1e-12 * seq.r {
        return Err(Error::InvalidParameter(format!("grid r = {} but sequence r = {}", grid.r, seq.r)));
    }
    if grid.depth > seq.depth() {
        return Err(Error::InvalidParameter(format!(
            "grid depth {} exceeds sequence depth {}",
            grid.depth,
            seq.depth()
        )));
    }
    if grid.n != space.len() {
        return Err(Error::InvalidParameter("grid and sequence live over different spaces".into()));
    }
    for (a, t) in trees.iter().enumerate() {
        if t.color != a {
            return Err(Error::Tree(format!("tree {a} is for color {}", t.color)));
        }
    }
    let n = space.len();
    let mut table = vec![vec![0usize; trees.len()]; grid.len()];
    let mut nearest_ratio = 0.0f64;
    for level in 1..=grid.depth {
        let scale = seq.scale(level);
        for (a, tree) in trees.iter().enumerate() {
            let class = &seq.levels[level - 1].classes[a];
            if class.is_empty() {
                return Err(Error::Tree(format!("color {a} has no members at level {level}")));
            }
            let fields: Vec<Vec<f64>> = class.iter().map(|m| space.distance_field(m)).collect();
            for z in 0..n {
                let mut best = (f64::INFINITY, 0usize);
                for (i, f) in fields.iter().enumerate() {
                    if f[z] < best.0 {
                        best = (f[z], i);
                    }
                }
                nearest_ratio = nearest_ratio.max(best.0 / scale);
                let x = grid.index(level, z).expect("grid point");
                table[x][a] = tree.vertex(level, best.1).expect("member has a vertex");
            }
        }
    }
    Ok(ProductEmbedding {
        trees,
        table,
        nearest_ratio,
    })
}

/// `f_a(x)` for one grid point.
pub fn embed_point(embedding: &ProductEmbedding, grid: &ConeGrid, x: usize, color: usize) -> Result<usize> {
    grid.locate(x)?;
    embedding
        .table
        .get(x)
        .and_then(|row| row.get(color))
        .copied()
        .ok_or(Error::NotInGrid(x))
}

/// The outcome of one radial check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RadialWitness {
    pub color: usize,
    /// Steps from `f_a(x)` up to its first ancestor of level `≤ i`.
    pub m: usize,
}

/// For `x ∈ Z_j` and `i ≤ j`: the color maximizing the climb `M` from
/// `f_a(x)` to its first ancestor of level `≤ i` (the nearest level-`≤ i`
/// vertex that is lowest on its segment), checked against
/// `M + 1 ≥ (j - i + 1) / |A|`.
pub fn radial_check(embedding: &ProductEmbedding, grid: &ConeGrid, x: usize, i: usize) -> Result<RadialWitness> {
    let (level, _) = grid.locate(x)?;
    if i > level {
        return Err(Error::InvalidParameter(format!("i = {i} exceeds the level {level} of point {x}")));
    }
    let mut best = RadialWitness { color: 0, m: 0 };
    for (a, tree) in embedding.trees.iter().enumerate() {
        let mut v = embedding.table[x][a];
        let mut m = 0usize;
        while tree.level(v) > i {
            v = tree.parent[v].expect("non-root has a parent");
            m += 1;
        }
        if m > best.m {
            best = RadialWitness { color: a, m };
        }
    }
    let colors = embedding.colors().max(1);
    if (best.m + 1) * colors < level - i + 1 {
        return Err(Error::Radial {
            point: x,
            level,
            i,
            best: best.m,
            color: best.color,
        });
    }
    Ok(best)
}

/// For side lengths of a triangle with `t ≥ p`: `p + q ≤ 3t`, where `q` is
/// the third side. Checked with slack `1e-12` relative.
pub fn three_t_bound(p: f64, q: f64, t: f64) -> bool {
    t < p || p + q <= 3.0 * t * (1.0 + 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charseq::Provenance;
    use crate::covering::{ColoredCovering, Family};
    use crate::PointSet;

    fn seq(levels: Vec<Vec<Vec<usize>>>, n: usize) -> CharSequence {
        let levels = levels
            .into_iter()
            .map(|members| {
                ColoredCovering::new(
                    vec![Family::new(members.into_iter().map(|m| PointSet::from_ids(n, m)).collect())],
                    1.0,
                )
            })
            .collect();
        CharSequence {
            r: 0.5,
            levels,
            delta: 0.1,
            gamma: 0.1,
            lambda: 1.0,
            provenance: Provenance::default(),
            base_delta: 0.2,
            base_lambda: 1.0,
            gamma_trace: Vec::new(),
            shrink_totals: Vec::new(),
            violated_preconditions: Vec::new(),
        }
    }

    #[test]
    fn hand_instance() {
        // L = {0..4}, R = {4..8}; L1, L2 ⊂ L and R1 ⊂ R.
        let s = seq(vec![vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]], vec![vec![0, 1], vec![2, 3], vec![5, 6]]], 8);
        let t = build_tree(&s, 0).unwrap();
        t.validate(&s).unwrap();
        assert_eq!(t.len(), 6);
        let l = t.vertex(1, 0).unwrap();
        let r = t.vertex(1, 1).unwrap();
        assert_eq!(t.parent[l], Some(0));
        assert_eq!(t.parent[r], Some(0));
        assert_eq!(t.parent[t.vertex(2, 0).unwrap()], Some(l));
        assert_eq!(t.parent[t.vertex(2, 1).unwrap()], Some(l));
        assert_eq!(t.parent[t.vertex(2, 2).unwrap()], Some(r));
        assert_eq!(t.dist(t.vertex(2, 0).unwrap(), t.vertex(2, 2).unwrap()).unwrap(), 4);
        assert!(t.dist(0, 99).is_err());
    }

    #[test]
    fn empty_sequence_is_a_root() {
        let s = seq(vec![], 3);
        let t = build_tree(&s, 0).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.dist(0, 0).unwrap(), 0);
        t.validate(&s).unwrap();
    }

    #[test]
    fn skipped_levels_go_to_the_largest_container() {
        // Level 2 has nothing around {0}, so level 3's {0} hangs on level 1.
        let s = seq(vec![vec![vec![0, 1, 2]], vec![vec![2]], vec![vec![0]]], 3);
        let t = build_tree(&s, 0).unwrap();
        t.validate(&s).unwrap();
        assert_eq!(t.parent[t.vertex(3, 0).unwrap()], t.vertex(1, 0));
    }

    #[test]
    fn overlapping_containers_are_rejected() {
        let s = seq(vec![vec![vec![0, 1], vec![1, 2]], vec![vec![1]]], 3);
        assert!(matches!(build_tree(&s, 0), Err(Error::Tree(_))));
    }

    #[test]
    fn planted_bad_parent_fails_validation() {
        let s = seq(vec![vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]], vec![vec![0, 1]]], 8);
        let mut t = build_tree(&s, 0).unwrap();
        let v = t.vertex(2, 0).unwrap();
        t.parent[v] = t.vertex(1, 1);
        assert!(t.validate(&s).is_err());
    }

    #[test]
    fn parts_round_trip() {
        let s = seq(vec![vec![vec![0, 1, 2]], vec![vec![2]], vec![vec![0]]], 3);
        let t = build_tree(&s, 0).unwrap();
        let back = RootedTree::from_parts(0, t.vertices.clone(), t.parent.clone()).unwrap();
        assert_eq!(back, t);
        let mut parent = t.parent.clone();
        parent[1] = Some(3);
        assert!(RootedTree::from_parts(0, t.vertices.clone(), parent).is_err());
        let mut vertices = t.vertices.clone();
        vertices.swap(1, 2);
        assert!(RootedTree::from_parts(0, vertices, t.parent.clone()).is_err());
    }

    #[test]
    fn three_t() {
        assert!(three_t_bound(1.0, 2.0, 1.0));
        assert!(three_t_bound(5.0, 100.0, 1.0));
        assert!(!three_t_bound(1.0, 2.5, 1.0));
    }
}
