//! Finite metric spaces and the neighborhood calculus.
//!
//! Radii are signed: for `r > 0` the open neighborhood
//! `B_r(U) = {z : dist(z, U) < r}`, for `r = 0` the set itself, and for
//! `r < 0` the shrink `B_r(U) = Z \ B̄_{|r|}(Z \ U)`. Open neighborhoods use
//! strict `<`, closed ones `≤`; every downstream module relies on exactly
//! these comparisons.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::{Error, PointSet, Result};

/// Relative slack accepted when validating floating-point distance tables.
pub const TRIANGLE_TOLERANCE: f64 = 1e-12;

/// A finite metric space with an explicit distance table.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetricSpace {
    ids: Vec<String>,
    dist: Vec<f64>,
    diam: f64,
}

impl FiniteMetricSpace {
    /// Builds a space from a full distance matrix, validating the metric axioms.
    pub fn from_matrix(ids: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let n = ids.len();
        if rows.len() != n || rows.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidMetric(format!(
                "distance table must be {n}x{n}"
            )));
        }
        Self::from_fn(ids, |i, j| rows[i][j])
    }

    /// Builds a space from a distance function evaluated on all ordered pairs.
    pub fn from_fn(ids: Vec<String>, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let n = ids.len();
        if n == 0 {
            return Err(Error::InvalidMetric("a space needs at least one point".into()));
        }
        let mut dist = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                dist.push(f(i, j));
            }
        }
        let space = Self {
            ids,
            dist,
            diam: 0.0,
        };
        space.validate()?;
        let diam = space.dist.iter().copied().fold(0.0, f64::max);
        Ok(Self { diam, ..space })
    }

    /// Same as [`from_fn`](Self::from_fn) with ids `"0"`, `"1"`, ….
    pub fn with_indices(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        Self::from_fn((0..n).map(|i| i.to_string()).collect(), f)
    }

    fn validate(&self) -> Result<()> {
        let n = self.len();
        let mut seen = alloc::collections::BTreeSet::new();
        for id in &self.ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::InvalidMetric(format!("duplicate point id {id:?}")));
            }
        }
        for i in 0..n {
            if self.d(i, i) != 0.0 {
                return Err(Error::InvalidMetric(format!("dist({i},{i}) != 0")));
            }
            for j in 0..n {
                let d = self.d(i, j);
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::InvalidMetric(format!(
                        "dist({i},{j}) = {d} is not a finite nonnegative number"
                    )));
                }
                if d != self.d(j, i) {
                    return Err(Error::InvalidMetric(format!("dist({i},{j}) != dist({j},{i})")));
                }
            }
        }
        for j in 0..n {
            let row_j = self.row(j);
            for i in 0..n {
                let dij = row_j[i];
                let row_i = self.row(i);
                for k in 0..n {
                    let direct = row_i[k];
                    let detour = dij + row_j[k];
                    if direct > detour && direct - detour > TRIANGLE_TOLERANCE * direct {
                        return Err(Error::InvalidMetric(format!(
                            "triangle inequality fails: dist({i},{k}) = {direct} > \
                             dist({i},{j}) + dist({j},{k}) = {detour}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    /// Always false: spaces have at least one point.
    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.len() + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.dist[i * n..(i + 1) * n]
    }

    /// Diameter of the whole space.
    pub fn diam(&self) -> f64 {
        self.diam
    }

    pub fn full(&self) -> PointSet {
        PointSet::full(self.len())
    }

    pub fn empty_set(&self) -> PointSet {
        PointSet::empty(self.len())
    }

    /// Smallest distance between two distinct points, `+∞` for a single point.
    pub fn min_separation(&self) -> f64 {
        let n = self.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            for j in (i + 1)..n {
                best = best.min(self.d(i, j));
            }
        }
        best
    }

    pub fn eccentricity(&self, i: usize) -> f64 {
        self.row(i).iter().copied().fold(0.0, f64::max)
    }

    /// `dist(z, U)`; `+∞` when `U` is empty.
    pub fn dist_to_set(&self, z: usize, set: &PointSet) -> f64 {
        let row = self.row(z);
        set.iter().map(|u| row[u]).fold(f64::INFINITY, f64::min)
    }

    /// `dist(z, U)` for every point `z`.
    pub fn distance_field(&self, set: &PointSet) -> Vec<f64> {
        let n = self.len();
        let mut field = alloc::vec![f64::INFINITY; n];
        for u in set.iter() {
            for (f, &d) in field.iter_mut().zip(self.row(u)) {
                if d < *f {
                    *f = d;
                }
            }
        }
        field
    }

    /// Largest pairwise distance inside `U`; zero for singletons.
    pub fn diameter(&self, set: &PointSet) -> Result<f64> {
        if set.is_empty() {
            return Err(Error::EmptySubset);
        }
        let members = set.to_vec();
        let mut best = 0.0f64;
        for (a, &i) in members.iter().enumerate() {
            let row = self.row(i);
            for &j in &members[a + 1..] {
                best = best.max(row[j]);
            }
        }
        Ok(best)
    }

    /// `dist(U, U') = min |uu'|` over `u ∈ U`, `u' ∈ U'`.
    pub fn dist_sets(&self, a: &PointSet, b: &PointSet) -> Result<f64> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptySubset);
        }
        Ok(a.iter()
            .map(|i| self.dist_to_set(i, b))
            .fold(f64::INFINITY, f64::min))
    }

    /// The signed-radius neighborhood `B_r(U)`. Empty results are legal.
    pub fn neighborhood(&self, set: &PointSet, r: f64) -> PointSet {
        if r == 0.0 {
            return set.clone();
        }
        if r > 0.0 {
            let field = self.distance_field(set);
            return PointSet::from_ids(
                self.len(),
                field.iter().enumerate().filter(|(_, &d)| d < r).map(|(z, _)| z),
            );
        }
        let outside = set.complement();
        let field = self.distance_field(&outside);
        let radius = -r;
        PointSet::from_ids(
            self.len(),
            field
                .iter()
                .enumerate()
                .filter(|(_, &d)| d > radius)
                .map(|(z, _)| z),
        )
    }

    /// The closed neighborhood `B̄_r(U) = {z : dist(z, U) ≤ r}`.
    pub fn closed_neighborhood(&self, set: &PointSet, r: f64) -> Result<PointSet> {
        if set.is_empty() {
            return Err(Error::EmptySubset);
        }
        if r < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "closed neighborhood radius must be nonnegative, got {r}"
            )));
        }
        let field = self.distance_field(set);
        Ok(PointSet::from_ids(
            self.len(),
            field.iter().enumerate().filter(|(_, &d)| d <= r).map(|(z, _)| z),
        ))
    }

    /// Whether every point lies within `lambda` of `net` (`≤` comparison).
    pub fn is_lambda_net(&self, net: &PointSet, lambda: f64) -> bool {
        !net.is_empty() && self.net_radius(net) <= lambda
    }

    /// `max_z dist(z, X)`: the smallest λ for which `X` is a λ-net.
    pub fn net_radius(&self, net: &PointSet) -> f64 {
        self.distance_field(net).into_iter().fold(0.0, f64::max)
    }

    /// Largest open ball radius around `z` contained in `U`:
    /// `dist(z, Z \ U)`, `+∞` when `U = Z`.
    pub fn depth_in(&self, z: usize, set: &PointSet) -> f64 {
        if !set.contains(z) {
            return 0.0;
        }
        let n = self.len();
        let row = self.row(z);
        (0..n)
            .filter(|&y| !set.contains(y))
            .map(|y| row[y])
            .fold(f64::INFINITY, f64::min)
    }
}
