//! Finite-scale capacity profiles.
//!
//! For a scale `τ` and `m`, the best capacity `L(U)/mesh(U)` found among
//! `(m+1)`-colored coverings with `δτ ≤ mesh(U) ≤ τ` produced by a covering
//! strategy. This is a lower bound for the supremum over all such coverings.

use alloc::vec::Vec;

use crate::charseq::{covering_at_scale, Strategy};
use crate::covering::ColoredCovering;
use crate::metric::FiniteMetricSpace;

/// Stated in every profile.
pub const CAVEAT: &str = "Capacities are lower-bound witnesses: the best value found by a bounded \
search over one covering strategy at finitely many scales. They do not determine the capacity \
dimension, which needs the supremum over all coverings and the limit of vanishing scale.";

/// Separation hint handed to the strategies; fixed so that candidates do
/// not depend on δ.
const SEPARATION_HINT: f64 = 0.1;

#[derive(Clone, Debug, PartialEq)]
pub struct CapacityEntry {
    pub tau: f64,
    pub m: usize,
    pub capacity: f64,
    pub candidates: usize,
    pub admissible: usize,
    pub best_mesh: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CapacityProfile {
    pub strategy: Strategy,
    pub delta: f64,
    pub budget: usize,
    pub entries: Vec<CapacityEntry>,
    pub caveat: &'static str,
}

impl CapacityProfile {
    pub fn get(&self, tau: f64, m: usize) -> Option<&CapacityEntry> {
        self.entries.iter().find(|e| e.tau == tau && e.m == m)
    }
}

/// Whether `cov` counts as an `(m+1)`-colored covering with
/// `δτ ≤ mesh ≤ τ`: at most `m + 1` colors, each class pairwise disjoint.
fn admissible(space: &FiniteMetricSpace, cov: &ColoredCovering, m: usize, tau: f64, delta: f64) -> Option<f64> {
    if cov.colors() > m + 1 || !cov.is_covering(space) {
        return None;
    }
    if cov.classes.iter().any(|f| f.multiplicity(space.len()) > 1) {
        return None;
    }
    let mesh = cov.mesh(space).ok()?;
    (mesh <= tau && mesh >= delta * tau).then_some(mesh)
}

/// `geometric_ladder(top, ratio, steps)`: `top, top·ratio, …`.
pub fn geometric_ladder(top: f64, ratio: f64, steps: usize) -> Vec<f64> {
    (0..steps).map(|k| top * libm::pow(ratio, k as f64)).collect()
}

/// Runs `budget` covering variants of `strategy` per `(τ, m)` and keeps the
/// best capacity among admissible ones (0 when none is admissible). A
/// single-point space has capacity 1 at every scale.
pub fn capacity_profile(
    space: &FiniteMetricSpace,
    strategy: Strategy,
    ms: &[usize],
    taus: &[f64],
    delta: f64,
    budget: usize,
) -> CapacityProfile {
    let mut entries = Vec::with_capacity(ms.len() * taus.len());
    for &tau in taus {
        for &m in ms {
            let mut entry = CapacityEntry {
                tau,
                m,
                capacity: 0.0,
                candidates: 0,
                admissible: 0,
                best_mesh: None,
            };
            if space.len() == 1 {
                entry.capacity = 1.0;
                entry.best_mesh = Some(0.0);
            } else {
                for variant in 0..budget {
                    let Some(cov) = covering_at_scale(space, strategy, tau, m + 1, variant, SEPARATION_HINT)
                    else {
                        continue;
                    };
                    entry.candidates += 1;
                    let Some(mesh) = admissible(space, &cov, m, tau, delta) else {
                        continue;
                    };
                    entry.admissible += 1;
                    let cap = cov.capacity(space).unwrap_or(0.0).clamp(0.0, 1.0);
                    if cap > entry.capacity || entry.best_mesh.is_none() {
                        entry.capacity = entry.capacity.max(cap);
                        entry.best_mesh = Some(mesh);
                    }
                }
            }
            entries.push(entry);
        }
    }
    CapacityProfile {
        strategy,
        delta,
        budget,
        entries,
        caveat: CAVEAT,
    }
}
