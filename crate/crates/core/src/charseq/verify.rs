use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{at_least, at_most, CharSequence};
use crate::covering::LebesgueMode;
use crate::metric::FiniteMetricSpace;
use crate::PointSet;

/// Checks of properties (1) and (2) at one level.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelReport {
    pub level: usize,
    pub scale: f64,
    pub mesh: f64,
    pub lebesgue: f64,
    pub lebesgue_mode: LebesgueMode,
    /// Per color.
    pub net_radius: Vec<f64>,
    /// Per color; informational.
    pub disjointness: Vec<f64>,
    pub mesh_ok: bool,
    pub lebesgue_ok: bool,
    pub net_ok: bool,
    pub covering_ok: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    /// `U` meets `U'` without being contained in it.
    Overlap,
    /// Disjoint, but closer than `γ r^j`.
    TooClose,
    /// Contained, but less than `γ r^j` from the complement.
    ShallowNesting,
    /// No level-`j` member sits `γ r^j`-deep inside `U'`.
    NoDescendant,
}

impl WitnessKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WitnessKind::Overlap => "overlap",
            WitnessKind::TooClose => "too_close",
            WitnessKind::ShallowNesting => "shallow_nesting",
            WitnessKind::NoDescendant => "no_descendant",
        }
    }
}

/// The binding constraint on γ: member `(level, member)` against
/// `(other_level, other_member)` of the same color.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparationWitness {
    pub color: usize,
    pub level: usize,
    pub member: usize,
    pub other_level: usize,
    pub other_member: usize,
    pub kind: WitnessKind,
    /// Largest admissible `γ` for this constraint.
    pub margin: f64,
    /// Point of `U` realizing the margin, when there is one.
    pub point: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparationReport {
    pub required_gamma: f64,
    pub achieved_gamma: f64,
    pub constraints_checked: usize,
    pub worst: Option<SeparationWitness>,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyReport {
    pub levels: Vec<LevelReport>,
    pub separation: SeparationReport,
    /// `min_j L_j / r^j`.
    pub achieved_delta: f64,
    /// `max_{j,a} net(U_j^a) / r^j`.
    pub achieved_lambda: f64,
    /// `min_{j,a}` disjointness radius of `U_j^a` over `r^j`.
    pub achieved_disjoint: f64,
    pub property1: bool,
    pub property2: bool,
    pub property3: bool,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.property1 && self.property2 && self.property3
    }

    /// One line naming the first failure, or the achieved constants.
    pub fn summary(&self) -> String {
        if let Some(l) = self.levels.iter().find(|l| !(l.mesh_ok && l.lebesgue_ok && l.covering_ok)) {
            return format!(
                "property (1) fails at level {}: mesh {} (bound {}), Lebesgue {}",
                l.level, l.mesh, l.scale, l.lebesgue
            );
        }
        if let Some(l) = self.levels.iter().find(|l| !l.net_ok) {
            return format!("property (2) fails at level {}: net radii {:?}", l.level, l.net_radius);
        }
        if !self.property3 {
            if let Some(w) = &self.separation.worst {
                return format!(
                    "property (3) fails: color {} level {} member {} vs level {} member {}: {} with γ ≤ {} < {}",
                    w.color,
                    w.level,
                    if w.member == usize::MAX { String::from("none") } else { format!("{}", w.member) },
                    w.other_level,
                    w.other_member,
                    w.kind.as_str(),
                    w.margin,
                    self.separation.required_gamma
                );
            }
        }
        format!(
            "passed: δ = {}, γ = {}, λ = {}",
            self.achieved_delta, self.separation.achieved_gamma, self.achieved_lambda
        )
    }
}

struct Member<'a> {
    level: usize,
    index: usize,
    set: &'a PointSet,
    near: Vec<f64>,
    /// Distance to the complement.
    far: Vec<f64>,
}

fn min_over(set: &PointSet, field: &[f64]) -> (f64, Option<usize>) {
    let mut best = (f64::INFINITY, None);
    for z in set.iter() {
        if field[z] < best.0 {
            best = (field[z], Some(z));
        }
    }
    best
}

/// Exhaustive check of properties (1)–(3) against the declared constants.
pub fn verify_char_seq(space: &FiniteMetricSpace, seq: &CharSequence) -> PropertyReport {
    let n = space.len();
    let mut levels = Vec::with_capacity(seq.depth());
    let mut achieved_delta = f64::INFINITY;
    let mut achieved_lambda = 0.0f64;
    let mut achieved_disjoint = f64::INFINITY;
    for (j0, cov) in seq.levels.iter().enumerate() {
        let level = j0 + 1;
        let scale = seq.scale(level);
        let mesh = cov.mesh(space).unwrap_or(f64::INFINITY);
        let (lebesgue, mode) = cov.scale_lebesgue(space).unwrap_or((0.0, LebesgueMode::Capped));
        let net_radius: Vec<f64> = cov.classes.iter().map(|f| space.net_radius(&f.union(n))).collect();
        let disjointness: Vec<f64> = cov.classes.iter().map(|f| f.disjointness_radius(space)).collect();
        achieved_delta = achieved_delta.min(lebesgue / scale);
        achieved_lambda = net_radius.iter().fold(achieved_lambda, |a, &x| a.max(x / scale));
        achieved_disjoint = disjointness.iter().fold(achieved_disjoint, |a, &x| a.min(x / scale));
        levels.push(LevelReport {
            level,
            scale,
            mesh,
            lebesgue,
            lebesgue_mode: mode,
            mesh_ok: at_most(mesh, scale),
            lebesgue_ok: at_least(lebesgue, seq.delta * scale),
            net_ok: net_radius.iter().all(|&x| at_most(x, seq.lambda * scale)),
            covering_ok: cov.is_covering(space),
            net_radius,
            disjointness,
        });
    }
    let separation = check_separation(space, seq);
    let property1 = levels.iter().all(|l| l.mesh_ok && l.lebesgue_ok && l.covering_ok);
    let property2 = levels.iter().all(|l| l.net_ok);
    let property3 = separation.ok;
    PropertyReport {
        levels,
        separation,
        achieved_delta,
        achieved_lambda,
        achieved_disjoint,
        property1,
        property2,
        property3,
    }
}

fn check_separation(space: &FiniteMetricSpace, seq: &CharSequence) -> SeparationReport {
    let mut achieved = f64::INFINITY;
    let mut worst: Option<SeparationWitness> = None;
    let mut checked = 0usize;
    let mut record = |margin: f64, w: SeparationWitness| {
        if margin < achieved {
            achieved = margin;
            worst = Some(w);
        }
    };
    for color in 0..seq.colors() {
        let members: Vec<Member<'_>> = seq
            .levels
            .iter()
            .enumerate()
            .flat_map(|(j0, cov)| {
                cov.classes
                    .get(color)
                    .into_iter()
                    .flat_map(|f| f.iter().enumerate())
                    .map(move |(index, set)| (j0 + 1, index, set))
            })
            .map(|(level, index, set)| Member {
                level,
                index,
                set,
                near: space.distance_field(set),
                far: space.distance_field(&set.complement()),
            })
            .collect();
        for u in &members {
            let scale = seq.scale(u.level);
            for other in &members {
                if other.level > u.level || (other.level == u.level && other.index == u.index) {
                    continue;
                }
                checked += 1;
                let nested = u.set.is_subset(other.set);
                let (dist, point) = if nested {
                    min_over(u.set, &other.far)
                } else {
                    min_over(u.set, &other.near)
                };
                let kind = if nested {
                    WitnessKind::ShallowNesting
                } else if dist == 0.0 {
                    WitnessKind::Overlap
                } else {
                    WitnessKind::TooClose
                };
                record(
                    dist / scale,
                    SeparationWitness {
                        color,
                        level: u.level,
                        member: u.index,
                        other_level: other.level,
                        other_member: other.index,
                        kind,
                        margin: dist / scale,
                        point,
                    },
                );
            }
        }
        // Descendants: every coarser member holds some finer member deep inside.
        for outer in &members {
            for level in (outer.level + 1)..=seq.depth() {
                checked += 1;
                let scale = seq.scale(level);
                let best = members
                    .iter()
                    .filter(|m| m.level == level && m.set.is_subset(outer.set))
                    .map(|m| min_over(m.set, &outer.far).0)
                    .fold(0.0f64, f64::max);
                record(
                    best / scale,
                    SeparationWitness {
                        color,
                        level,
                        member: usize::MAX,
                        other_level: outer.level,
                        other_member: outer.index,
                        kind: WitnessKind::NoDescendant,
                        margin: best / scale,
                        point: None,
                    },
                );
            }
        }
    }
    SeparationReport {
        required_gamma: seq.gamma,
        achieved_gamma: achieved,
        constraints_checked: checked,
        ok: at_least(achieved, seq.gamma),
        worst,
    }
}
