//! Characteristic sequences of coverings.
//!
//! A characteristic sequence with parameter `r` is a ladder of colored
//! coverings `U_1, …, U_J` with
//!
//! 1. `mesh U_j ≤ r^j` and `L(U_j) ≥ δ r^j`,
//! 2. every color class `U_j^a` a `λ r^j`-net,
//!
//! and it is γ-separated when, for members `U ∈ U_j^a`, `U' ∈ U_{j'}^a`,
//! `j' ≤ j` and `s = γ r^j`, either `B_s(U) ∩ U' = ∅` or `B_s(U) ⊂ U'`, with
//! some `U'' ∈ U_j^a` satisfying `B_s(U'') ⊂ U'` whenever `j' < j`.
//!
//! [`build_base`] produces a sequence with (1), (2), disjoint color classes
//! and inner balls from a space-specific [`Strategy`]; [`separate`] runs the
//! shrink-and-merge recursion to obtain (3); [`verify_char_seq`] checks all
//! three exhaustively and reports achieved constants.

mod base;
mod separate;
mod strategy;
mod verify;

use alloc::string::String;
use alloc::vec::Vec;

use crate::covering::ColoredCovering;

pub use base::{build_base, pad_nets, BaseConstants};
pub use separate::{
    ast_shrink, gamma_trace, separate, separate_unverified, violated_preconditions, PreconditionPolicy,
};
pub use strategy::{covering_at_scale, Strategy};
pub use verify::{
    verify_char_seq, LevelReport, PropertyReport, SeparationReport, SeparationWitness, WitnessKind,
};

/// Largest δ handed to the shrink-and-merge step, which needs `δ ≤ 2/3`.
pub const MAX_DELTA: f64 = 2.0 / 3.0;

/// Relative slack used when comparing measured quantities with constants
/// derived from them.
pub const REL_TOL: f64 = 1e-12;

/// `r^j`, evaluated the same way everywhere.
pub fn level_scale(r: f64, level: usize) -> f64 {
    libm::pow(r, level as f64)
}

pub(crate) fn at_least(value: f64, bound: f64) -> bool {
    value >= bound - REL_TOL * libm::fabs(bound)
}

pub(crate) fn at_most(value: f64, bound: f64) -> bool {
    value <= bound + REL_TOL * libm::fabs(bound)
}

/// Where a sequence came from and what was asked of it.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Provenance {
    pub strategy: String,
    pub requested_colors: usize,
    pub colors_used: usize,
    pub requested_delta: Option<f64>,
    pub notes: Vec<String>,
}

/// The output of [`build_base`]: properties (1), (2), per-color
/// `δ r^j`-disjointness and `δ r^j` inner balls.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseSequence {
    pub r: f64,
    /// `levels[j - 1]` is the covering at level `j`.
    pub levels: Vec<ColoredCovering>,
    pub delta: f64,
    pub lambda: f64,
    pub achieved: BaseConstants,
    pub provenance: Provenance,
}

impl BaseSequence {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn colors(&self) -> usize {
        self.levels.first().map_or(0, ColoredCovering::colors)
    }
}

/// A sequence of colored coverings with declared characteristic constants.
#[derive(Clone, Debug, PartialEq)]
pub struct CharSequence {
    pub r: f64,
    /// `levels[j - 1]` is the covering at level `j`.
    pub levels: Vec<ColoredCovering>,
    pub delta: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub provenance: Provenance,
    /// Constants of the base sequence the recursion started from.
    pub base_delta: f64,
    pub base_lambda: f64,
    /// `gamma_trace[j - 1][k - j]` is the coefficient `γ_{k,j}`.
    pub gamma_trace: Vec<Vec<f64>>,
    /// Per level: the total shrink `Σ_{k=j}^{J-1} 2 r^{k+1}` actually applied,
    /// and the closed-form bound `2 r^{j+1} / (1 - r)`.
    pub shrink_totals: Vec<(f64, f64)>,
    /// Standing assumptions of the recursion that did not hold.
    pub violated_preconditions: Vec<String>,
}

impl CharSequence {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn colors(&self) -> usize {
        self.levels.first().map_or(0, ColoredCovering::colors)
    }

    /// `r^j`.
    pub fn scale(&self, level: usize) -> f64 {
        level_scale(self.r, level)
    }
}
