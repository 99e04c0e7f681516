//! Quasi-isometric embeddings of hyperbolic cones into products of trees.
//!
//! The crate works on finite metric spaces and follows the construction end
//! to end:
//!
//! * [`metric`]: exact finite metric spaces and the signed-radius
//!   neighborhood calculus `B_r(U)`.
//! * [`covering`]: families and colored coverings with mesh, multiplicity,
//!   Lebesgue number, capacity, the shrink `B_{-s}` and the `*_s` merge.
//! * [`charseq`]: characteristic sequences of coverings, their separation
//!   into a γ-separated sequence, and an exhaustive verifier.
//! * [`cone`]: the hyperbolic cone `Co(Z)`, its level spheres and the grid
//!   `X = {o} ∪ Z_1 ∪ … ∪ Z_J`.
//! * [`tree`]: the trees `T_a` built from a sequence and the map
//!   `f: X → ∏ T_a`.
//! * [`qi`]: Gromov products, δ-hyperbolicity and quasi-isometry fitting.
//! * [`spaces`] and [`capacity`]: deterministic space generators and the
//!   finite-scale capacity profile.
//!
//! Everything here is `no_std` with `alloc`; file formats, configuration and
//! the command line live in the `conetree` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod capacity;
pub mod charseq;
pub mod cone;
pub mod covering;
mod error;
pub mod metric;
mod pointset;
pub mod qi;
pub mod spaces;
pub mod tree;

pub use error::{Error, Result};
pub use pointset::PointSet;
