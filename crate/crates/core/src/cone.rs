//! The hyperbolic cone `Co(Z) = Z × [0, ∞) / Z × {0}` over a bounded space.
//!
//! Two points `(z, t)` and `(z', t')` are placed in the hyperbolic plane at
//! distances `t`, `t'` from a vertex `o` with angle `μ|zz'|` between them,
//! `μ = π / diam Z`, and the cone distance is the hyperbolic distance of
//! those two points.

use alloc::format;
use core::f64::consts::PI;

use crate::metric::FiniteMetricSpace;
use crate::{Error, Result};

/// Largest radial coordinate a grid may reach.
pub const MAX_RADIUS: f64 = 40.0;

/// A point of the cone; `z = None` is the vertex `o`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConePoint {
    pub z: Option<usize>,
    pub t: f64,
}

impl ConePoint {
    pub const VERTEX: ConePoint = ConePoint { z: None, t: 0.0 };

    pub fn new(z: usize, t: f64) -> Self {
        Self { z: Some(z), t }
    }

    pub fn is_vertex(&self) -> bool {
        self.z.is_none() || self.t == 0.0
    }
}

/// Hyperbolic distance between points at distances `t`, `t2` from a common
/// vertex with angle `angle` between them:
/// `sinh²(d/2) = sinh²((t - t2)/2) + sinh t · sinh t2 · sin²(angle/2)`,
/// which is the law of cosines without its cancellation.
pub fn cone_distance(t: f64, t2: f64, angle: f64) -> f64 {
    let a = libm::sinh((t - t2) / 2.0);
    let b = libm::sin(angle / 2.0);
    let s = a * a + libm::sinh(t) * libm::sinh(t2) * b * b;
    2.0 * libm::asinh(libm::sqrt(s))
}

/// Distance between two points of the sphere `Z_j` of radius `jR` at
/// angle `angle`: `2 asinh(sinh(jR) sin(angle/2))`.
pub fn sphere_distance(angle: f64, level: usize, big_r: f64) -> f64 {
    2.0 * libm::asinh(libm::sinh(level as f64 * big_r) * libm::sin(angle / 2.0))
}

/// The cone over a finite space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HyperbolicCone<'a> {
    pub space: &'a FiniteMetricSpace,
    /// `π / diam Z`; `None` for a single point, where the cone is the ray.
    pub mu: Option<f64>,
}

impl<'a> HyperbolicCone<'a> {
    pub fn new(space: &'a FiniteMetricSpace) -> Self {
        let diam = space.diam();
        let mu = (diam > 0.0).then(|| PI / diam);
        Self { space, mu }
    }

    /// `μ|zz'|`, clamped into `[0, π]` against rounding in `μ`.
    pub fn angle(&self, z: usize, z2: usize) -> f64 {
        self.mu.map_or(0.0, |mu| (mu * self.space.d(z, z2)).clamp(0.0, PI))
    }

    pub fn dist(&self, x: ConePoint, y: ConePoint) -> f64 {
        match (x.z, y.z, self.mu) {
            (Some(z), Some(z2), Some(_)) => cone_distance(x.t, y.t, self.angle(z, z2)),
            _ => libm::fabs(x.t - y.t),
        }
    }
}

/// `X = {o} ∪ Z_1 ∪ … ∪ Z_J` with `Z_j = Z × {jR}` and `R = ln(1/r)`.
///
/// Index 0 is `o`; the point over `z` at level `j ≥ 1` has index
/// `1 + (j - 1)|Z| + z`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeGrid {
    pub r: f64,
    pub big_r: f64,
    pub depth: usize,
    pub n: usize,
    pub mu: Option<f64>,
}

/// The grid over `space` up to level `depth`.
///
/// Needs `r ∈ (0, 1)`, `r < diam Z` unless `Z` is a point, and
/// `depth · ln(1/r) ≤ 40`.
pub fn build_grid(space: &FiniteMetricSpace, r: f64, depth: usize) -> Result<ConeGrid> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidParameter(format!("r = {r} is not in (0, 1)")));
    }
    let diam = space.diam();
    if diam > 0.0 && r >= diam {
        return Err(Error::InvalidParameter(format!("r = {r} is not below diam Z = {diam}")));
    }
    let big_r = libm::log(1.0 / r);
    if depth as f64 * big_r > MAX_RADIUS {
        return Err(Error::InvalidParameter(format!(
            "depth {depth} reaches radius {} beyond {MAX_RADIUS}",
            depth as f64 * big_r
        )));
    }
    Ok(ConeGrid {
        r,
        big_r,
        depth,
        n: space.len(),
        mu: HyperbolicCone::new(space).mu,
    })
}

impl ConeGrid {
    pub fn len(&self) -> usize {
        1 + self.depth * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid index of the point over `z` at `level` (level 0 is `o`).
    pub fn index(&self, level: usize, z: usize) -> Option<usize> {
        match level {
            0 => Some(0),
            _ if level <= self.depth && z < self.n => Some(1 + (level - 1) * self.n + z),
            _ => None,
        }
    }

    /// `(level, π_j(x))`, with `None` for `o`.
    pub fn locate(&self, index: usize) -> Result<(usize, Option<usize>)> {
        if index == 0 {
            return Ok((0, None));
        }
        if index >= self.len() {
            return Err(Error::NotInGrid(index));
        }
        let k = index - 1;
        Ok((k / self.n + 1, Some(k % self.n)))
    }

    pub fn point(&self, index: usize) -> Result<ConePoint> {
        let (level, z) = self.locate(index)?;
        Ok(ConePoint {
            z,
            t: level as f64 * self.big_r,
        })
    }

    /// Cone distance between grid points.
    pub fn dist(&self, space: &FiniteMetricSpace, a: usize, b: usize) -> Result<f64> {
        Ok(HyperbolicCone { space, mu: self.mu }.dist(self.point(a)?, self.point(b)?))
    }

    /// `max` over `samples` of the distance to the nearest grid point.
    pub fn net_radius_over(&self, space: &FiniteMetricSpace, samples: &[ConePoint]) -> f64 {
        let cone = HyperbolicCone { space, mu: self.mu };
        samples
            .iter()
            .map(|&x| {
                (0..self.len())
                    .map(|i| cone.dist(x, self.point(i).expect("index in range")))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }

    /// `sinh(τ_j / 2) / (τ / r^j)` for the angle `τ` between two points of
    /// `Z_j`; comparable to 1 within [`comparison_constant`].
    pub fn sphere_ratio(&self, angle: f64, level: usize) -> f64 {
        let tau_j = sphere_distance(angle, level, self.big_r);
        libm::sinh(tau_j / 2.0) / (angle / libm::pow(self.r, level as f64))
    }
}

/// `C = 2π / (1 - r²)`: the sphere ratio lies in `[1/C, C]`, since
/// `sinh(jR) = (r^{-j} - r^j)/2` and `sin(τ/2)/τ ∈ [1/π, 1/2]`.
pub fn comparison_constant(r: f64) -> f64 {
    2.0 * PI / (1.0 - r * r)
}
